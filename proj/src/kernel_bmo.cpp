#include "harmtree/kernel_bmo.hpp"

#include <algorithm>
#include <cmath>

#include "harmtree/error.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/random.hpp"

namespace harmtree {

namespace {

void require_dims(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m) {
  if (nu.size() != t.leaf_count()) throw Error(ErrorCode::DimensionMismatch, "nu does not match the leaves");
  if (m.size() != t.vertex_count()) throw Error(ErrorCode::DimensionMismatch, "m does not match the vertices");
}

void require_kernel_dims(const Tree& t, const Kernel& k) {
  if (k.rows() != t.vertex_count() || k.cols() != t.leaf_count()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel is " + std::to_string(k.rows()) + "x" +
                                                  std::to_string(k.cols()) + ", tree needs " +
                                                  std::to_string(t.vertex_count()) + "x" +
                                                  std::to_string(t.leaf_count()));
  }
}

/*
 * Visits every leaf once, grouped by ring: ring k is dT_{p^k x} minus
 * dT_{p^{k-1} x}, so the confluent of x with each leaf of ring k is p^k x.
 * Leaf ranges are contiguous in depth-first order, so a ring is the two
 * slices of the ancestor's range flanking the previous one.
 * fn(k, ancestor, leaf_index).
 */
template <class Fn>
void for_each_ring(const Tree& t, VertexId x, Fn&& fn) {
  const std::span<const std::size_t> all = t.sector_leaf_indices(t.top());
  auto offset = [&](std::span<const std::size_t> s) { return static_cast<std::size_t>(s.data() - all.data()); };
  std::size_t lo = 0, hi = 0;
  int k = 0;
  for (std::optional<VertexId> a = x; a; a = t.parent(*a), ++k) {
    const std::span<const std::size_t> s = t.sector_leaf_indices(*a);
    const std::size_t nlo = offset(s), nhi = nlo + s.size();
    for (std::size_t p = nlo; p < nhi; ++p) {
      if (k > 0 && p >= lo && p < hi) continue;
      fn(k, *a, all[p]);
    }
    lo = nlo;
    hi = nhi;
  }
}

double decay_bound(double mx, double mc, double alpha) { return std::pow(mx, alpha) / std::pow(mc, alpha + 1.0); }

}  // namespace

Kernel::Kernel(std::size_t rows, std::size_t cols, std::vector<double> entries, double alpha)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), alpha_(alpha) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch, "kernel entry count does not equal rows*cols");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::InvalidArgument, "kernel alpha must be positive and finite");
  }
  for (double v : entries_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidFunction, "kernel entries must be finite");
  }
}

Kernel Kernel::zero(const Tree& t, double alpha) {
  return Kernel(t.vertex_count(), t.leaf_count(), std::vector<double>(t.vertex_count() * t.leaf_count(), 0.0),
                alpha);
}

KernelAudit audit_kernel(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, const Kernel& k,
                         double tol) {
  require_dims(t, nu, m);
  require_kernel_dims(t, k);
  KernelAudit out;
  out.alpha = k.alpha();
  std::vector<double> column_mass(t.leaf_count(), 0.0);
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    double integral = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < t.leaf_count(); ++i) {
      const double v = k(x, i);
      integral += v * nu[i];
      mass += std::abs(v) * nu[i];
      column_mass[i] += std::abs(v) * m[x];
    }
    if (std::abs(integral) > out.cancellation_max || out.cancellation_vertex == kNoVertex) {
      out.cancellation_max = std::abs(integral);
      out.cancellation_vertex = x;
    }
    out.cancellation_scale = std::max(out.cancellation_scale, mass);
    if (std::abs(integral) > tol * mass) out.cancellation_ok = false;

    for_each_ring(t, x, [&](int, VertexId conf, std::size_t i) {
      const double v = std::abs(k(x, i));
      if (v == 0.0) return;
      const double ratio = v / decay_bound(m[x], m[conf], k.alpha());
      if (ratio > out.a3_worst_ratio) {
        out.a3_worst_ratio = ratio;
        out.a3_vertex = x;
        out.a3_leaf = i;
      }
    });
  }
  out.a3_ok = out.a3_worst_ratio <= 1.0 + tol;
  for (std::size_t i = 0; i < column_mass.size(); ++i) {
    if (column_mass[i] > out.ck) {
      out.ck = column_mass[i];
      out.ck_leaf = i;
    }
  }
  return out;
}

TreeFunction apply_kernel(const Tree& t, const BoundaryMeasure& nu, const Kernel& k, const BoundaryFunction& b) {
  require_kernel_dims(t, k);
  if (nu.size() != t.leaf_count() || b.size() != t.leaf_count()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary data does not match the leaves");
  }
  std::vector<double> out(t.vertex_count(), 0.0);
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.leaf_count(); ++i) s += k(x, i) * b[i] * nu[i];
    out[x] = s;
  }
  return TreeFunction(std::move(out));
}

VertexMeasure carleson_density(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, const Kernel& k,
                               const BoundaryFunction& b) {
  require_dims(t, nu, m);
  const TreeFunction kb = apply_kernel(t, nu, k, b);
  std::vector<double> sigma(t.vertex_count());
  for (VertexId x = 0; x < sigma.size(); ++x) sigma[x] = std::abs(kb[x]) * m[x];
  return VertexMeasure(std::move(sigma));
}

double alpha_constant(double c1, double c2, double alpha) {
  if (!(c2 > 1.0)) throw Error(ErrorCode::RequiresLocallyDoubling, "c2 must exceed 1");
  const double x = std::pow(c2, -alpha);
  return c1 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
}

Theorem3Bound theorem3_bound(const Tree& t, const FlowMeasure& m, const KernelAudit& audit, double bmo) {
  const DoublingConstants dc = doubling_constants(t, m);
  if (!(dc.c2 > 1.0)) {
    throw Error(ErrorCode::RequiresLocallyDoubling, "flow is not locally doubling (c2 = " + std::to_string(dc.c2) + ")");
  }
  Theorem3Bound out;
  out.c1 = dc.c1;
  out.c2 = dc.c2;
  out.c_alpha = alpha_constant(dc.c1, dc.c2, audit.alpha);
  out.ck = audit.ck;
  out.bmo = bmo;
  out.value = bmo * (dc.c1 * audit.ck + out.c_alpha);
  return out;
}

Theorem3Verdict verify_bmo_to_carleson(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m,
                                       const Kernel& k, const BoundaryFunction& b) {
  if (!t.check_min_branching(2)) {
    throw Error(ErrorCode::RequiresBranching, "every internal vertex needs at least two children");
  }
  Theorem3Verdict out;
  out.audit = audit_kernel(t, nu, m, k);
  if (!out.audit.ok()) {
    throw Error(ErrorCode::KernelAuditFailed, out.audit.cancellation_ok ? "decay condition fails at vertex " +
                                                                              std::to_string(out.audit.a3_vertex)
                                                                        : "cancellation fails at vertex " +
                                                                              std::to_string(out.audit.cancellation_vertex));
  }
  out.bound = theorem3_bound(t, m, out.audit, bmo_norm(t, nu, b).value);
  const VertexMeasure sigma = carleson_density(t, nu, m, k, b);
  out.carleson = carleson_constant(t, nu, sigma);
  out.ratio = out.carleson.constant;
  out.witness = out.carleson.extremal_vertex;
  out.pass = out.ratio <= out.bound.value * (1.0 + kVerifySlack);
  return out;
}

Atom atom(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, VertexId y, const BoundaryFunction& b) {
  require_dims(t, nu, m);
  Atom out;
  out.y = y;
  const double mean = sector_mean(t, nu, b, y);
  const std::span<const std::size_t> sector = t.sector_leaf_indices(y);
  double sign_mass = 0.0, my = 0.0;
  for (std::size_t i : sector) {
    sign_mass += (b[i] >= mean ? 1.0 : -1.0) * nu[i];
    my += nu[i];
  }
  const double sign_mean = sign_mass / my;
  std::vector<double> a(t.leaf_count(), 0.0);
  for (std::size_t i : sector) {
    const double s = b[i] >= mean ? 1.0 : -1.0;
    a[i] = (s - sign_mean) / (2.0 * m[y]);
    out.pairing += a[i] * b[i] * nu[i];
    out.oscillation_mass += std::abs(b[i] - mean) * nu[i];
  }
  out.a = BoundaryFunction(std::move(a));
  return out;
}

Kernel atom_kernel(const Tree& t, const Atom& a) {
  Kernel k = Kernel::zero(t, 1.0);
  for (std::size_t i = 0; i < t.leaf_count(); ++i) k.at(a.y, i) = a.a[i];
  return k;
}

BmoFromCarleson bmo_from_carleson(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m,
                                  const BoundaryFunction& b) {
  BmoFromCarleson out;
  out.per_vertex.assign(t.vertex_count(), 0.0);
  for (VertexId y = 0; y < t.vertex_count(); ++y) out.per_vertex[y] = std::abs(atom(t, nu, m, y, b).pairing);
  out.vertex = extremal_vertex(t, out.per_vertex);
  out.value = out.per_vertex[out.vertex];
  return out;
}

Kernel decay_kernel(const Tree& t, const FlowMeasure& m, double alpha) {
  Kernel k = Kernel::zero(t, alpha);
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    for_each_ring(t, x, [&](int, VertexId conf, std::size_t i) { k.at(x, i) = decay_bound(m[x], m[conf], alpha); });
  }
  return k;
}

ExampleKernel example_kernel_delta(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, double alpha,
                                   double delta, std::optional<std::uint64_t> seed) {
  require_dims(t, nu, m);
  if (!t.check_min_branching(2)) {
    throw Error(ErrorCode::RequiresBranching, "every internal vertex needs at least two children");
  }
  if (t.height() < 2) throw Error(ErrorCode::InvalidArgument, "tree depth must be at least 2");
  if (!(alpha > 0.0) || !(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and delta must be positive");

  const DoublingConstants dc = doubling_constants(t, m);
  auto base = [&](double mx, double mc) {
    return decay_bound(mx, mc, alpha) * std::pow(std::min(1.0 / mc, mc), 1.0 + delta);
  };

  ExampleKernel out{Kernel::zero(t, alpha), {}, 0.0, 0.0, 0, -1, 0.0, 0.0};
  std::optional<Rng> rng;
  if (seed) rng.emplace(*seed);
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const int rings = t.height() - t.level(x) + 1;
    std::vector<double> d(rings, 0.0);
    std::vector<double> base_k(rings, 0.0);
    for (int k = 0; k < rings; ++k) base_k[k] = base(m[x], m[t.predecessor_n(x, k)]);
    for_each_ring(t, x, [&](int k, VertexId, std::size_t i) { d[k] += base_k[k] * nu[i]; });

    std::vector<int> nonzero;
    for (int k = 0; k < rings; ++k) {
      if (d[k] > 0.0) nonzero.push_back(k);
    }
    if (nonzero.size() < 2) {
      out.degenerate_rows.push_back(x);
      continue;
    }
    int i = 0, j = 0;
    if (rng) {
      const auto n = static_cast<std::int64_t>(nonzero.size());
      const auto a = rng->uniform_int(0, n - 1);
      auto bb = rng->uniform_int(0, n - 2);
      if (bb >= a) ++bb;
      i = nonzero[a];
      j = nonzero[bb];
      if (d[j] > d[i]) std::swap(i, j);
    } else {
      std::stable_sort(nonzero.begin(), nonzero.end(), [&](int a, int b) { return d[a] > d[b]; });
      i = nonzero[0];
      j = nonzero[1];
    }
    std::vector<double> c(rings, 0.0);
    c[i] = -d[j] / d[i];
    c[j] = 1.0;
    for_each_ring(t, x, [&](int k, VertexId, std::size_t leaf) { out.kernel.at(x, leaf) = c[k] * base_k[k]; });
  }

  const double xa = std::pow(dc.c2, -alpha);
  const double xd = std::pow(dc.c2, -(1.0 + delta));
  out.ck_bound = 2.0 / ((1.0 - xa) * (1.0 - xd));
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    const VertexId w = t.leaves()[i];
    double lower = 0.0, upper = 0.0;
    int k0 = -1;
    for (int k = 0; k <= t.height(); ++k) {
      const double mk = m[t.predecessor_n(w, k)];
      if (mk < 1.0) {
        lower += std::pow(mk, 1.0 + delta);
        k0 = k;
      } else {
        upper += std::pow(mk, -(1.0 + delta));
      }
    }
    const double bound = (lower + upper) / (1.0 - xa);
    if (bound > out.ck_bound_instance) {
      out.ck_bound_instance = bound;
      out.ck_bound_leaf = i;
      out.k0 = k0;
      out.lower_tail = lower;
      out.upper_tail = upper;
    }
  }
  return out;
}

Telescoping telescoping_jumps(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b) {
  Telescoping out;
  std::vector<double> means(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) means[x] = sector_mean(t, nu, b, x);
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const auto p = t.parent(x);
    if (!p) continue;
    const double jump = std::abs(means[*p] - means[x]);
    if (jump > out.max_jump || out.vertex == kNoVertex) {
      out.max_jump = jump;
      out.vertex = x;
    }
  }
  return out;
}

GeometricClaims geometric_claims(const Tree& t, const FlowMeasure& m, double alpha) {
  const DoublingConstants dc = doubling_constants(t, m);
  GeometricClaims out;
  out.c_alpha = alpha_constant(dc.c1, dc.c2, alpha);
  std::vector<double> powered(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) powered[x] = std::pow(m[x], 1.0 + alpha);
  const std::vector<double> subtree = subtree_sums(t, powered);
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    out.subtree_ratio = std::max(out.subtree_ratio, subtree[v] / powered[v]);
    double chain = 0.0;
    int k = 0;
    for (auto a = t.parent(v); a; a = t.parent(*a), ++k) chain += (k + 1) * std::pow(m[*a], -alpha);
    out.chain_ratio = std::max(out.chain_ratio, chain / std::pow(m[v], -alpha));
  }
  return out;
}

}  // namespace harmtree
