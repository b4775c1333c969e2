#include "harmtree/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"

namespace harmtree {

Exponent::Exponent(double p) : p_(p) {
  if (std::isnan(p) || p < 1.0) throw Error(ErrorCode::InvalidExponent, "exponent must be >= 1");
}

Exponent Exponent::infinity() { return Exponent(std::numeric_limits<double>::infinity()); }

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidExponent, "cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw Error(ErrorCode::InvalidExponent, "cannot parse exponent '" + text + "'");
  return Exponent(p);
}

bool Exponent::is_infinite() const noexcept { return std::isinf(p_); }

double Exponent::conjugate() const noexcept {
  if (is_infinite()) return 1.0;
  if (p_ == 1.0) return std::numeric_limits<double>::infinity();
  return p_ / (p_ - 1.0);
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p_);
  return buf;
}

namespace {

double lp_weighted(std::span<const double> f, std::span<const double> w, Exponent p) {
  if (f.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "function and measure have different lengths");
  }
  if (p.is_infinite()) {
    double best = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (w[i] > 0.0) best = std::max(best, std::abs(f[i]));
    }
    return best;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p.value()) * w[i];
  return p.value() == 1.0 ? s : std::pow(s, 1.0 / p.value());
}

double weak_l1_weighted(std::span<const double> f, std::span<const double> w) {
  if (f.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "function and measure have different lengths");
  }
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(f[a]) > std::abs(f[b]); });
  double best = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = std::abs(f[order[k]]);
    if (v == 0.0) break;
    mass += w[order[k]];
    // Evaluate once all points with |f| >= v are counted.
    if (k + 1 == order.size() || std::abs(f[order[k + 1]]) < v) best = std::max(best, v * mass);
  }
  return best;
}

}  // namespace

double lp_boundary(const BoundaryFunction& g, const BoundaryMeasure& nu, Exponent p) {
  return lp_weighted(g.values(), nu.weights(), p);
}

double lp_tree(const TreeFunction& f, const VertexMeasure& sigma, Exponent p) {
  return lp_weighted(f.values(), sigma.weights(), p);
}

double weak_l1_tree(const TreeFunction& f, const VertexMeasure& sigma) {
  return weak_l1_weighted(f.values(), sigma.weights());
}

double weak_l1_boundary(const BoundaryFunction& g, const BoundaryMeasure& nu) {
  return weak_l1_weighted(g.values(), nu.weights());
}

std::vector<double> hardy_level_sums(const Tree& t, const FlowMeasure& m, const TreeFunction& f, Exponent p) {
  if (p.is_infinite()) throw Error(ErrorCode::InvalidExponent, "level sums need a finite exponent");
  if (m.size() != t.vertex_count() || f.size() != t.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "function or flow does not match the tree");
  }
  std::vector<double> sums;
  for (int k = 0; k <= t.height(); ++k) {
    double s = 0.0;
    for (VertexId x : t.vertices_at_level(k)) s += std::pow(std::abs(f[x]), p.value()) * m[x];
    sums.push_back(s);
  }
  return sums;
}

double hardy_norm(const Tree& t, const FlowMeasure& m, const TreeFunction& f, Exponent p) {
  if (p.is_infinite()) {
    if (f.size() != t.vertex_count()) throw Error(ErrorCode::DimensionMismatch, "function does not match the tree");
    double best = 0.0;
    for (double v : f.values()) best = std::max(best, std::abs(v));
    return best;
  }
  const auto sums = hardy_level_sums(t, m, f, p);
  const double top = *std::max_element(sums.begin(), sums.end());
  return p.value() == 1.0 ? top : std::pow(top, 1.0 / p.value());
}

double sector_mean(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b, VertexId x) {
  if (nu.size() != t.leaf_count() || b.size() != t.leaf_count()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary data does not match the tree");
  }
  if (t.is_leaf(x)) return b[t.leaf_index(x)];
  double mass = 0.0, integral = 0.0;
  for (std::size_t i : t.sector_leaf_indices(x)) {
    mass += nu[i];
    integral += b[i] * nu[i];
  }
  return integral / mass;
}

double sector_oscillation(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b, VertexId x) {
  const double mean = sector_mean(t, nu, b, x);
  double mass = 0.0, dev = 0.0;
  for (std::size_t i : t.sector_leaf_indices(x)) {
    mass += nu[i];
    dev += std::abs(b[i] - mean) * nu[i];
  }
  return dev / mass;
}

VertexId extremal_vertex(const Tree& t, const std::vector<double>& values) {
  VertexId best = kNoVertex;
  // bottom_up_order lists vertices by level, then id: the first strict
  // maximum seen is the tie-break winner.
  for (VertexId x : t.bottom_up_order()) {
    if (best == kNoVertex || values[x] > values[best]) best = x;
  }
  return best;
}

BmoNorm bmo_norm(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b) {
  const TreeFunction means = poisson_extend(t, nu, b);
  const FlowMeasure m = induce_flow(t, nu);
  std::vector<double> dev(t.vertex_count(), 0.0);
  // Each leaf contributes |b(w) - mean_x| nu(w) to every ancestor x.
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    VertexId x = t.leaves()[i];
    for (;;) {
      dev[x] += std::abs(b[i] - means[x]) * nu[i];
      const auto p = t.parent(x);
      if (!p) break;
      x = *p;
    }
  }
  BmoNorm out;
  out.oscillations.resize(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) out.oscillations[x] = dev[x] / m[x];
  out.vertex = extremal_vertex(t, out.oscillations);
  out.value = out.oscillations[out.vertex];
  return out;
}

}  // namespace harmtree
