#include "harmtree/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <ranges>

#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"

namespace harmtree {

namespace {

void require_dims(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma) {
  if (nu.size() != t.leaf_count()) throw Error(ErrorCode::DimensionMismatch, "nu does not match the leaves");
  if (sigma.size() != t.vertex_count()) throw Error(ErrorCode::DimensionMismatch, "sigma does not match the vertices");
}

void require_open_exponent(Exponent p) {
  if (p.is_infinite() || p.value() <= 1.0) {
    throw Error(ErrorCode::InvalidExponent, "exponent must lie in (1, inf), got " + p.to_string());
  }
}

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + kVerifySlack); }

// sum |v|^p and its p-th root.
double lp_sum(std::span<const double> v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return s;
}

/*
 * The operator P: L^p(nu) -> L^p(sigma) rewritten on unweighted l^p:
 *   B u = sigma^{1/p} * P(nu^{-1/p} u),   ||B||_{p->p} = ||P||.
 * B has a nonnegative kernel, so its norm is attained on the nonnegative cone
 * and the Boyd fixed-point map u <- psi_q(B^T psi_p(B u)) increases ||B u||_p.
 */
class WeightedPoisson {
 public:
  WeightedPoisson(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, double p)
      : t_(t), p_(p), q_(p / (p - 1.0)), m_(sector_sums(t, nu.weights())) {
    sigma_root_.resize(t.vertex_count());
    for (VertexId x = 0; x < t.vertex_count(); ++x) sigma_root_[x] = std::pow(sigma[x], 1.0 / p);
    nu_root_q_.resize(t.leaf_count());
    nu_root_mp_.resize(t.leaf_count());
    nu_.assign(nu.weights().begin(), nu.weights().end());
    for (std::size_t i = 0; i < t.leaf_count(); ++i) {
      nu_root_q_[i] = std::pow(nu[i], 1.0 / q_);
      nu_root_mp_[i] = std::pow(nu[i], -1.0 / p);
    }
  }

  std::vector<double> apply(std::span<const double> u) const {
    std::vector<double> weighted(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) weighted[i] = nu_root_mp_[i] * u[i] * nu_[i];
    std::vector<double> y = sector_sums(t_, weighted);
    for (VertexId x = 0; x < y.size(); ++x) y[x] = sigma_root_[x] * y[x] / m_[x];
    return y;
  }

  std::vector<double> apply_transpose(std::span<const double> w) const {
    std::vector<double> acc(t_.vertex_count(), 0.0);
    for (VertexId x : std::views::reverse(t_.bottom_up_order())) {
      const auto parent = t_.parent(x);
      acc[x] = (parent ? acc[*parent] : 0.0) + sigma_root_[x] * w[x] / m_[x];
    }
    std::vector<double> z(t_.leaf_count());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = nu_root_q_[i] * acc[t_.leaves()[i]];
    return z;
  }

  double norm(std::span<const double> v) const { return std::pow(lp_sum(v, p_), 1.0 / p_); }

  /// Boundary function represented by the unweighted vector u.
  BoundaryFunction to_function(std::span<const double> u) const {
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = nu_root_mp_[i] * u[i];
    return BoundaryFunction(std::move(g));
  }

  struct Run {
    double quotient = 0.0;
    std::vector<double> u;
    int sweeps = 0;
    bool converged = false;
  };

  Run iterate(std::vector<double> u, const OpNormConfig& cfg) const {
    Run run;
    const double n0 = norm(u);
    if (n0 == 0.0) return run;
    for (double& v : u) v /= n0;
    double previous = -1.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      ++run.sweeps;
      const std::vector<double> y = apply(u);
      const double quotient = norm(y);
      if (quotient >= run.quotient) {
        run.quotient = quotient;
        run.u = u;
      }
      if (quotient == 0.0 || (previous >= 0.0 && std::abs(quotient - previous) <= cfg.tolerance * quotient)) {
        run.converged = true;
        break;
      }
      previous = quotient;
      std::vector<double> w(y.size());
      for (std::size_t x = 0; x < y.size(); ++x) w[x] = std::pow(y[x], p_ - 1.0);
      std::vector<double> z = apply_transpose(w);
      for (double& v : z) v = std::pow(v, q_ - 1.0);
      const double nz = norm(z);
      if (nz == 0.0) {
        run.converged = true;
        break;
      }
      for (double& v : z) v /= nz;
      u = std::move(z);
    }
    return run;
  }

 private:
  const Tree& t_;
  double p_, q_;
  std::vector<double> m_;
  std::vector<double> nu_;
  std::vector<double> sigma_root_, nu_root_q_, nu_root_mp_;
};

}  // namespace

CarlesonReport carleson_constant(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma) {
  require_dims(t, nu, sigma);
  CarlesonReport out;
  out.subtree_mass = subtree_sums(t, sigma.weights());
  const std::vector<double> m = sector_sums(t, nu.weights());
  out.per_vertex_ratios.resize(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) out.per_vertex_ratios[x] = out.subtree_mass[x] / m[x];
  out.extremal_vertex = extremal_vertex(t, out.per_vertex_ratios);
  out.constant = out.per_vertex_ratios[out.extremal_vertex];
  return out;
}

IndicatorBound indicator_lower_bound(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma,
                                     Exponent p, VertexId v) {
  require_dims(t, nu, sigma);
  if (p.is_infinite()) throw Error(ErrorCode::InvalidExponent, "indicator bound needs a finite exponent");
  const TreeFunction f = poisson_extend(t, nu, BoundaryFunction::indicator(t, v));
  const FlowMeasure m = induce_flow(t, nu);
  const auto sums = hardy_level_sums(t, m, f, p);
  IndicatorBound out;
  out.hp = *std::max_element(sums.begin(), sums.end());
  for (VertexId x = 0; x < t.vertex_count(); ++x) out.lp += std::pow(std::abs(f[x]), p.value()) * sigma[x];
  return out;
}

double marcinkiewicz_bound(double carleson_constant, Exponent p) {
  require_open_exponent(p);
  const double pv = p.value();
  return 2.0 * std::pow(pv / (pv - 1.0), 1.0 / pv) * std::pow(carleson_constant, 1.0 / pv);
}

double poisson_ratio(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, Exponent p,
                     const BoundaryFunction& w) {
  const double denom = lp_boundary(w, nu, p);
  if (denom == 0.0) return 0.0;
  return lp_tree(poisson_extend(t, nu, w), sigma, p) / denom;
}

OpNormEstimate opnorm_poisson(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, Exponent p,
                              const OpNormConfig& cfg) {
  require_dims(t, nu, sigma);
  require_open_exponent(p);
  OpNormEstimate out;
  out.p = p;
  out.carleson_constant = carleson_constant(t, nu, sigma).constant;
  out.upper = marcinkiewicz_bound(out.carleson_constant, p);
  out.upper_finite = std::isfinite(out.upper);

  const std::size_t leaves = t.leaf_count();
  if (std::ranges::all_of(sigma.weights(), [](double s) { return s == 0.0; })) {
    out.witness = BoundaryFunction::constant(t, 1.0);
    out.witness_origin = "zero-measure";
    return out;
  }

  const WeightedPoisson op(t, nu, sigma, p.value());
  const double pv = p.value();

  // Indicator screening with the closed form
  //   ||P chi_v||^p = sigma(T_v) + sum_{k>=1} (m(v)/m(p^k v))^p sigma(p^k v).
  const std::vector<double> m = sector_sums(t, nu.weights());
  const std::vector<double> tree_mass = subtree_sums(t, sigma.weights());
  VertexId best_indicator = t.top();
  double best_indicator_score = -1.0;
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    double s = tree_mass[v];
    for (auto a = t.parent(v); a; a = t.parent(*a)) s += std::pow(m[v] / m[*a], pv) * sigma[*a];
    const double score = s / m[v];
    if (score > best_indicator_score) {
      best_indicator_score = score;
      best_indicator = v;
    }
  }

  std::vector<std::pair<std::vector<double>, std::string>> starts;
  starts.emplace_back(std::vector<double>(leaves, 1.0), "iteration");
  {
    std::vector<double> u(leaves, 1e-3);
    for (std::size_t i : t.sector_leaf_indices(best_indicator)) u[i] = 1.0;
    starts.emplace_back(std::move(u), "indicator-start");
  }
  Rng rng(cfg.seed);
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<double> u(leaves);
    for (double& v : u) v = 1.0 - rng.uniform01();  // (0, 1]
    starts.emplace_back(std::move(u), "restart");
  }

  WeightedPoisson::Run best;
  std::string best_origin;
  for (auto& [u0, origin] : starts) {
    WeightedPoisson::Run run = op.iterate(std::move(u0), cfg);
    out.iterations += run.sweeps;
    out.converged = out.converged && run.converged;
    if (run.quotient > best.quotient || best.u.empty()) {
      best = std::move(run);
      best_origin = origin;
    }
  }

  // Certify: the reported lower bound is the generic evaluation of P on the witness.
  BoundaryFunction iterate_witness = op.to_function(best.u);
  BoundaryFunction indicator_witness = BoundaryFunction::indicator(t, best_indicator);
  const double from_iteration = poisson_ratio(t, nu, sigma, p, iterate_witness);
  const double from_indicator = poisson_ratio(t, nu, sigma, p, indicator_witness);
  if (from_indicator > from_iteration) {
    out.lower = from_indicator;
    out.witness = std::move(indicator_witness);
    out.witness_origin = "indicator:" + std::to_string(best_indicator);
  } else {
    out.lower = from_iteration;
    out.witness = std::move(iterate_witness);
    out.witness_origin = best_origin;
  }
  return out;
}

Weak11Report weak11_check(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, std::size_t trials,
                          std::uint64_t seed) {
  require_dims(t, nu, sigma);
  Weak11Report out;
  out.carleson_constant = carleson_constant(t, nu, sigma).constant;
  out.trials = trials;
  Rng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const BoundaryFunction g =
        trial == 0 ? BoundaryFunction::constant(t, 1.0) : sample_boundary_function(rng, t, nonnegative_law(trial));
    const double l1 = lp_boundary(g, nu, Exponent(1.0));
    if (l1 == 0.0) continue;
    const double ratio = weak_l1_tree(poisson_extend(t, nu, g), sigma) / l1;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.worst_trial = trial;
    }
  }
  out.ok = within(out.max_ratio, out.carleson_constant);
  return out;
}

EquivalenceReport verify_equivalence(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma,
                                     std::span<const Exponent> exponents, std::size_t trials, std::uint64_t seed,
                                     const OpNormConfig& cfg) {
  require_dims(t, nu, sigma);
  for (Exponent p : exponents) require_open_exponent(p);

  EquivalenceReport out;
  out.carleson = carleson_constant(t, nu, sigma);
  out.weak11 = weak11_check(t, nu, sigma, trials, seed);
  if (!out.weak11.ok) out.failures.push_back("weak (1,1) ratio exceeds the Carleson constant");

  const FlowMeasure m = induce_flow(t, nu);
  for (Exponent p : exponents) {
    ExponentVerdict ev;
    ev.p = p;
    OpNormConfig c = cfg;
    c.seed = seed;
    ev.opnorm = opnorm_poisson(t, nu, sigma, p, c);
    out.exponents.push_back(std::move(ev));
  }

  auto record = [&](const BoundaryFunction& g, const std::string& label) {
    const TreeFunction f = poisson_extend(t, nu, g);
    for (ExponentVerdict& ev : out.exponents) {
      const double lp_nu = lp_boundary(g, nu, ev.p);
      if (lp_nu == 0.0) continue;
      const double lp_sigma = lp_tree(f, sigma, ev.p);
      const double hp = hardy_norm(t, m, f, ev.p);
      ev.strong_ratio_sup = std::max(ev.strong_ratio_sup, lp_sigma / lp_nu);
      ev.jensen_worst = std::max(ev.jensen_worst, hp / lp_nu);
      if (hp > 0.0 && (lp_sigma / hp > ev.hardy_ratio_sup || ev.hardy_ratio_probe.empty())) {
        ev.hardy_ratio_sup = std::max(ev.hardy_ratio_sup, lp_sigma / hp);
        ev.hardy_ratio_probe = label;
      }
    }
  };

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const SampleLaw law = trial % 4 == 3 ? SampleLaw::Signed : nonnegative_law(trial);
    record(sample_boundary_function(rng, t, law), "random:" + std::to_string(trial));
  }
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    record(BoundaryFunction::indicator(t, v), "indicator:" + std::to_string(v));
  }
  for (std::size_t k = 0; k < out.exponents.size(); ++k) {
    record(out.exponents[k].opnorm.witness, "opnorm-witness:p=" + out.exponents[k].p.to_string());
  }

  for (ExponentVerdict& ev : out.exponents) {
    const double upper = ev.opnorm.upper;
    const std::string tag = " (p=" + ev.p.to_string() + ")";
    ev.strong_ok = within(ev.opnorm.lower, upper) && within(ev.strong_ratio_sup, upper);
    if (!ev.strong_ok) out.failures.push_back("strong (p,p) ratio exceeds the interpolation bound" + tag);
    ev.hardy_ok = within(ev.hardy_ratio_sup, upper);
    if (!ev.hardy_ok) out.failures.push_back("L^p(sigma)/H^p ratio exceeds the interpolation bound" + tag);
    ev.jensen_ok = within(ev.jensen_worst, 1.0);
    if (!ev.jensen_ok) out.failures.push_back("H^p norm of a Poisson integral exceeds the L^p norm" + tag);

    const double kp = std::pow(ev.hardy_ratio_sup, ev.p.value());
    for (VertexId v = 0; v < t.vertex_count(); ++v) {
      const double mass = out.carleson.subtree_mass[v];
      const double allowed = kp * m[v];
      const double ratio = allowed > 0.0 ? mass / allowed : (mass > 0.0 ? HUGE_VAL : 0.0);
      if (ev.converse_vertex == kNoVertex || ratio > ev.converse_worst) {
        ev.converse_worst = ratio;
        ev.converse_vertex = v;
      }
      if (!within(mass, allowed)) ev.converse_ok = false;
    }
    if (!ev.converse_ok) out.failures.push_back("sigma(T_v) exceeds (measured constant)^p m(v)" + tag);
  }
  out.pass = out.failures.empty();
  return out;
}

}  // namespace harmtree
