#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "harmtree/functions.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

/// Relative slack applied by the verifiers to every floating-point inequality.
inline constexpr double kVerifySlack = 1e-9;

struct CarlesonReport {
  double constant = 0.0;  // max_x sigma(T_x) / nu(dT_x)
  VertexId extremal_vertex = kNoVertex;
  std::vector<double> per_vertex_ratios;
  std::vector<double> subtree_mass;  // sigma(T_x)
};

CarlesonReport carleson_constant(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma);

struct IndicatorBound {
  double hp = 0.0;  // ||P chi_{dT_v}||_{H^p}^p, equal to m(v)
  double lp = 0.0;  // ||P chi_{dT_v}||_{L^p(sigma)}^p, at least sigma(T_v)
};

IndicatorBound indicator_lower_bound(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma,
                                     Exponent p, VertexId v);

/// 2 (p/(p-1))^{1/p} C^{1/p}: Marcinkiewicz interpolation between the weak
/// (1,1) constant C and the L^inf constant 1.
double marcinkiewicz_bound(double carleson_constant, Exponent p);

struct OpNormConfig {
  int max_iterations = 200;
  int restarts = 8;
  double tolerance = 1e-10;  // relative change of the quotient between sweeps
  std::uint64_t seed = 0;
};

struct OpNormEstimate {
  Exponent p{2.0};
  double lower = 0.0;  // ||P w||_{L^p(sigma)} / ||w||_{L^p(nu)} for the witness w
  double upper = 0.0;  // marcinkiewicz_bound(C)
  bool upper_finite = true;
  double carleson_constant = 0.0;
  BoundaryFunction witness{std::vector<double>{}};
  std::string witness_origin;  // "iteration", "restart", "indicator", ...
  int iterations = 0;          // total sweeps over all starts
  bool converged = true;       // false if some start hit max_iterations
};

/// Lower bound on the norm of P: L^p(nu) -> L^p(sigma), p in (1, inf), by
/// nonlinear power iteration on the nonnegative cone, random restarts and all
/// sector indicators; upper bound from marcinkiewicz_bound.
OpNormEstimate opnorm_poisson(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, Exponent p,
                              const OpNormConfig& cfg = {});

/// ||P w||_{L^p(sigma)} / ||w||_{L^p(nu)}, or 0 for w == 0.
double poisson_ratio(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, Exponent p,
                     const BoundaryFunction& w);

struct Weak11Report {
  double carleson_constant = 0.0;
  double max_ratio = 0.0;  // max over trials of ||Pg||_{L^{1,inf}(sigma)} / ||g||_{L^1(nu)}
  std::size_t worst_trial = 0;
  std::size_t trials = 0;
  bool ok = true;
};

/// Trial 0 is g == 1; later trials are seeded random nonnegative g.
Weak11Report weak11_check(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma, std::size_t trials,
                          std::uint64_t seed);

struct ExponentVerdict {
  Exponent p{2.0};
  OpNormEstimate opnorm;
  double strong_ratio_sup = 0.0;    // sup ||Pg||_{L^p(sigma)} / ||g||_{L^p(nu)} over probes
  double hardy_ratio_sup = 0.0;     // sup ||Pg||_{L^p(sigma)} / ||Pg||_{H^p} over probes
  std::string hardy_ratio_probe;    // which probe attained it
  double jensen_worst = 0.0;        // max ||Pg||_{H^p} / ||g||_{L^p(nu)}
  double converse_worst = 0.0;      // max sigma(T_v) / (hardy_ratio_sup^p m(v))
  VertexId converse_vertex = kNoVertex;
  bool strong_ok = true;    // opnorm lower and all probes within the upper bound
  bool hardy_ok = true;     // hardy ratio within the upper bound
  bool jensen_ok = true;
  bool converse_ok = true;  // sigma(T_v) <= hardy_ratio_sup^p m(v) for all v
};

struct EquivalenceReport {
  bool pass = true;
  CarlesonReport carleson;
  Weak11Report weak11;
  std::vector<ExponentVerdict> exponents;
  std::vector<std::string> failures;
};

/// Checks every direction of the Carleson / Poisson-boundedness / Hardy-space
/// equivalence with explicit constants, within kVerifySlack.
EquivalenceReport verify_equivalence(const Tree& t, const BoundaryMeasure& nu, const VertexMeasure& sigma,
                                     std::span<const Exponent> exponents, std::size_t trials, std::uint64_t seed,
                                     const OpNormConfig& cfg = {});

}  // namespace harmtree
