#include <doctest.h>

#include <cmath>

#include "harmtree/carleson.hpp"
#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"
#include "support.hpp"

using namespace harmtree;
using harmtree::testing::as_sigma;
using harmtree::testing::binary_depth2;
using harmtree::testing::uniform_nu;

namespace {

VertexMeasure top_mass(const Tree& t, double mass) {
  std::vector<double> s(t.vertex_count(), 0.0);
  s[t.top()] = mass;
  return VertexMeasure(std::move(s));
}

}  // namespace

TEST_CASE("carleson constant on the binary tree") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const CarlesonReport r = carleson_constant(t, nu, as_sigma(m));
  CHECK(r.constant == 3.0);
  CHECK(r.extremal_vertex == 0);
  CHECK(r.per_vertex_ratios == std::vector<double>{3, 2, 2, 1, 1, 1, 1});

  CHECK(carleson_constant(t, nu, VertexMeasure(std::vector<double>(7, 0.0))).constant == 0.0);
  const CarlesonReport top = carleson_constant(t, nu, top_mass(t, 4.0));
  CHECK(top.constant == 1.0);
  CHECK(top.extremal_vertex == 0);
}

TEST_CASE("carleson ties go to the lowest level") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const CarlesonReport r = carleson_constant(t, nu, VertexMeasure({0, 0, 0, 1, 1, 1, 1}));
  CHECK(r.constant == 1.0);
  CHECK(r.extremal_vertex == 3);
}

TEST_CASE("indicator bounds") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const VertexMeasure sigma = as_sigma(induce_flow(t, nu));
  const IndicatorBound a = indicator_lower_bound(t, nu, sigma, Exponent(2), 1);
  CHECK(a.hp == 2.0);
  CHECK(a.lp == 5.0);
  CHECK(indicator_lower_bound(t, nu, sigma, Exponent(2), 4).hp == 1.0);
  CHECK(indicator_lower_bound(t, nu, VertexMeasure(std::vector<double>(7, 0.0)), Exponent(2), 1).lp == 0.0);
  CHECK_THROWS_AS(indicator_lower_bound(t, nu, sigma, Exponent::infinity(), 1), Error);
}

TEST_CASE("operator norm estimates") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const OpNormEstimate e = opnorm_poisson(t, nu, top_mass(t, 4.0), Exponent(2));
  CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.upper == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(e.lower <= e.upper);
  CHECK(poisson_ratio(t, nu, top_mass(t, 4.0), Exponent(2), e.witness) ==
        doctest::Approx(e.lower).epsilon(1e-9));

  const OpNormEstimate z = opnorm_poisson(t, nu, VertexMeasure(std::vector<double>(7, 0.0)), Exponent(3));
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  CHECK_THROWS_AS(opnorm_poisson(t, nu, top_mass(t, 1.0), Exponent(1)), Error);
  CHECK_THROWS_AS(opnorm_poisson(t, nu, top_mass(t, 1.0), Exponent::infinity()), Error);
  CHECK(marcinkiewicz_bound(3.0, Exponent(2)) == doctest::Approx(2.0 * std::sqrt(2.0) * std::sqrt(3.0)));
}

TEST_CASE("operator norm is reproducible and certified on random instances") {
  Rng rng(5);
  for (const Instance& inst : harmtree::testing::corpus(10, 40, 5)) {
    const Tree& t = inst.tree;
    const VertexMeasure sigma = sample_vertex_measure(rng, t, inst.flow(), SigmaLaw::Random);
    for (double p : {1.5, 3.0}) {
      OpNormConfig cfg;
      cfg.seed = 9;
      const OpNormEstimate a = opnorm_poisson(t, inst.nu, sigma, Exponent(p), cfg);
      const OpNormEstimate b = opnorm_poisson(t, inst.nu, sigma, Exponent(p), cfg);
      CHECK(a.lower == b.lower);
      CHECK(a.lower <= a.upper);
      CHECK(poisson_ratio(t, inst.nu, sigma, Exponent(p), a.witness) == doctest::Approx(a.lower).epsilon(1e-9));
      // Every indicator is a feasible probe.
      for (VertexId v = 0; v < t.vertex_count(); v += 3) {
        CHECK(poisson_ratio(t, inst.nu, sigma, Exponent(p), BoundaryFunction::indicator(t, v)) <=
              a.lower * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("weak (1,1) check") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const VertexMeasure sigma = as_sigma(induce_flow(t, nu));
  const double spike = weak_l1_tree(poisson_extend(t, nu, BoundaryFunction({4, 0, 0, 0})), sigma) / 4.0;
  CHECK(spike == 1.75);
  const Weak11Report r = weak11_check(t, nu, sigma, 20, 1);
  CHECK(r.ok);
  CHECK(r.carleson_constant == 3.0);
  CHECK(r.max_ratio <= 3.0);
  CHECK(r.max_ratio >= 3.0);  // g == 1 gives sigma(T)/nu(dT)
  CHECK(weak11_check(t, nu, VertexMeasure(std::vector<double>(7, 0.0)), 5, 1).max_ratio == 0.0);
}

TEST_CASE("equivalence verdicts") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const std::vector<Exponent> ps{Exponent(1.5), Exponent(2), Exponent(3)};
  const EquivalenceReport flow = verify_equivalence(t, nu, as_sigma(induce_flow(t, nu)), ps, 10, 3);
  CHECK(flow.pass);
  CHECK(flow.failures.empty());

  std::vector<double> deep(7, 0.0);
  deep[6] = 1e6;
  const EquivalenceReport spike = verify_equivalence(t, nu, VertexMeasure(deep), ps, 10, 3);
  CHECK(spike.pass);
  CHECK(spike.carleson.constant == 1e6);
  CHECK(spike.carleson.extremal_vertex == 6);

  const EquivalenceReport zero = verify_equivalence(t, nu, VertexMeasure(std::vector<double>(7, 0.0)), ps, 10, 3);
  CHECK(zero.pass);

  const std::vector<Exponent> bad{Exponent(1)};
  CHECK_THROWS_AS(verify_equivalence(t, nu, VertexMeasure(deep), bad, 2, 3), Error);
}

TEST_CASE("carleson constant is monotone and homogeneous") {
  Rng rng(77);
  for (const Instance& inst : harmtree::testing::corpus(20, 60, 6)) {
    const Tree& t = inst.tree;
    const VertexMeasure s = sample_vertex_measure(rng, t, inst.flow(), SigmaLaw::Random);
    std::vector<double> bigger(s.weights().begin(), s.weights().end());
    std::vector<double> scaled = bigger;
    for (double& v : bigger) v += rng.uniform01();
    for (double& v : scaled) v *= 4.0;
    const double c = carleson_constant(t, inst.nu, s).constant;
    CHECK(carleson_constant(t, inst.nu, VertexMeasure(bigger)).constant >= c);
    CHECK(carleson_constant(t, inst.nu, VertexMeasure(scaled)).constant == doctest::Approx(4.0 * c));
  }
}
