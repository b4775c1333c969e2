#include <doctest.h>

#include <cmath>

#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"
#include "support.hpp"

using namespace harmtree;
using harmtree::testing::binary_depth2;
using harmtree::testing::uniform_nu;

TEST_CASE("exponent parsing") {
  CHECK(Exponent::parse("2").value() == 2.0);
  CHECK(Exponent::parse("1.5").value() == 1.5);
  CHECK(Exponent::parse("inf").is_infinite());
  CHECK(Exponent(2.0).conjugate() == 2.0);
  CHECK(Exponent::infinity().conjugate() == 1.0);
  CHECK_THROWS_AS(Exponent(0.5), Error);
  CHECK_THROWS_AS(Exponent::parse("two"), Error);
  CHECK_THROWS_AS(Exponent::parse("2x"), Error);
}

TEST_CASE("lp norms") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  CHECK(lp_boundary(BoundaryFunction({1, 1, 0, 0}), nu, Exponent(2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lp_boundary(BoundaryFunction::constant(t, 0.0), nu, Exponent(3)) == 0.0);
  CHECK(lp_boundary(BoundaryFunction({4, 0, 0, 0}), nu, Exponent::infinity()) == 4.0);

  const FlowMeasure m = induce_flow(t, nu);
  const VertexMeasure sigma(std::vector<double>(m.weights().begin(), m.weights().end()));
  CHECK(lp_tree(TreeFunction::constant(t, 1.0), sigma, Exponent(1)) == 12.0);
  CHECK(lp_tree(TreeFunction::constant(t, 1.0), VertexMeasure(std::vector<double>(7, 0.0)), Exponent(2)) == 0.0);
  const TreeFunction f = poisson_extend(t, nu, BoundaryFunction({1, 1, 0, 0}));
  CHECK(lp_tree(f, sigma, Exponent(1)) == 6.0);
}

TEST_CASE("weak L1") {
  const Tree t = binary_depth2();
  std::vector<double> w(7, 0.0);
  w[2] = 1.5;
  std::vector<double> single(7, 0.0);
  single[2] = 3.0;
  CHECK(weak_l1_tree(TreeFunction(single), VertexMeasure(w)) == 4.5);
  CHECK(weak_l1_tree(TreeFunction::constant(t, 0.0), VertexMeasure(w)) == 0.0);

  // 2 on mass 1 and 1 on mass 2: max(2*1, 1*3) = 3.
  const TreeFunction two_level({2, 1, 1, 0, 0, 0, 0});
  const VertexMeasure sigma({1, 1, 1, 0, 0, 0, 0});
  CHECK(weak_l1_tree(two_level, sigma) == 3.0);
  CHECK(weak_l1_boundary(BoundaryFunction({2, 1, 1, 0}), uniform_nu(t)) == 3.0);
}

TEST_CASE("hardy norm") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const TreeFunction f = poisson_extend(t, nu, BoundaryFunction::indicator(t, 1));
  for (double p : {1.0, 2.0, 3.0}) {
    CHECK(std::pow(hardy_norm(t, m, f, Exponent(p)), p) == doctest::Approx(2.0));
    CHECK(hardy_norm(t, m, TreeFunction::constant(t, 1.0), Exponent(p)) == doctest::Approx(std::pow(4.0, 1.0 / p)));
  }
  CHECK(hardy_norm(t, m, TreeFunction::constant(t, 0.0), Exponent(2)) == 0.0);
  CHECK(hardy_norm(t, m, TreeFunction({-5, 0, 0, 0, 0, 0, 1}), Exponent::infinity()) == 5.0);
  CHECK_THROWS_AS(hardy_level_sums(t, m, f, Exponent::infinity()), Error);
}

TEST_CASE("sector means and BMO") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const BoundaryFunction b({1, 0, 0, 0});
  CHECK(sector_mean(t, nu, b, 1) == 0.5);
  CHECK(sector_mean(t, nu, b, 0) == 0.25);
  CHECK(sector_mean(t, nu, BoundaryFunction::constant(t, 7.0), 2) == 7.0);
  const BmoNorm n = bmo_norm(t, nu, b);
  CHECK(n.value == 0.5);
  CHECK(n.vertex == 1);
  CHECK(bmo_norm(t, nu, BoundaryFunction::constant(t, 3.0)).value == 0.0);

  const Tree c = harmtree::testing::cherry();
  CHECK(bmo_norm(c, uniform_nu(c), BoundaryFunction({1, -1})).value == 1.0);
}

TEST_CASE("norm properties on random instances") {
  Rng rng(23);
  for (const Instance& inst : harmtree::testing::corpus(30, 900, 6)) {
    const Tree& t = inst.tree;
    const FlowMeasure m = inst.flow();
    Rng srng(inst.tree.vertex_count());
    const VertexMeasure sigma = sample_vertex_measure(srng, t, m, SigmaLaw::Random);
    for (std::size_t trial = 0; trial < 3; ++trial) {
      const BoundaryFunction g = sample_boundary_function(rng, t, trial == 2 ? SampleLaw::Signed : SampleLaw::Uniform);
      const TreeFunction f = poisson_extend(t, inst.nu, g);
      CHECK(weak_l1_tree(f, sigma) <= lp_tree(f, sigma, Exponent(1)) * (1.0 + 1e-12));
      for (double p : {1.0, 2.0, 3.0}) {
        const auto sums = hardy_level_sums(t, m, f, Exponent(p));
        const double hp = std::pow(hardy_norm(t, m, f, Exponent(p)), p);
        const double lp = std::pow(lp_boundary(g, inst.nu, Exponent(p)), p);
        CHECK(sums[0] <= hp * (1.0 + 1e-12));
        CHECK(hp <= lp * (1.0 + 1e-12));
        CHECK(sums[0] == doctest::Approx(lp).epsilon(1e-12));
        CHECK(lp_boundary(recover_boundary(t, f), inst.nu, Exponent(p)) <=
              hardy_norm(t, m, f, Exponent(p)) * (1.0 + 1e-12));
      }
      const double base = bmo_norm(t, inst.nu, g).value;
      std::vector<double> shifted(g.values().begin(), g.values().end());
      for (double& v : shifted) v = -2.0 * v + 5.0;
      CHECK(bmo_norm(t, inst.nu, BoundaryFunction(shifted)).value == doctest::Approx(2.0 * base).epsilon(1e-12));
    }
  }
}
