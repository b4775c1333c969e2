#include <doctest.h>

#include "harmtree/error.hpp"
#include "harmtree/harmonic.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"
#include "support.hpp"

using namespace harmtree;
using harmtree::testing::binary_depth2;
using harmtree::testing::uniform_nu;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("laplacian and transition on the binary tree") {
  const Tree t = binary_depth2();
  const FlowMeasure m = induce_flow(t, uniform_nu(t));

  const TreeFunction c = TreeFunction::constant(t, 3.0);
  for (double v : vec(laplacian_apply(t, m, c).values())) CHECK(v == 0.0);
  CHECK(vec(transition_apply(t, m, c).values()) == vec(c.values()));

  const TreeFunction f({0.5, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0});
  CHECK(laplacian_apply(t, m, f)[0] == 0.0);

  const TreeFunction top({1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(laplacian_apply(t, m, top)[0] == 1.0);

  const TreeFunction chi_a({0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(transition_apply(t, m, chi_a)[0] == 0.5);

  for (VertexId x = 0; x < 3; ++x) {
    double s = 0.0;
    for (const auto& [y, p] : transition_row(t, m, x)) s += p;
    CHECK(s == doctest::Approx(1.0));
  }
  CHECK(transition_row(t, m, 4).empty());
  CHECK_THROWS_AS(laplacian_apply(t, m, TreeFunction({1.0})), Error);
}

TEST_CASE("poisson extension") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const TreeFunction f = poisson_extend(t, nu, BoundaryFunction({1, 1, 0, 0}));
  CHECK(vec(f.values()) == std::vector<double>{0.5, 1, 0, 1, 1, 0, 0});
  for (double v : vec(poisson_extend(t, nu, BoundaryFunction::constant(t, 1.0)).values())) CHECK(v == 1.0);
  for (double v : vec(poisson_extend(t, nu, BoundaryFunction::constant(t, 0.0)).values())) CHECK(v == 0.0);
  CHECK_THROWS_AS(BoundaryFunction({1.0, INFINITY}), Error);
}

TEST_CASE("harmonicity checks") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  CHECK(is_harmonic(t, m, poisson_extend(t, nu, BoundaryFunction({4, 0, 0, 0}))).ok);
  CHECK(is_harmonic(t, m, TreeFunction::constant(t, -2.0)).ok);
  const HarmonicCheck bad = is_harmonic(t, m, TreeFunction({1, 0, 0, 0, 0, 0, 0}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.worst_vertex == 0);
}

TEST_CASE("boundary recovery") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const BoundaryFunction g({0.25, -1.0, 3.0, 0.5});
  const TreeFunction f = poisson_extend(t, nu, g);
  CHECK(vec(recover_boundary(t, f).values()) == vec(g.values()));
  CHECK(vec(poisson_extend(t, nu, recover_boundary(t, f)).values()) == vec(f.values()));

  const TreeFunction not_harmonic({7.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0});
  const TreeFunction back = poisson_extend(t, nu, recover_boundary(t, not_harmonic));
  CHECK(back[0] != not_harmonic[0]);
  CHECK(is_harmonic(t, induce_flow(t, nu), not_harmonic).worst_vertex == 0);

  const TreeFunction c = TreeFunction::constant(t, 2.0);
  CHECK(vec(poisson_extend(t, nu, recover_boundary(t, c)).values()) == vec(c.values()));
}

TEST_CASE("maximal operators") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const BoundaryFunction spike({4, 0, 0, 0});
  CHECK(vec(hl_maximal(t, nu, spike).values()) == std::vector<double>{4, 2, 1, 1});
  CHECK(vec(radial_maximal(t, poisson_extend(t, nu, spike)).values()) == std::vector<double>{4, 2, 1, 1});
  CHECK(vec(hl_maximal(t, nu, BoundaryFunction({1, 1, 0, 0})).values()) == std::vector<double>{1, 1, 0.5, 0.5});
  for (double v : vec(hl_maximal(t, nu, BoundaryFunction::constant(t, 2.5)).values())) CHECK(v == 2.5);
  for (double v : vec(radial_maximal(t, TreeFunction::constant(t, -3.0)).values())) CHECK(v == 3.0);
  for (double v : vec(radial_maximal(t, TreeFunction({1, 0, 0, 0, 0, 0, 0})).values())) CHECK(v == 1.0);
}

TEST_CASE("mean value identity and maximal bounds on random instances") {
  Rng rng(17);
  for (const Instance& inst : harmtree::testing::corpus(30, 300, 6)) {
    const Tree& t = inst.tree;
    const FlowMeasure m = inst.flow();
    for (std::size_t trial = 0; trial < 3; ++trial) {
      const BoundaryFunction g = sample_boundary_function(rng, t, nonnegative_law(trial));
      const TreeFunction f = poisson_extend(t, inst.nu, g);
      if (t.vertex_count() <= 400) {
        for (VertexId x = 0; x < t.vertex_count(); ++x) {
          for (int n = 1; n <= t.level(x); ++n) {
            double s = 0.0;
            for (VertexId y : t.successors_n(x, n)) s += f[y] * m[y];
            CHECK(harmtree::testing::close_rel(s, f[x] * m[x], 1e-10));
          }
        }
      }
      // Boundedness of M on L^p with the interpolation constant.
      const BoundaryFunction mg = hl_maximal(t, inst.nu, g);
      for (double p : {1.5, 2.0, 3.0}) {
        const double ratio = lp_boundary(mg, inst.nu, Exponent(p)) / lp_boundary(g, inst.nu, Exponent(p));
        CHECK(ratio <= p / (p - 1.0) * std::pow(2.0, 1.0 / p));
      }
      CHECK(lp_tree(f, VertexMeasure(std::vector<double>(t.vertex_count(), 1.0)), Exponent::infinity()) <=
            lp_boundary(g, inst.nu, Exponent::infinity()));
    }
  }
}
