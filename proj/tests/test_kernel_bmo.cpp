#include <doctest.h>

#include <cmath>

#include "harmtree/error.hpp"
#include "harmtree/kernel_bmo.hpp"
#include "harmtree/norms.hpp"
#include "harmtree/random.hpp"
#include "harmtree/sampling.hpp"
#include "support.hpp"

using namespace harmtree;
using harmtree::testing::binary_depth2;
using harmtree::testing::full_tree;
using harmtree::testing::uniform_nu;

TEST_CASE("kernel validation") {
  CHECK_THROWS_AS(Kernel(2, 2, {1, 2, 3}, 1.0), Error);
  CHECK_THROWS_AS(Kernel(1, 1, {1}, 0.0), Error);
  CHECK_THROWS_AS(Kernel(1, 1, {NAN}, 1.0), Error);
}

TEST_CASE("zero kernel audit") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const KernelAudit a = audit_kernel(t, nu, m, Kernel::zero(t, 1.0));
  CHECK(a.ok());
  CHECK(a.ck == 0.0);
  CHECK(a.cancellation_max == 0.0);
  const Theorem3Verdict v = verify_bmo_to_carleson(t, nu, m, Kernel::zero(t, 1.0), BoundaryFunction({1, 0, 0, 0}));
  CHECK(v.pass);
  CHECK(v.ratio == 0.0);
  CHECK_THROWS_AS(audit_kernel(t, nu, m, Kernel(1, 1, {0.0}, 1.0)), Error);
}

TEST_CASE("pure decay kernel") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const Kernel k = decay_kernel(t, m, 1.0);
  // x = a, leaf 3 below a: m(a)/m(a)^2; leaf 5 outside: m(a)/m(top)^2.
  CHECK(k(1, 0) == 0.5);
  CHECK(k(1, 2) == 2.0 / 16.0);
  const KernelAudit a = audit_kernel(t, nu, m, k);
  CHECK(a.a3_ok);
  CHECK(a.a3_worst_ratio == 1.0);
  CHECK_FALSE(a.cancellation_ok);

  double previous = 0.0;
  for (int depth : {3, 5, 7}) {
    const Tree d = full_tree(depth, 2);
    const BoundaryMeasure dn = uniform_nu(d);
    const FlowMeasure dm = induce_flow(d, dn);
    const double ck = audit_kernel(d, dn, dm, decay_kernel(d, dm, 1.0)).ck;
    CHECK(ck > previous);
    CHECK(ck >= depth - 1);
    previous = ck;
  }
}

TEST_CASE("atom on the binary tree") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const BoundaryFunction b({1, 0, 0, 0});
  const Atom a = atom(t, nu, m, 1, b);
  CHECK(std::vector<double>(a.a.values().begin(), a.a.values().end()) == std::vector<double>{0.25, -0.25, 0, 0});
  CHECK(a.pairing == 0.25);
  CHECK(2.0 * m[1] * a.pairing == 1.0);
  CHECK(a.oscillation_mass == 1.0);

  const Kernel k = atom_kernel(t, a);
  const KernelAudit audit = audit_kernel(t, nu, m, k);
  CHECK(audit.ok());
  CHECK(audit.ck <= 1.0);
  const TreeFunction kb = apply_kernel(t, nu, k, b);
  CHECK(kb[1] == 0.25);
  CHECK(kb[0] == 0.0);
  const VertexMeasure sigma = carleson_density(t, nu, m, k, b);
  CHECK(sigma[1] == 0.5);
  CHECK(sigma[0] == 0.0);

  const Atom leaf = atom(t, nu, m, 4, b);
  for (double v : leaf.a.values()) CHECK(v == 0.0);
  CHECK(leaf.pairing == 0.0);
  CHECK(leaf.oscillation_mass == 0.0);

  const Atom flat = atom(t, nu, m, 2, b);
  CHECK(flat.pairing == 0.0);
  CHECK(flat.oscillation_mass == 0.0);
}

TEST_CASE("BMO reconstruction from atoms") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const BmoFromCarleson r = bmo_from_carleson(t, nu, m, BoundaryFunction({1, 0, 0, 0}));
  CHECK(r.value == 0.25);
  CHECK(r.vertex == 1);
  CHECK(r.bmo_reconstructed() == 0.5);
  CHECK(bmo_from_carleson(t, nu, m, BoundaryFunction::constant(t, 2.0)).value == 0.0);

  const Tree c = harmtree::testing::cherry();
  const BoundaryMeasure cn = uniform_nu(c);
  CHECK(bmo_from_carleson(c, cn, induce_flow(c, cn), BoundaryFunction({1, -1})).bmo_reconstructed() == 1.0);
}

TEST_CASE("alpha constant and the forward bound") {
  CHECK(alpha_constant(2.0, 2.0, 1.0) == 16.0);
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  KernelAudit audit;
  audit.alpha = 1.0;
  audit.ck = 1.0;
  CHECK(theorem3_bound(t, m, audit, 1.0).value == 18.0);
  CHECK(theorem3_bound(t, m, audit, 0.0).value == 0.0);
  audit.ck = 0.0;
  audit.alpha = 40.0;
  CHECK(std::isfinite(theorem3_bound(t, m, audit, 1.0).value));

  const std::vector<std::optional<VertexId>> chain{std::nullopt, 0, 1};
  const Tree ch = Tree::build_from_parents(chain);
  const FlowMeasure chm = induce_flow(ch, BoundaryMeasure({1.0}));
  try {
    theorem3_bound(ch, chm, audit, 1.0);
    FAIL("expected RequiresLocallyDoubling");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RequiresLocallyDoubling);
  }
}

TEST_CASE("verify_bmo_to_carleson preconditions") {
  const Tree t = binary_depth2();
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  try {
    verify_bmo_to_carleson(t, nu, m, decay_kernel(t, m, 1.0), BoundaryFunction({1, 0, 0, 0}));
    FAIL("expected KernelAuditFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KernelAuditFailed);
  }
  const std::vector<std::optional<VertexId>> chain{std::nullopt, 0, 1};
  const Tree ch = Tree::build_from_parents(chain);
  const BoundaryMeasure cn({1.0});
  try {
    verify_bmo_to_carleson(ch, cn, induce_flow(ch, cn), Kernel::zero(ch, 1.0), BoundaryFunction({1.0}));
    FAIL("expected RequiresBranching");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RequiresBranching);
  }
}

TEST_CASE("example kernel construction") {
  const Tree t = full_tree(4, 2);
  const BoundaryMeasure nu = uniform_nu(t);
  const FlowMeasure m = induce_flow(t, nu);
  const ExampleKernel ek = example_kernel_delta(t, nu, m, 1.0, 0.5);
  CHECK(ek.degenerate_rows == std::vector<VertexId>{t.top()});
  for (double v : ek.kernel.row(t.top())) CHECK(v == 0.0);
  const KernelAudit a = audit_kernel(t, nu, m, ek.kernel);
  CHECK(a.ok());
  CHECK(a.ck <= ek.ck_bound_instance);
  CHECK(ek.ck_bound_instance <= ek.ck_bound);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ExampleKernel s = example_kernel_delta(t, nu, m, 1.0, 0.5, seed);
    const KernelAudit sa = audit_kernel(t, nu, m, s.kernel);
    CHECK(sa.ok());
    CHECK(sa.ck <= s.ck_bound_instance);
    // Row coefficients: sup norm one on the profile.
    for (VertexId x = 0; x < t.vertex_count(); ++x) {
      if (x == t.top()) continue;
      double worst = 0.0;
      for (std::size_t i = 0; i < t.leaf_count(); ++i) {
        const VertexId conf = t.confluent(x, t.leaves()[i]);
        const double mc = m[conf];
        const double base = m[x] / (mc * mc) * std::pow(std::min(1.0 / mc, mc), 1.5);
        worst = std::max(worst, std::abs(s.kernel(x, i)) / base);
      }
      CHECK(worst == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(example_kernel_delta(binary_depth2(), uniform_nu(binary_depth2()),
                                       induce_flow(binary_depth2(), uniform_nu(binary_depth2())), 1.0, 0.0),
                  Error);
  const Tree shallow = harmtree::testing::cherry();
  CHECK_THROWS_AS(example_kernel_delta(shallow, uniform_nu(shallow), induce_flow(shallow, uniform_nu(shallow)), 1.0,
                                       0.5),
                  Error);
}

TEST_CASE("telescoping and geometric claims on random instances") {
  Rng rng(8);
  for (const Instance& inst : harmtree::testing::corpus(20, 500, 6)) {
    const Tree& t = inst.tree;
    const FlowMeasure m = inst.flow();
    const DoublingConstants dc = doubling_constants(t, m);
    for (std::size_t trial = 0; trial < 4; ++trial) {
      const BoundaryFunction b = sample_real_function(rng, t, trial);
      const double bmo = bmo_norm(t, inst.nu, b).value;
      CHECK(telescoping_jumps(t, inst.nu, b).max_jump <= dc.c1 * bmo * (1.0 + 1e-12));
    }
    for (double alpha : {0.5, 1.0, 2.0}) CHECK(geometric_claims(t, m, alpha).ok());
  }
}
