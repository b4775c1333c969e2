#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "harmtree/carleson.hpp"
#include "harmtree/functions.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

/// Dense kernel K(x, w): one row per vertex, one column per leaf (leaves() order).
class Kernel {
 public:
  Kernel(std::size_t rows, std::size_t cols, std::vector<double> entries, double alpha);
  static Kernel zero(const Tree& t, double alpha);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double alpha() const noexcept { return alpha_; }
  double operator()(VertexId x, std::size_t leaf) const { return entries_[x * cols_ + leaf]; }
  double& at(VertexId x, std::size_t leaf) { return entries_[x * cols_ + leaf]; }
  std::span<const double> row(VertexId x) const { return std::span<const double>(entries_).subspan(x * cols_, cols_); }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> entries_;
  double alpha_;
};

struct KernelAudit {
  double alpha = 0.0;
  // (1) cancellation
  double cancellation_max = 0.0;    // max_x |sum_w K(x,w) nu(w)|
  double cancellation_scale = 0.0;  // max_x sum_w |K(x,w)| nu(w)
  VertexId cancellation_vertex = kNoVertex;
  bool cancellation_ok = true;
  // (2) integrability
  double ck = 0.0;  // max_w sum_x |K(x,w)| m(x)
  std::size_t ck_leaf = 0;
  // (3) decay
  bool a3_ok = true;
  double a3_worst_ratio = 0.0;  // max |K(x,w)| / (m(x)^a / m(x^w)^{a+1})
  VertexId a3_vertex = kNoVertex;
  std::size_t a3_leaf = 0;

  bool ok() const noexcept { return cancellation_ok && a3_ok; }
};

/// Audits the three defining conditions. Cancellation passes when
/// cancellation_max <= tol * cancellation_scale; decay passes when every
/// ratio is at most 1 + tol.
KernelAudit audit_kernel(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, const Kernel& k,
                         double tol = 1e-12);

/// (Kb)(x) = sum_w K(x,w) b(w) nu(w).
TreeFunction apply_kernel(const Tree& t, const BoundaryMeasure& nu, const Kernel& k, const BoundaryFunction& b);

/// sigma = |Kb| m.
VertexMeasure carleson_density(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, const Kernel& k,
                               const BoundaryFunction& b);

/// C_alpha = c1 * sum_{k>=0} (k+1) c2^{-k alpha} * 1/(1 - c2^{-alpha}) = c1 / (1 - c2^{-alpha})^3.
double alpha_constant(double c1, double c2, double alpha);

struct Theorem3Bound {
  double c1 = 0.0, c2 = 0.0;
  double c_alpha = 0.0;
  double ck = 0.0;
  double bmo = 0.0;
  double value = 0.0;  // bmo * (c1 * ck + c_alpha)
};

/// Throws RequiresLocallyDoubling when c2 <= 1.
Theorem3Bound theorem3_bound(const Tree& t, const FlowMeasure& m, const KernelAudit& audit, double bmo);

struct Theorem3Verdict {
  bool pass = true;
  KernelAudit audit;
  Theorem3Bound bound;
  CarlesonReport carleson;  // of sigma = |Kb| m
  double ratio = 0.0;       // max_v sigma(T_v)/m(v)
  VertexId witness = kNoVertex;
};

/// Requires a kernel passing audit_kernel (KernelAuditFailed) and a tree with
/// at least two children at every internal vertex (RequiresBranching).
Theorem3Verdict verify_bmo_to_carleson(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m,
                                       const Kernel& k, const BoundaryFunction& b);

struct Atom {
  VertexId y = kNoVertex;
  BoundaryFunction a{std::vector<double>{}};  // a_y, supported on dT_y
  double pairing = 0.0;                       // integral of a_y b dnu
  double oscillation_mass = 0.0;              // integral over dT_y of |b - b_{dT_y}|
};

/// a'_y = sign(b - b_{dT_y}) on dT_y (+1 on ties), a_y = (a'_y - mean a'_y) / (2 m(y)).
Atom atom(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, VertexId y, const BoundaryFunction& b);

/// Single-row kernel with K(y, .) = a_y and alpha = 1.
Kernel atom_kernel(const Tree& t, const Atom& a);

struct BmoFromCarleson {
  double value = 0.0;  // sup_y sigma_y(T_y) / m(y) = sup_y |integral of a_y b|
  VertexId vertex = kNoVertex;
  std::vector<double> per_vertex;
  double bmo_reconstructed() const noexcept { return 2.0 * value; }
};

BmoFromCarleson bmo_from_carleson(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m,
                                  const BoundaryFunction& b);

/// |K(x,w)| = m(x)^a / m(x^w)^{a+1}: satisfies the decay condition with
/// equality but neither cancellation nor a depth-independent C_K.
Kernel decay_kernel(const Tree& t, const FlowMeasure& m, double alpha);

struct ExampleKernel {
  Kernel kernel;
  std::vector<VertexId> degenerate_rows;  // rows left zero: fewer than two rings
  double ck_bound = 0.0;           // 2 / ((1 - c2^{-a}) (1 - c2^{-(1+d)}))
  double ck_bound_instance = 0.0;  // max over leaves of the split tail sums below
  std::size_t ck_bound_leaf = 0;
  int k0 = -1;             // largest level with m(Phi(w,k)) < 1 on that leaf, -1 if none
  double lower_tail = 0.0; // sum of m^{1+d} over ancestors with m < 1
  double upper_tail = 0.0; // sum of m^{-(1+d)} over ancestors with m >= 1
};

/// Kernel with |K(x,w)| <= m(x)^a/M^{a+1} min{1/M, M}^{1+d}, M = m(x^w), and
/// ring coefficients orthogonal to the ring profile of each row. Without a
/// seed the two largest ring weights are paired; with one, a random pair.
ExampleKernel example_kernel_delta(const Tree& t, const BoundaryMeasure& nu, const FlowMeasure& m, double alpha,
                                   double delta, std::optional<std::uint64_t> seed = std::nullopt);

struct Telescoping {
  double max_jump = 0.0;  // max_v |b_{dT_{p(v)}} - b_{dT_v}|
  VertexId vertex = kNoVertex;
};

Telescoping telescoping_jumps(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b);

struct GeometricClaims {
  double c_alpha = 0.0;
  double subtree_ratio = 0.0;  // max_v sum_{x in T_v} m(x)^{1+a} / m(v)^{1+a}
  double chain_ratio = 0.0;    // max_v sum_k (k+1) m(p^{k+1} v)^{-a} / m(v)^{-a}
  bool ok() const noexcept { return subtree_ratio <= c_alpha && chain_ratio <= c_alpha; }
};

GeometricClaims geometric_claims(const Tree& t, const FlowMeasure& m, double alpha);

}  // namespace harmtree
