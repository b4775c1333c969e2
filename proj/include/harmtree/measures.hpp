#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "harmtree/tree.hpp"

namespace harmtree {

/// Strictly positive weights nu on the leaves (indexed like Tree::leaves()).
class BoundaryMeasure {
 public:
  explicit BoundaryMeasure(std::vector<double> weights);

  std::span<const double> weights() const noexcept { return nu_; }
  double operator[](std::size_t i) const { return nu_[i]; }
  std::size_t size() const noexcept { return nu_.size(); }

 private:
  std::vector<double> nu_;
};

/// Strictly positive per-vertex weights. Conservation is not enforced here so
/// that arbitrary candidates can be audited with check_flow().
class FlowMeasure {
 public:
  explicit FlowMeasure(std::vector<double> weights);

  std::span<const double> weights() const noexcept { return m_; }
  double operator[](VertexId x) const { return m_[x]; }
  std::size_t size() const noexcept { return m_.size(); }

 private:
  std::vector<double> m_;
};

/// Nonnegative per-vertex weights (candidate Carleson measure).
class VertexMeasure {
 public:
  explicit VertexMeasure(std::vector<double> weights);

  std::span<const double> weights() const noexcept { return sigma_; }
  double operator[](VertexId x) const { return sigma_[x]; }
  std::size_t size() const noexcept { return sigma_.size(); }

 private:
  std::vector<double> sigma_;
};

/// m_nu(x) = nu(dT_x), accumulated bottom-up in one pass.
FlowMeasure induce_flow(const Tree& t, const BoundaryMeasure& nu);

/// Sums leaf-indexed values over every sector in the canonical bottom-up order
/// shared by induce_flow, so that equal inputs give bit-identical sums.
std::vector<double> sector_sums(const Tree& t, std::span<const double> leaf_values);

/// Sums vertex-indexed values over every sector T_x, bottom-up.
std::vector<double> subtree_sums(const Tree& t, std::span<const double> vertex_values);

struct FlowCheck {
  bool ok = true;
  VertexId worst_vertex = kNoVertex;  // kNoVertex when there are no internal vertices
  double worst_violation = 0.0;       // |m(x) - sum m(children)| / m(x)
};

FlowCheck check_flow(const Tree& t, const FlowMeasure& m, double rel_tol = 1e-12);

struct DoublingConstants {
  double c1 = 0.0;  // max m(x)/m(y) over parent/child pairs
  double c2 = 0.0;  // min of the same ratio
  /// Both constants exceed 1 (required by the BMO results).
  bool locally_doubling() const noexcept { return c2 > 1.0 && c1 > 1.0; }
};

DoublingConstants doubling_constants(const Tree& t, const FlowMeasure& m);

/// The metric ball of radius r at a leaf: dT of the ancestor at level floor(log r).
std::vector<VertexId> boundary_ball(const Tree& t, VertexId leaf, double r);

struct BoundaryDoubling {
  double ratio = 1.0;
  VertexId leaf = kNoVertex;
  int level = 0;  // floor(log r) of the extremal ball
};

/// max nu(B(w,2r)) / nu(B(w,r)) over all leaves and all radii whose balls fit
/// inside the truncation.
BoundaryDoubling boundary_doubling_ratio(const Tree& t, const BoundaryMeasure& nu);

}  // namespace harmtree
