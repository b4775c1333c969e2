#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "harmtree/tree.hpp"

namespace harmtree {

/// Finite real values on every vertex.
class TreeFunction {
 public:
  explicit TreeFunction(std::vector<double> values);
  static TreeFunction constant(const Tree& t, double c);

  std::span<const double> values() const noexcept { return v_; }
  double operator[](VertexId x) const { return v_[x]; }
  std::size_t size() const noexcept { return v_.size(); }

 private:
  std::vector<double> v_;
};

/// Finite real values on the leaves, indexed like Tree::leaves().
class BoundaryFunction {
 public:
  explicit BoundaryFunction(std::vector<double> values);
  static BoundaryFunction constant(const Tree& t, double c);
  /// chi of dT_v.
  static BoundaryFunction indicator(const Tree& t, VertexId v);

  std::span<const double> values() const noexcept { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const noexcept { return v_.size(); }

 private:
  std::vector<double> v_;
};

}  // namespace harmtree
