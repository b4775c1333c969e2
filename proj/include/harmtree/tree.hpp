#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace harmtree {

/// Index into a tree's vertex table.
using VertexId = std::size_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

/*
 * Finite truncation of a rooted tree whose root sits at a boundary point at
 * infinity. The top vertex is the highest retained vertex; every leaf sits at
 * level 0 and stands for a point of the boundary. Levels grow toward the top.
 *
 * Leaves are ordered by ascending vertex id; that order indexes every
 * boundary-valued array in the library. Children keep input order.
 *
 * Immutable after construction.
 */
class Tree {
 public:
  /// Validates a parent list (nullopt marks the top vertex) and computes levels.
  static Tree build_from_parents(std::span<const std::optional<VertexId>> parents);

  std::size_t vertex_count() const noexcept { return parent_.size(); }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }

  VertexId top() const noexcept { return top_; }
  int height() const noexcept { return level_[top_]; }

  std::optional<VertexId> parent(VertexId x) const;
  std::span<const VertexId> children(VertexId x) const;
  int level(VertexId x) const;
  bool is_leaf(VertexId x) const;

  std::span<const VertexId> leaves() const noexcept { return leaves_; }
  /// Position of a leaf in leaves(); throws NotALeaf for internal vertices.
  std::size_t leaf_index(VertexId leaf) const;

  /// Vertices at level k, ascending id.
  std::span<const VertexId> vertices_at_level(int k) const;

  /// Every vertex, children before parents (level 0 first). Bottom-up passes
  /// iterate this order so that sums are reproducible.
  std::span<const VertexId> bottom_up_order() const noexcept { return bottom_up_; }

  /// s_n(x): descendants exactly n levels below x, in depth-first order.
  std::vector<VertexId> successors_n(VertexId x, int n) const;
  /// p^n(x).
  VertexId predecessor_n(VertexId x, int n) const;
  /// Lowest common ancestor.
  VertexId confluent(VertexId a, VertexId b) const;
  /// 0 when a == b, otherwise e^{level(a ^ b)}.
  double gromov_distance(VertexId a, VertexId b) const;
  /// True when x lies below y (x == y included).
  bool is_below(VertexId x, VertexId y) const;

  /// T_x: x and all its descendants, ascending id.
  std::vector<VertexId> sector(VertexId x) const;
  /// dT_x: leaves below x, ascending id.
  std::vector<VertexId> boundary_sector(VertexId x) const;
  /// Leaf indices (positions in leaves()) below x, in depth-first order.
  std::span<const std::size_t> sector_leaf_indices(VertexId x) const;

  /// The ancestor of a leaf at level j.
  VertexId phi(VertexId leaf, int j) const;

  /// True iff every internal vertex has at least k children.
  bool check_min_branching(std::size_t k) const;

  std::size_t max_branching() const;

 private:
  Tree() = default;
  void check_vertex(VertexId x) const;

  std::vector<VertexId> parent_;  // kNoVertex at the top
  std::vector<std::vector<VertexId>> children_;
  std::vector<int> level_;
  std::vector<VertexId> leaves_;
  std::vector<std::size_t> leaf_pos_;  // kNoVertex for internal vertices
  std::vector<std::vector<VertexId>> by_level_;
  std::vector<VertexId> bottom_up_;
  VertexId top_ = 0;

  // Euler-tour entry/exit stamps for O(1) ancestry tests.
  std::vector<std::size_t> tin_, tout_;
  // Leaf indices in depth-first order; each sector covers a contiguous range.
  std::vector<std::size_t> dfs_leaves_;
  std::vector<std::pair<std::size_t, std::size_t>> leaf_range_;
};

}  // namespace harmtree
