#include "harmtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harmtree/error.hpp"

namespace harmtree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MixedLeafLevels: return "MixedLeafLevels";
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::NotALeaf: return "NotALeaf";
    case ErrorCode::LevelUnderflow: return "LevelUnderflow";
    case ErrorCode::LevelOverflow: return "LevelOverflow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::InvalidFunction: return "InvalidFunction";
    case ErrorCode::NoInternalVertices: return "NoInternalVertices";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::RequiresLocallyDoubling: return "RequiresLocallyDoubling";
    case ErrorCode::RequiresBranching: return "RequiresBranching";
    case ErrorCode::KernelAuditFailed: return "KernelAuditFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Tree Tree::build_from_parents(std::span<const std::optional<VertexId>> parents) {
  const std::size_t n = parents.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "parent list is empty");

  Tree t;
  t.parent_.assign(n, kNoVertex);
  t.children_.assign(n, {});

  std::optional<VertexId> root;
  for (VertexId x = 0; x < n; ++x) {
    if (!parents[x]) {
      if (root) {
        throw Error(ErrorCode::MultipleRoots, "vertices " + std::to_string(*root) + " and " +
                                                  std::to_string(x) + " both have no parent");
      }
      root = x;
      continue;
    }
    const VertexId p = *parents[x];
    if (p >= n) {
      throw Error(ErrorCode::InvalidVertex,
                  "parent of vertex " + std::to_string(x) + " is out of range");
    }
    if (p == x) throw Error(ErrorCode::CycleDetected, "vertex " + std::to_string(x) + " is its own parent");
    t.parent_[x] = p;
    t.children_[p].push_back(x);
  }
  // With no parentless vertex, following parent links must loop.
  if (!root) throw Error(ErrorCode::CycleDetected, "no vertex without parent");
  t.top_ = *root;

  // Iterative depth-first walk from the top: depths, Euler stamps, leaf order.
  std::vector<int> depth(n, -1);
  t.tin_.assign(n, 0);
  t.tout_.assign(n, 0);
  std::vector<VertexId> dfs_leaf_vertices;
  std::size_t clock = 0, visited = 0;
  std::vector<std::pair<VertexId, std::size_t>> stack{{t.top_, 0}};
  depth[t.top_] = 0;
  t.tin_[t.top_] = clock++;
  ++visited;
  while (!stack.empty()) {
    auto& [x, next] = stack.back();
    if (next < t.children_[x].size()) {
      const VertexId c = t.children_[x][next++];
      depth[c] = depth[x] + 1;
      t.tin_[c] = clock++;
      ++visited;
      stack.emplace_back(c, 0);
    } else {
      if (t.children_[x].empty()) dfs_leaf_vertices.push_back(x);
      t.tout_[x] = clock++;
      stack.pop_back();
    }
  }
  if (visited != n) {
    throw Error(ErrorCode::CycleDetected,
                std::to_string(n - visited) + " vertices are not reachable from the top");
  }

  int leaf_depth = -1;
  for (VertexId x = 0; x < n; ++x) {
    if (!t.children_[x].empty()) continue;
    if (leaf_depth < 0) {
      leaf_depth = depth[x];
    } else if (depth[x] != leaf_depth) {
      throw Error(ErrorCode::MixedLeafLevels,
                  "leaf " + std::to_string(x) + " sits at depth " + std::to_string(depth[x]) +
                      ", expected " + std::to_string(leaf_depth));
    }
    t.leaves_.push_back(x);
  }

  t.level_.resize(n);
  for (VertexId x = 0; x < n; ++x) t.level_[x] = leaf_depth - depth[x];

  t.leaf_pos_.assign(n, kNoVertex);
  for (std::size_t i = 0; i < t.leaves_.size(); ++i) t.leaf_pos_[t.leaves_[i]] = i;

  t.by_level_.assign(static_cast<std::size_t>(leaf_depth) + 1, {});
  for (VertexId x = 0; x < n; ++x) t.by_level_[t.level_[x]].push_back(x);
  for (const auto& slice : t.by_level_) t.bottom_up_.insert(t.bottom_up_.end(), slice.begin(), slice.end());

  // Leaves in depth-first order; sector ranges follow from the Euler stamps.
  for (VertexId leaf : dfs_leaf_vertices) t.dfs_leaves_.push_back(t.leaf_pos_[leaf]);
  t.leaf_range_.assign(n, {0, 0});
  for (std::size_t i = 0; i < dfs_leaf_vertices.size(); ++i) {
    const VertexId leaf = dfs_leaf_vertices[i];
    t.leaf_range_[leaf] = {i, i + 1};
  }
  for (VertexId x : t.bottom_up_) {
    if (t.children_[x].empty()) continue;
    const auto& ch = t.children_[x];
    t.leaf_range_[x] = {t.leaf_range_[ch.front()].first, t.leaf_range_[ch.back()].second};
  }
  return t;
}

void Tree::check_vertex(VertexId x) const {
  if (x >= parent_.size()) {
    throw Error(ErrorCode::InvalidVertex, "vertex " + std::to_string(x) + " is out of range");
  }
}

std::optional<VertexId> Tree::parent(VertexId x) const {
  check_vertex(x);
  if (parent_[x] == kNoVertex) return std::nullopt;
  return parent_[x];
}

std::span<const VertexId> Tree::children(VertexId x) const {
  check_vertex(x);
  return children_[x];
}

int Tree::level(VertexId x) const {
  check_vertex(x);
  return level_[x];
}

bool Tree::is_leaf(VertexId x) const {
  check_vertex(x);
  return children_[x].empty();
}

std::size_t Tree::leaf_index(VertexId leaf) const {
  check_vertex(leaf);
  if (leaf_pos_[leaf] == kNoVertex) {
    throw Error(ErrorCode::NotALeaf, "vertex " + std::to_string(leaf) + " is not a leaf");
  }
  return leaf_pos_[leaf];
}

std::span<const VertexId> Tree::vertices_at_level(int k) const {
  if (k < 0) throw Error(ErrorCode::LevelUnderflow, "level " + std::to_string(k) + " is negative");
  if (k > height()) throw Error(ErrorCode::LevelOverflow, "level " + std::to_string(k) + " is above the top");
  return by_level_[static_cast<std::size_t>(k)];
}

std::vector<VertexId> Tree::successors_n(VertexId x, int n) const {
  check_vertex(x);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative generation");
  if (n > level_[x]) {
    throw Error(ErrorCode::LevelUnderflow, "vertex " + std::to_string(x) + " at level " +
                                               std::to_string(level_[x]) + " has no generation " +
                                               std::to_string(n));
  }
  std::vector<VertexId> current{x};
  for (int step = 0; step < n; ++step) {
    std::vector<VertexId> next;
    for (VertexId y : current) next.insert(next.end(), children_[y].begin(), children_[y].end());
    current = std::move(next);
  }
  return current;
}

VertexId Tree::predecessor_n(VertexId x, int n) const {
  check_vertex(x);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative generation");
  if (level_[x] + n > height()) {
    throw Error(ErrorCode::LevelOverflow, "ancestor " + std::to_string(n) + " levels above vertex " +
                                              std::to_string(x) + " is beyond the top");
  }
  for (int step = 0; step < n; ++step) x = parent_[x];
  return x;
}

bool Tree::is_below(VertexId x, VertexId y) const {
  check_vertex(x);
  check_vertex(y);
  return tin_[y] <= tin_[x] && tout_[x] <= tout_[y];
}

VertexId Tree::confluent(VertexId a, VertexId b) const {
  check_vertex(a);
  check_vertex(b);
  while (level_[a] < level_[b]) a = parent_[a];
  while (level_[b] < level_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

double Tree::gromov_distance(VertexId a, VertexId b) const {
  if (a == b) {
    check_vertex(a);
    return 0.0;
  }
  return std::exp(static_cast<double>(level_[confluent(a, b)]));
}

std::vector<VertexId> Tree::sector(VertexId x) const {
  check_vertex(x);
  std::vector<VertexId> out;
  std::vector<VertexId> stack{x};
  while (!stack.empty()) {
    const VertexId y = stack.back();
    stack.pop_back();
    out.push_back(y);
    stack.insert(stack.end(), children_[y].begin(), children_[y].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::span<const std::size_t> Tree::sector_leaf_indices(VertexId x) const {
  check_vertex(x);
  const auto [lo, hi] = leaf_range_[x];
  return std::span<const std::size_t>(dfs_leaves_).subspan(lo, hi - lo);
}

std::vector<VertexId> Tree::boundary_sector(VertexId x) const {
  std::vector<VertexId> out;
  for (std::size_t i : sector_leaf_indices(x)) out.push_back(leaves_[i]);
  std::sort(out.begin(), out.end());
  return out;
}

VertexId Tree::phi(VertexId leaf, int j) const {
  leaf_index(leaf);
  if (j < 0) throw Error(ErrorCode::LevelUnderflow, "level " + std::to_string(j) + " is below the leaves");
  return predecessor_n(leaf, j);
}

bool Tree::check_min_branching(std::size_t k) const {
  return std::all_of(children_.begin(), children_.end(),
                     [k](const auto& ch) { return ch.empty() || ch.size() >= k; });
}

std::size_t Tree::max_branching() const {
  std::size_t best = 0;
  for (const auto& ch : children_) best = std::max(best, ch.size());
  return best;
}

}  // namespace harmtree
