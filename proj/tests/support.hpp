#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "harmtree/instance.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/tree.hpp"

namespace harmtree::testing {

inline std::string fixture_path(const std::string& name) { return std::string(HARMTREE_FIXTURE_DIR) + "/" + name; }

/// Depth-2 full binary tree: top 0, a = 1, b = 2, leaves 3..6.
inline Tree binary_depth2() {
  const std::vector<std::optional<VertexId>> parents{std::nullopt, 0, 0, 1, 1, 2, 2};
  return Tree::build_from_parents(parents);
}

inline Tree cherry() {
  const std::vector<std::optional<VertexId>> parents{std::nullopt, 0, 0};
  return Tree::build_from_parents(parents);
}

inline Tree full_tree(int depth, int branching) {
  GenSpec spec;
  spec.depth = depth;
  spec.branch_lo = spec.branch_hi = branching;
  return generate(spec).tree;
}

inline BoundaryMeasure uniform_nu(const Tree& t) { return BoundaryMeasure(std::vector<double>(t.leaf_count(), 1.0)); }

inline VertexMeasure as_sigma(const FlowMeasure& m) {
  return VertexMeasure(std::vector<double>(m.weights().begin(), m.weights().end()));
}

/// Seeded corpus: depth 1..max_depth, branching kept small enough that the
/// deepest trees stay at desk scale; alternates the two nu laws.
inline std::vector<Instance> corpus(std::size_t count, std::uint64_t seed, int max_depth = 8, int min_branching = 2) {
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    GenSpec spec;
    spec.depth = 1 + static_cast<int>(k % static_cast<std::size_t>(max_depth));
    spec.branch_lo = min_branching;
    spec.branch_hi = spec.depth <= 5 ? 4 : spec.depth <= 7 ? 3 : 2;
    spec.branch_hi = std::max(spec.branch_hi, spec.branch_lo);
    spec.nu_law = k % 2 == 0 ? GenSpec::NuLaw::Uniform : GenSpec::NuLaw::LogUniform;
    spec.seed = seed + k;
    out.push_back(generate(spec));
  }
  return out;
}

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace harmtree::testing
