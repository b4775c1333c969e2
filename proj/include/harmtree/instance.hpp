#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harmtree/functions.hpp"
#include "harmtree/kernel_bmo.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

inline constexpr const char* kInstanceFormat = "harmtree-instance/1";

struct NamedFunction {
  enum class Domain { Leaves, Vertices };
  Domain domain = Domain::Leaves;
  std::vector<double> values;
};

/// A validated problem instance. Construct through Instance::make, which
/// checks every cross-reference and throws ValidationError naming the
/// violated invariant.
struct Instance {
  std::vector<std::optional<VertexId>> parents;
  Tree tree;
  BoundaryMeasure nu;
  std::optional<VertexMeasure> sigma;
  std::map<std::string, NamedFunction> functions;
  std::optional<Kernel> kernel;
  std::map<std::string, std::string> meta;  // free-form provenance, e.g. generator settings

  static Instance make(std::vector<std::optional<VertexId>> parents, std::vector<double> nu,
                       std::optional<std::vector<double>> sigma = std::nullopt,
                       std::map<std::string, NamedFunction> functions = {},
                       std::optional<Kernel> kernel = std::nullopt, std::map<std::string, std::string> meta = {});

  FlowMeasure flow() const { return induce_flow(tree, nu); }
  /// Leaf-domain function by name; throws InvalidArgument if missing or vertex-indexed.
  BoundaryFunction boundary_function(const std::string& name) const;
  TreeFunction tree_function(const std::string& name) const;
};

/// Parses instance JSON. Throws ParseError (with line/column or the offending
/// field path) or ValidationError.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);

/// Numbers are written in shortest round-trip form, so
/// serialize(parse(serialize(i))) reproduces the text byte for byte.
std::string serialize_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

struct GenSpec {
  enum class NuLaw { Uniform, LogUniform };
  int depth = 3;
  int branch_lo = 2;
  int branch_hi = 2;
  NuLaw nu_law = NuLaw::Uniform;
  double nu_lo = 0.1;  // log-uniform range
  double nu_hi = 10.0;
  std::uint64_t seed = 0;
};

/// Vertices are numbered breadth first from the top (id 0). Deterministic in
/// the seed. Throws InvalidArgument on an invalid spec.
Instance generate(const GenSpec& spec);

}  // namespace harmtree
