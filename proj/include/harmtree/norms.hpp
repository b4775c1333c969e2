#pragma once

#include <string>
#include <vector>

#include "harmtree/functions.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

/// Lebesgue exponent p in [1, inf].
class Exponent {
 public:
  explicit Exponent(double p);
  static Exponent infinity();
  /// Parses "2", "1.5", "inf".
  static Exponent parse(const std::string& text);

  double value() const noexcept { return p_; }
  bool is_infinite() const noexcept;
  /// q = p/(p-1); infinite for p = 1, 1 for p = inf.
  double conjugate() const noexcept;
  std::string to_string() const;

 private:
  double p_;
};

double lp_boundary(const BoundaryFunction& g, const BoundaryMeasure& nu, Exponent p);
double lp_tree(const TreeFunction& f, const VertexMeasure& sigma, Exponent p);

/// sup over lambda > 0 of lambda * sigma({|f| > lambda}). The sup is approached
/// as lambda rises to each distinct value v of |f|, where the level set is
/// {|f| >= v}; those finitely many breakpoints are evaluated exactly.
double weak_l1_tree(const TreeFunction& f, const VertexMeasure& sigma);
/// Same on the boundary with nu.
double weak_l1_boundary(const BoundaryFunction& g, const BoundaryMeasure& nu);

/// Per-level sums  sum_{level(x)=k} |f(x)|^p m(x), k = 0..height. p finite.
std::vector<double> hardy_level_sums(const Tree& t, const FlowMeasure& m, const TreeFunction& f, Exponent p);

/// max_k (level sum)^{1/p}; for p = inf, max |f| over all vertices.
double hardy_norm(const Tree& t, const FlowMeasure& m, const TreeFunction& f, Exponent p);

/// nu-average of b over dT_x.
double sector_mean(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b, VertexId x);

/// (1/nu(dT_x)) * integral over dT_x of |b - b_{dT_x}|.
double sector_oscillation(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b, VertexId x);

struct BmoNorm {
  double value = 0.0;
  VertexId vertex = kNoVertex;  // lowest level, then smallest id, among maximizers
  std::vector<double> oscillations;  // per vertex
};

BmoNorm bmo_norm(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& b);

/// Index of the maximum of values; ties go to the lowest level, then the
/// smallest id.
VertexId extremal_vertex(const Tree& t, const std::vector<double>& values);

}  // namespace harmtree
