#pragma once

#include <utility>
#include <vector>

#include "harmtree/functions.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

// Probabilistic Laplacian. The walk moves only downward: from x it steps to
// y in s(x) with probability m(y)/m(x). At a leaf there are no successors;
// there we set (Pf)(leaf) = f(leaf), hence (Delta f)(leaf) = 0, and leaves are
// excluded from every harmonicity check.

TreeFunction laplacian_apply(const Tree& t, const FlowMeasure& m, const TreeFunction& f);
TreeFunction transition_apply(const Tree& t, const FlowMeasure& m, const TreeFunction& f);

/// Row of the transition matrix at x: (y, p(x,y)) for y in s(x).
std::vector<std::pair<VertexId, double>> transition_row(const Tree& t, const FlowMeasure& m, VertexId x);

/// Poisson integral: (Pg)(x) is the nu-average of g over dT_x. Leaf values are
/// copied from g, so (Pg)(leaf) == g(leaf) bit for bit, and P1 == 1 exactly.
TreeFunction poisson_extend(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& g);

struct HarmonicCheck {
  bool ok = true;
  VertexId worst_vertex = kNoVertex;
  double worst_residual = 0.0;  // |Delta f(x)| / max(1, |f(x)|)
};

HarmonicCheck is_harmonic(const Tree& t, const FlowMeasure& m, const TreeFunction& f, double rel_tol = 1e-10);

/// Leaf values of f. For harmonic f, poisson_extend(recover_boundary(f)) == f.
BoundaryFunction recover_boundary(const Tree& t, const TreeFunction& f);

/// Hardy-Littlewood maximal function on the boundary: the largest nu-average
/// of |g| over the balls dT_x containing each leaf (leaf itself through top).
BoundaryFunction hl_maximal(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& g);

/// Radial maximal function: max |f| along the leaf-to-top path.
BoundaryFunction radial_maximal(const Tree& t, const TreeFunction& f);

}  // namespace harmtree
