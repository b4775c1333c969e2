#pragma once

#include <cstddef>

#include "harmtree/functions.hpp"
#include "harmtree/measures.hpp"
#include "harmtree/random.hpp"
#include "harmtree/tree.hpp"

namespace harmtree {

/// Families of random test functions.
enum class SampleLaw {
  Uniform,      // U[0,1) on every leaf
  Sparse,       // zero except ~10% of leaves, U[0,10) there (at least one nonzero)
  HeavyTailed,  // exp(U[-5,5))
  Signed,       // U[-1,1)
};

/// Nonnegative unless law == Signed.
BoundaryFunction sample_boundary_function(Rng& rng, const Tree& t, SampleLaw law);

/// Cycles through the nonnegative laws by trial index.
SampleLaw nonnegative_law(std::size_t trial);

/// Signed, piecewise-constant-on-sectors or spiky real functions for BMO tests.
BoundaryFunction sample_real_function(Rng& rng, const Tree& t, std::size_t trial);

enum class SigmaLaw {
  Flow,    // sigma = m_nu
  Random,  // U[0,1) * m_nu, with ~20% of vertices zeroed
  Spike,   // a single vertex carrying mass exp(U[0,5)) * m_nu(v)
};

VertexMeasure sample_vertex_measure(Rng& rng, const Tree& t, const FlowMeasure& m, SigmaLaw law);

}  // namespace harmtree
