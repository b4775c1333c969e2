#include "harmtree/sampling.hpp"

#include <cmath>
#include <vector>

namespace harmtree {

BoundaryFunction sample_boundary_function(Rng& rng, const Tree& t, SampleLaw law) {
  std::vector<double> g(t.leaf_count(), 0.0);
  switch (law) {
    case SampleLaw::Uniform:
      for (double& v : g) v = rng.uniform01();
      break;
    case SampleLaw::Sparse: {
      for (double& v : g) {
        if (rng.bernoulli(0.1)) v = rng.uniform(0.0, 10.0);
      }
      const auto hit = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(g.size()) - 1));
      if (g[hit] == 0.0) g[hit] = rng.uniform(1.0, 10.0);
      break;
    }
    case SampleLaw::HeavyTailed:
      for (double& v : g) v = std::exp(rng.uniform(-5.0, 5.0));
      break;
    case SampleLaw::Signed:
      for (double& v : g) v = rng.uniform(-1.0, 1.0);
      break;
  }
  return BoundaryFunction(std::move(g));
}

SampleLaw nonnegative_law(std::size_t trial) {
  switch (trial % 3) {
    case 0: return SampleLaw::Uniform;
    case 1: return SampleLaw::Sparse;
    default: return SampleLaw::HeavyTailed;
  }
}

BoundaryFunction sample_real_function(Rng& rng, const Tree& t, std::size_t trial) {
  switch (trial % 4) {
    case 0: return sample_boundary_function(rng, t, SampleLaw::Signed);
    case 1: {
      // Constant on the sectors of a random level, plus small noise.
      const int k = static_cast<int>(rng.uniform_int(0, t.height()));
      std::vector<double> g(t.leaf_count(), 0.0);
      for (VertexId x : t.vertices_at_level(k)) {
        const double c = rng.uniform(-3.0, 3.0);
        for (std::size_t i : t.sector_leaf_indices(x)) g[i] = c + 0.01 * rng.uniform(-1.0, 1.0);
      }
      return BoundaryFunction(std::move(g));
    }
    case 2: {
      // Sparse spikes with random signs.
      const BoundaryFunction sparse = sample_boundary_function(rng, t, SampleLaw::Sparse);
      std::vector<double> g(sparse.values().begin(), sparse.values().end());
      for (double& v : g) {
        if (rng.bernoulli(0.5)) v = -v;
      }
      return BoundaryFunction(std::move(g));
    }
    default: {
      std::vector<double> g(t.leaf_count());
      for (double& v : g) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
      return BoundaryFunction(std::move(g));
    }
  }
}

VertexMeasure sample_vertex_measure(Rng& rng, const Tree& t, const FlowMeasure& m, SigmaLaw law) {
  std::vector<double> sigma(t.vertex_count(), 0.0);
  switch (law) {
    case SigmaLaw::Flow:
      sigma.assign(m.weights().begin(), m.weights().end());
      break;
    case SigmaLaw::Random:
      for (VertexId x = 0; x < sigma.size(); ++x) {
        sigma[x] = rng.bernoulli(0.2) ? 0.0 : rng.uniform01() * m[x];
      }
      break;
    case SigmaLaw::Spike: {
      const auto v = static_cast<VertexId>(rng.uniform_int(0, static_cast<std::int64_t>(sigma.size()) - 1));
      sigma[v] = std::exp(rng.uniform(0.0, 5.0)) * m[v];
      break;
    }
  }
  return VertexMeasure(std::move(sigma));
}

}  // namespace harmtree
