#include "harmtree/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <ranges>
#include <string>

#include "harmtree/error.hpp"

namespace harmtree {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorCode::InvalidFunction, std::string(what) + " value " + std::to_string(i) + " is not finite");
    }
  }
}

void require_vertex_sized(const Tree& t, std::size_t n, const char* what) {
  if (n != t.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(n) +
                                                  " entries, tree has " + std::to_string(t.vertex_count()) +
                                                  " vertices");
  }
}

void require_leaf_sized(const Tree& t, std::size_t n, const char* what) {
  if (n != t.leaf_count()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(n) +
                                                  " entries, tree has " + std::to_string(t.leaf_count()) +
                                                  " leaves");
  }
}

// Running max of values[x] along the path from the top down to each vertex.
std::vector<double> path_max_from_top(const Tree& t, std::span<const double> values) {
  std::vector<double> best(t.vertex_count(), 0.0);
  const auto order = t.bottom_up_order();
  for (VertexId x : std::views::reverse(order)) {
    const auto p = t.parent(x);
    best[x] = p ? std::max(values[x], best[*p]) : values[x];
  }
  return best;
}

}  // namespace

TreeFunction::TreeFunction(std::vector<double> values) : v_(std::move(values)) {
  require_finite(v_, "tree function");
}

TreeFunction TreeFunction::constant(const Tree& t, double c) {
  return TreeFunction(std::vector<double>(t.vertex_count(), c));
}

BoundaryFunction::BoundaryFunction(std::vector<double> values) : v_(std::move(values)) {
  require_finite(v_, "boundary function");
}

BoundaryFunction BoundaryFunction::constant(const Tree& t, double c) {
  return BoundaryFunction(std::vector<double>(t.leaf_count(), c));
}

BoundaryFunction BoundaryFunction::indicator(const Tree& t, VertexId v) {
  std::vector<double> g(t.leaf_count(), 0.0);
  for (std::size_t i : t.sector_leaf_indices(v)) g[i] = 1.0;
  return BoundaryFunction(std::move(g));
}

std::vector<std::pair<VertexId, double>> transition_row(const Tree& t, const FlowMeasure& m, VertexId x) {
  require_vertex_sized(t, m.size(), "flow measure");
  std::vector<std::pair<VertexId, double>> row;
  for (VertexId y : t.children(x)) row.emplace_back(y, m[y] / m[x]);
  return row;
}

TreeFunction transition_apply(const Tree& t, const FlowMeasure& m, const TreeFunction& f) {
  require_vertex_sized(t, m.size(), "flow measure");
  require_vertex_sized(t, f.size(), "tree function");
  std::vector<double> out(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const auto ch = t.children(x);
    if (ch.empty()) {
      out[x] = f[x];
      continue;
    }
    double s = 0.0;
    for (VertexId y : ch) s += f[y] * m[y];
    out[x] = s / m[x];
  }
  return TreeFunction(std::move(out));
}

TreeFunction laplacian_apply(const Tree& t, const FlowMeasure& m, const TreeFunction& f) {
  const TreeFunction pf = transition_apply(t, m, f);
  std::vector<double> out(t.vertex_count());
  for (VertexId x = 0; x < t.vertex_count(); ++x) out[x] = t.is_leaf(x) ? 0.0 : f[x] - pf[x];
  return TreeFunction(std::move(out));
}

TreeFunction poisson_extend(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& g) {
  require_leaf_sized(t, nu.size(), "boundary measure");
  require_leaf_sized(t, g.size(), "boundary function");
  std::vector<double> weighted(t.leaf_count());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = g[i] * nu[i];
  std::vector<double> out = sector_sums(t, weighted);
  const std::vector<double> mass = sector_sums(t, nu.weights());
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    if (t.is_leaf(x)) {
      out[x] = g[t.leaf_index(x)];
    } else {
      out[x] /= mass[x];
    }
  }
  return TreeFunction(std::move(out));
}

HarmonicCheck is_harmonic(const Tree& t, const FlowMeasure& m, const TreeFunction& f, double rel_tol) {
  const TreeFunction lap = laplacian_apply(t, m, f);
  HarmonicCheck out;
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    if (t.is_leaf(x)) continue;
    const double residual = std::abs(lap[x]) / std::max(1.0, std::abs(f[x]));
    if (out.worst_vertex == kNoVertex || residual > out.worst_residual) {
      out.worst_residual = residual;
      out.worst_vertex = x;
    }
  }
  out.ok = out.worst_residual <= rel_tol;
  return out;
}

BoundaryFunction recover_boundary(const Tree& t, const TreeFunction& f) {
  require_vertex_sized(t, f.size(), "tree function");
  std::vector<double> g;
  g.reserve(t.leaf_count());
  for (VertexId leaf : t.leaves()) g.push_back(f[leaf]);
  return BoundaryFunction(std::move(g));
}

BoundaryFunction hl_maximal(const Tree& t, const BoundaryMeasure& nu, const BoundaryFunction& g) {
  std::vector<double> abs_g(g.values().begin(), g.values().end());
  for (double& v : abs_g) v = std::abs(v);
  // Ball averages of |g| are the Poisson extension of |g|.
  const TreeFunction averages = poisson_extend(t, nu, BoundaryFunction(std::move(abs_g)));
  const std::vector<double> best = path_max_from_top(t, averages.values());
  std::vector<double> out;
  out.reserve(t.leaf_count());
  for (VertexId leaf : t.leaves()) out.push_back(best[leaf]);
  return BoundaryFunction(std::move(out));
}

BoundaryFunction radial_maximal(const Tree& t, const TreeFunction& f) {
  require_vertex_sized(t, f.size(), "tree function");
  std::vector<double> abs_f(f.values().begin(), f.values().end());
  for (double& v : abs_f) v = std::abs(v);
  const std::vector<double> best = path_max_from_top(t, abs_f);
  std::vector<double> out;
  out.reserve(t.leaf_count());
  for (VertexId leaf : t.leaves()) out.push_back(best[leaf]);
  return BoundaryFunction(std::move(out));
}

}  // namespace harmtree
