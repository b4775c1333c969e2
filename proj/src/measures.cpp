#include "harmtree/measures.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "harmtree/error.hpp"

namespace harmtree {

BoundaryMeasure::BoundaryMeasure(std::vector<double> weights) : nu_(std::move(weights)) {
  for (std::size_t i = 0; i < nu_.size(); ++i) {
    if (!std::isfinite(nu_[i]) || nu_[i] <= 0.0) {
      throw Error(ErrorCode::InvalidMeasure,
                  "boundary weight " + std::to_string(i) + " must be finite and positive");
    }
  }
}

FlowMeasure::FlowMeasure(std::vector<double> weights) : m_(std::move(weights)) {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (!std::isfinite(m_[i]) || m_[i] <= 0.0) {
      throw Error(ErrorCode::InvalidMeasure,
                  "flow weight " + std::to_string(i) + " must be finite and positive");
    }
  }
}

VertexMeasure::VertexMeasure(std::vector<double> weights) : sigma_(std::move(weights)) {
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!std::isfinite(sigma_[i]) || sigma_[i] < 0.0) {
      throw Error(ErrorCode::InvalidMeasure,
                  "vertex weight " + std::to_string(i) + " must be finite and nonnegative");
    }
  }
}

std::vector<double> sector_sums(const Tree& t, std::span<const double> leaf_values) {
  if (leaf_values.size() != t.leaf_count()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(t.leaf_count()) +
                                                  " leaf values, got " + std::to_string(leaf_values.size()));
  }
  std::vector<double> sums(t.vertex_count(), 0.0);
  for (std::size_t i = 0; i < t.leaf_count(); ++i) sums[t.leaves()[i]] = leaf_values[i];
  for (VertexId x : t.bottom_up_order()) {
    const auto ch = t.children(x);
    if (ch.empty()) continue;
    double s = 0.0;
    for (VertexId y : ch) s += sums[y];
    sums[x] = s;
  }
  return sums;
}

std::vector<double> subtree_sums(const Tree& t, std::span<const double> vertex_values) {
  if (vertex_values.size() != t.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(t.vertex_count()) +
                                                  " vertex values, got " + std::to_string(vertex_values.size()));
  }
  std::vector<double> sums(vertex_values.begin(), vertex_values.end());
  for (VertexId x : t.bottom_up_order()) {
    for (VertexId y : t.children(x)) sums[x] += sums[y];
  }
  return sums;
}

FlowMeasure induce_flow(const Tree& t, const BoundaryMeasure& nu) {
  return FlowMeasure(sector_sums(t, nu.weights()));
}

FlowCheck check_flow(const Tree& t, const FlowMeasure& m, double rel_tol) {
  if (m.size() != t.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "flow measure does not match the tree");
  }
  FlowCheck out;
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    const auto ch = t.children(x);
    if (ch.empty()) continue;
    double s = 0.0;
    for (VertexId y : ch) s += m[y];
    const double violation = std::abs(m[x] - s) / m[x];
    if (out.worst_vertex == kNoVertex || violation > out.worst_violation) {
      out.worst_violation = violation;
      out.worst_vertex = x;
    }
  }
  out.ok = out.worst_violation <= rel_tol;
  return out;
}

DoublingConstants doubling_constants(const Tree& t, const FlowMeasure& m) {
  if (m.size() != t.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "flow measure does not match the tree");
  }
  DoublingConstants out{0.0, std::numeric_limits<double>::infinity()};
  bool any = false;
  for (VertexId x = 0; x < t.vertex_count(); ++x) {
    for (VertexId y : t.children(x)) {
      const double ratio = m[x] / m[y];
      out.c1 = std::max(out.c1, ratio);
      out.c2 = std::min(out.c2, ratio);
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::NoInternalVertices, "a single-vertex tree has no parent/child pairs");
  return out;
}

std::vector<VertexId> boundary_ball(const Tree& t, VertexId leaf, double r) {
  t.leaf_index(leaf);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::RadiusOutOfRange, "radius must be positive and finite");
  }
  const double lv = std::floor(std::log(r));
  if (lv < 0.0 || lv > static_cast<double>(t.height())) {
    throw Error(ErrorCode::RadiusOutOfRange,
                "floor(log r) = " + std::to_string(lv) + " is outside [0, " + std::to_string(t.height()) + "]");
  }
  return t.boundary_sector(t.phi(leaf, static_cast<int>(lv)));
}

BoundaryDoubling boundary_doubling_ratio(const Tree& t, const BoundaryMeasure& nu) {
  const FlowMeasure m = induce_flow(t, nu);
  BoundaryDoubling out;
  // A radius r with floor(log r) = j has floor(log 2r) in {j, j+1}, and both
  // occur. So the distinct ball pairs are (dT_{phi(w,j)}, dT_{phi(w,j')}) with
  // j' in {j, j+1} and j' <= height; the first kind has ratio 1.
  for (VertexId leaf : t.leaves()) {
    VertexId x = leaf;
    for (int j = 0; j < t.height(); ++j) {
      const VertexId up = *t.parent(x);
      const double ratio = m[up] / m[x];
      if (ratio > out.ratio || out.leaf == kNoVertex) {
        out.ratio = std::max(ratio, out.ratio);
        out.leaf = leaf;
        out.level = j;
      }
      x = up;
    }
  }
  if (out.leaf == kNoVertex) out.leaf = t.leaves().front();
  return out;
}

}  // namespace harmtree
