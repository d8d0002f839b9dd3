// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "flowrt/error.hpp"

namespace flowrt {

EdgeGraph EdgeGraph::from_mesh(const Mesh& mesh) {
  mesh.validate();
  EdgeGraph g;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> seen;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      std::int32_t a = face[c];
      std::int32_t b = face[(c + 1) % 3];
      if (a > b) std::swap(a, b);
      if (seen.contains({a, b})) continue;
      const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
      if (!(len > 0.0)) {
        fail(ErrorCode::kTopology,
             "face " + std::to_string(f) + " has a zero-length edge between "
                 "vertices " + std::to_string(a) + " and " + std::to_string(b));
      }
      seen.emplace(std::make_pair(a, b), g.edges_.size());
      g.edges_.push_back({a, b});
      g.lengths_.push_back(len);
    }
  }
  g.build_adjacency(mesh.vertices.size());
  return g;
}

EdgeGraph EdgeGraph::from_edges(std::size_t vertex_count,
                                std::span<const Edge> edges,
                                std::span<const double> lengths) {
  if (edges.size() != lengths.size()) {
    fail(ErrorCode::kShape, "edge and length counts differ");
  }
  EdgeGraph g;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> seen;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::int32_t a = edges[e][0];
    std::int32_t b = edges[e][1];
    if (a > b) std::swap(a, b);
    if (a < 0 || static_cast<std::size_t>(b) >= vertex_count || a == b) {
      fail(ErrorCode::kTopology, "edge " + std::to_string(e) + " is invalid");
    }
    if (!(lengths[e] > 0.0) || !std::isfinite(lengths[e])) {
      fail(ErrorCode::kNumeric,
           "edge " + std::to_string(e) + " must have positive finite length");
    }
    if (seen.contains({a, b})) continue;
    seen.emplace(std::make_pair(a, b), g.edges_.size());
    g.edges_.push_back({a, b});
    g.lengths_.push_back(lengths[e]);
  }
  g.build_adjacency(vertex_count);
  return g;
}

void EdgeGraph::build_adjacency(std::size_t vertex_count) {
  std::vector<std::size_t> degree(vertex_count, 0);
  for (const auto& e : edges_) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    offsets_[v + 1] = offsets_[v] + degree[v];
  }
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    adjacency_[cursor[a]++] = {b, lengths_[e]};
    adjacency_[cursor[b]++] = {a, lengths_[e]};
  }
}

std::size_t EdgeGraph::component_count() const {
  const std::size_t n = vertex_count();
  std::vector<std::int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = n;
  for (const auto& e : edges_) {
    const auto ra = find(e[0]);
    const auto rb = find(e[1]);
    if (ra != rb) {
      parent[std::max(ra, rb)] = std::min(ra, rb);
      --components;
    }
  }
  return components;
}

DistanceField geodesic_distances(const EdgeGraph& graph, std::int32_t source) {
  const std::size_t n = graph.vertex_count();
  if (source < 0 || static_cast<std::size_t>(source) >= n) {
    fail(ErrorCode::kInvalidArgument,
         "source vertex " + std::to_string(source) + " out of range");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  DistanceField field;
  field.source = source;
  field.dist.assign(n, kInf);
  field.dist[source] = 0.0;

  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<bool> settled(n, false);
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    for (const auto& nb : graph.neighbors(u)) {
      const double cand = d + nb.length;
      if (cand < field.dist[nb.vertex]) {
        field.dist[nb.vertex] = cand;
        heap.emplace(cand, nb.vertex);
      }
    }
  }
  field.unreachable = static_cast<std::size_t>(
      std::count(field.dist.begin(), field.dist.end(), kInf));
  return field;
}

DistanceField geodesic_distances(const Mesh& mesh, std::int32_t source) {
  return geodesic_distances(EdgeGraph::from_mesh(mesh), source);
}

std::vector<double> euclidean_distances(const Mesh& mesh, const Vec3& point) {
  std::vector<double> out(mesh.vertices.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (mesh.vertices[i] - point).norm();
  }
  return out;
}

}  // namespace flowrt
