// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "flowrt/mesh.hpp"

namespace flowrt {

/// Undirected edge graph of a mesh. Every mesh edge is stored once in
/// `edges`; the CSR arrays hold both directions for traversal.
class EdgeGraph {
 public:
  using Edge = std::array<std::int32_t, 2>;

  /// Edge lengths are Euclidean distances between endpoints. A zero-length
  /// edge throws Error(kTopology) naming the first face that uses it.
  static EdgeGraph from_mesh(const Mesh& mesh);

  /// Builds a graph from explicit edges (a < b not required) and positive
  /// lengths. Duplicate edges keep the first length.
  static EdgeGraph from_edges(std::size_t vertex_count, std::span<const Edge> edges,
                              std::span<const double> lengths);

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const double> edge_lengths() const { return lengths_; }

  struct Neighbor {
    std::int32_t vertex;
    double length;
  };
  std::span<const Neighbor> neighbors(std::int32_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  /// Number of connected components (isolated vertices count as one each).
  std::size_t component_count() const;

 private:
  void build_adjacency(std::size_t vertex_count);

  std::vector<Edge> edges_;
  std::vector<double> lengths_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

struct DistanceField {
  std::int32_t source = 0;
  std::vector<double> dist;      // +inf where unreachable
  std::size_t unreachable = 0;   // nonzero means the graph was disconnected
};

/// Dijkstra shortest paths over the edge graph.
DistanceField geodesic_distances(const EdgeGraph& graph, std::int32_t source);
DistanceField geodesic_distances(const Mesh& mesh, std::int32_t source);

/// Straight-line distances from a point to every vertex; the Euclidean
/// counterpart used when comparing weighting schemes.
std::vector<double> euclidean_distances(const Mesh& mesh, const Vec3& point);

}  // namespace flowrt
