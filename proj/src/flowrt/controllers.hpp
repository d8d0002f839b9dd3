// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "flowrt/camera.hpp"
#include "flowrt/mesh.hpp"

namespace flowrt {

struct Landmark {
  std::string id;
  double x_px = 0.0;
  double y_px = 0.0;
};

/// Landmark file: JSON array of {id, x_px, y_px}. Numeric ids are kept as
/// their decimal text.
std::vector<Landmark> read_landmarks(const std::filesystem::path& path);
std::vector<Landmark> landmarks_from_json(const nlohmann::json& j);
nlohmann::json landmarks_to_json(std::span<const Landmark> landmarks);

struct Controller {
  std::string id;
  std::int32_t vertex = 0;
  Vec2 rest_pixel = Vec2::Zero();
  Vec3 rest_position = Vec3::Zero();
};

/// Sparse row-major vertex x controller matrix.
class WeightMatrix {
 public:
  struct Entry {
    std::int32_t controller;
    double weight;
  };

  WeightMatrix() = default;
  explicit WeightMatrix(std::vector<std::vector<Entry>> rows);

  std::size_t rows() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Entry> row(std::size_t vertex) const {
    return {entries_.data() + offsets_[vertex], entries_.data() + offsets_[vertex + 1]};
  }
  bool empty() const { return rows() == 0; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

struct ControllerSet {
  std::vector<Controller> controllers;
  WeightMatrix weights;

  std::size_t size() const { return controllers.size(); }
};

enum class DistanceMetric { kGeodesic, kEuclidean };

const char* to_string(DistanceMetric metric);
DistanceMetric distance_metric_from_string(const std::string& s);

struct WeightOptions {
  std::size_t k = 10;
  DistanceMetric metric = DistanceMetric::kGeodesic;
  unsigned workers = 1;
};

struct WeightReport {
  std::size_t unreachable_pairs = 0;  // (vertex, controller) pairs at +inf
  std::size_t zero_rows = 0;          // vertices left without any weight
};

/// Inverse-square distance weights over the k nearest controllers of each
/// vertex, normalized per row. Ties in distance go to the lower controller
/// index. A vertex at distance zero from a controller is bound to it alone.
/// Vertices with no finite-distance controller get an empty row.
WeightReport compute_controlling_weights(const Mesh& mesh, ControllerSet& set,
                                         const WeightOptions& options = {});

/// Result of attaching 2D landmarks to the rest mesh.
struct Anchoring {
  ControllerSet set;
  std::vector<std::string> dropped;  // ids outside the image or silhouette
};

/// Each landmark becomes a controller on the vertex whose rest projection is
/// nearest to the landmark pixel (ties: nearer to the camera, then lower
/// index). Landmarks not covered by any projected front-facing or
/// back-facing triangle are dropped.
Anchoring anchor_landmarks(const Mesh& mesh, const PerspectiveCamera& camera,
                           std::span<const Landmark> landmarks);

/// Controllers placed directly on vertices; rest pixels come from the
/// camera when given, otherwise they are zero.
ControllerSet controllers_at_vertices(const Mesh& mesh,
                                      std::span<const std::int32_t> vertices,
                                      const PerspectiveCamera* camera = nullptr);

nlohmann::json controllers_to_json(const ControllerSet& set);
ControllerSet controllers_from_json(const nlohmann::json& j, std::size_t vertex_count);

}  // namespace flowrt
