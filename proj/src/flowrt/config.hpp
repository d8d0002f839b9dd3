// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "json.hpp"

#include "flowrt/controllers.hpp"
#include "flowrt/losses.hpp"
#include "flowrt/rgbd_io.hpp"

namespace flowrt {

struct RunPaths {
  std::filesystem::path mesh;
  std::filesystem::path camera;
  std::filesystem::path landmarks;
  std::filesystem::path source_depth;
  std::filesystem::path frame_dir;
  std::filesystem::path flow_dir;
  std::filesystem::path output_dir;
  std::filesystem::path weights;  // optional precomputed weight file
};

/// Settings for one retargeting run. JSON form:
///   {"paths": {"mesh", "camera", "landmarks", "source_depth", "frame_dir",
///              "flow_dir", "output_dir", "weights"},
///    "k_nearest": 10, "distance_metric": "geodesic",
///    "depth_dictionary_size": 5,
///    "loss_weights": {"rec": 200, "sm": 200, "sp": 50},
///    "depth_normalization": {"near_mm": 300, "far_mm": 1500},
///    "workers": 1}
/// Missing keys take the defaults below; unknown keys are rejected.
struct RunConfig {
  RunPaths paths;
  std::size_t k_nearest = 10;
  DistanceMetric metric = DistanceMetric::kGeodesic;
  std::size_t depth_dictionary_size = 5;
  LossWeights loss_weights;
  DepthRange depth_range;
  unsigned workers = 1;

  /// Relative paths are resolved against `base_dir`.
  static RunConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Every field, defaults included.
  nlohmann::json to_json() const;

  /// k >= 1, near < far, non-negative loss weights.
  void validate() const;
};

}  // namespace flowrt
