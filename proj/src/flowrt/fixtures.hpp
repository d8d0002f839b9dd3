// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "flowrt/camera.hpp"
#include "flowrt/controllers.hpp"
#include "flowrt/mesh.hpp"

namespace flowrt {

/// Regular grid, vertex (c, r) at origin + (c dx, r dy, 0) with index
/// r * cols + c. Each cell is split along its (c, r)-(c+1, r+1) diagonal.
Mesh make_grid_mesh(int cols, int rows, const Vec3& origin, double dx, double dy);

/// Two horizontal strips facing each other across a thin slit, joined only
/// by the first and last cell columns.
struct LipSlitParams {
  int columns = 101;
  int rows_below = 5;
  int rows_above = 5;
  double dx = 0.1;
  double dy = 0.1;
  double gap = 0.04;
};

struct LipSlitFixture {
  Mesh mesh;
  /// Controllers on the two lip lines at every interior column: the upper
  /// ones first, then the lower ones in the same column order.
  ControllerSet controllers;
  std::size_t upper_controller_count = 0;
  std::vector<std::int32_t> upper_strip;  // lip line and above, interior columns
  std::vector<std::int32_t> lower_strip;  // lip line and below, interior columns
  /// For upper_strip[i], the lower controller in the same column.
  std::vector<std::int32_t> facing;
};

LipSlitFixture make_lip_slit_fixture(const LipSlitParams& params = {});

/// The synthetic retargeting scene: a 25 x 20 vertex face plate with a
/// mouth slit, 2 units in front of a 60 degree, 128 x 128 camera.
struct SyntheticScene {
  Mesh mesh;
  PerspectiveCamera camera;
};
SyntheticScene make_synthetic_scene();

/// Writes every fixture below `dir`:
///   slit/      lip-slit mesh and its strip/controller description
///   sequence/  mesh, camera, landmarks, source depth, 20 depth/color frames,
///              20 .flo flows and config.json
///   kernels/   feature, flow, mask, depth dictionary tensors and requests
///   loss/      paired frames, landmarks, embeddings, features and a request
void generate_fixtures(const std::filesystem::path& dir);

inline constexpr int kSequenceFrames = 20;

}  // namespace flowrt
