// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flowrt/camera.hpp"
#include "flowrt/controllers.hpp"
#include "flowrt/mesh.hpp"
#include "flowrt/raster.hpp"

namespace flowrt {

struct TrackedPixel {
  Vec2 pixel;
  bool clamped = false;  // the displaced position left the image
};

/// rest + bilinear sample of the flow at rest, clamped to [0, W-1] x [0, H-1].
TrackedPixel track_controller(const Vec2& rest_pixel, const FlowField& flow);

/// Radius, in pixels, searched for a valid depth when the bilinear
/// neighbourhood of a sample holds none.
inline constexpr double kDepthSearchRadius = 3.0;

/// Depth at a continuous pixel: bilinear over the valid corners of the
/// enclosing cell (weights renormalized), else the nearest valid pixel within
/// kDepthSearchRadius (ties in row-major order), else nullopt.
std::optional<double> sample_depth(const DepthMap& depth, const Vec2& pixel);

struct ControllerTransform {
  std::int32_t controller = 0;
  Vec3 translation = Vec3::Zero();
  bool active = true;  // false: no usable depth this frame
};

/// unproject(displaced, depth_dst) - unproject(rest, depth_src). Returns an
/// inactive transform when either depth lookup fails.
ControllerTransform estimate_controller_transform(std::int32_t controller, const Vec2& rest_pixel,
                                                  const Vec2& displaced_pixel,
                                                  const DepthMap& depth_src,
                                                  const DepthMap& depth_dst,
                                                  const PerspectiveCamera& camera);

struct DeformStats {
  std::size_t renormalized_vertices = 0;  // lost weight to inactive controllers
  std::size_t undeformed_vertices = 0;    // no active weight at all
};

/// v_i' = v_i + sum_j w_ij t_j over active controllers. When some of a
/// vertex's controllers are inactive the remaining weights are renormalized.
/// Throws Error(kMissing) if a weighted controller has no transform.
Mesh deform_mesh(const Mesh& mesh, const ControllerSet& controllers,
                 std::span<const ControllerTransform> transforms, DeformStats* stats = nullptr);

struct FrameInput {
  const FlowField& flow;
  const DepthMap& depth_src;
  const DepthMap& depth_dst;
};

struct FrameDiagnostics {
  std::vector<std::int32_t> inactive_controllers;
  std::vector<std::int32_t> clamped_controllers;
  std::size_t renormalized_vertices = 0;
  std::size_t undeformed_vertices = 0;
};

struct FrameResult {
  Mesh mesh;
  FrameDiagnostics diagnostics;
};

/// Retargets one frame against the rest mesh.
FrameResult retarget_frame(const Mesh& rest, const ControllerSet& controllers,
                           const PerspectiveCamera& camera, const FrameInput& frame);

/// One deformed mesh per frame, each from the rest mesh (never chained).
/// Frames must all match the camera resolution.
std::vector<FrameResult> retarget_sequence(const Mesh& rest, const ControllerSet& controllers,
                                           const PerspectiveCamera& camera,
                                           std::span<const FrameInput> frames,
                                           unsigned workers = 1);

}  // namespace flowrt
