// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowrt/error.hpp"
#include "flowrt/parallel.hpp"

namespace flowrt {

TrackedPixel track_controller(const Vec2& rest, const FlowField& flow) {
  const double w = flow.width(), h = flow.height();
  if (!(rest.x() >= 0.0 && rest.x() <= w - 1 && rest.y() >= 0.0 && rest.y() <= h - 1)) {
    fail(ErrorCode::kInvalidArgument, "controller rest pixel lies outside the flow field");
  }
  const Vec2 moved = rest + Vec2(sample_bilinear(flow.map(), 0, rest.x(), rest.y()),
                                 sample_bilinear(flow.map(), 1, rest.x(), rest.y()));
  if (!moved.allFinite()) fail(ErrorCode::kNumeric, "flow produced a non-finite position");
  TrackedPixel out{{std::clamp(moved.x(), 0.0, w - 1), std::clamp(moved.y(), 0.0, h - 1)}, false};
  out.clamped = out.pixel != moved;
  return out;
}

std::optional<double> sample_depth(const DepthMap& depth, const Vec2& p) {
  const int w = depth.width(), h = depth.height();
  const double cx = std::clamp(p.x(), 0.0, static_cast<double>(w - 1));
  const double cy = std::clamp(p.y(), 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = cx - x0, fy = cy - y0;

  const struct {
    int x, y;
    double weight;
  } corners[4] = {{x0, y0, (1 - fx) * (1 - fy)},
                  {x1, y0, fx * (1 - fy)},
                  {x0, y1, (1 - fx) * fy},
                  {x1, y1, fx * fy}};
  double acc = 0.0, mass = 0.0;
  bool all_valid = true;
  for (const auto& c : corners) {
    if (c.weight == 0.0) continue;
    if (depth.is_valid(c.y, c.x)) {
      acc += c.weight * depth.at(c.y, c.x);
      mass += c.weight;
    } else {
      all_valid = false;
    }
  }
  if (mass > 0.0) {
    if (all_valid) return sample_bilinear(depth.values, 0, cx, cy);
    return acc / mass;
  }

  const int r = static_cast<int>(std::ceil(kDepthSearchRadius));
  std::optional<double> best;
  double best_d2 = kDepthSearchRadius * kDepthSearchRadius;
  for (int y = std::max(0, y0 - r); y <= std::min(h - 1, y0 + r + 1); ++y) {
    for (int x = std::max(0, x0 - r); x <= std::min(w - 1, x0 + r + 1); ++x) {
      if (!depth.is_valid(y, x)) continue;
      const double d2 = (Vec2(x, y) - Vec2(cx, cy)).squaredNorm();
      if (d2 < best_d2 || (!best && d2 == best_d2)) {
        best_d2 = d2;
        best = depth.at(y, x);
      }
    }
  }
  return best;
}

ControllerTransform estimate_controller_transform(std::int32_t controller, const Vec2& rest,
                                                  const Vec2& displaced,
                                                  const DepthMap& depth_src,
                                                  const DepthMap& depth_dst,
                                                  const PerspectiveCamera& camera) {
  ControllerTransform t;
  t.controller = controller;
  const auto d_src = sample_depth(depth_src, rest);
  const auto d_dst = sample_depth(depth_dst, displaced);
  if (!d_src || !d_dst) {
    t.active = false;
    return t;
  }
  t.translation = camera.unproject(displaced, *d_dst) - camera.unproject(rest, *d_src);
  if (!t.translation.allFinite()) fail(ErrorCode::kNumeric, "non-finite controller translation");
  return t;
}

Mesh deform_mesh(const Mesh& mesh, const ControllerSet& controllers,
                 std::span<const ControllerTransform> transforms, DeformStats* stats) {
  if (controllers.weights.rows() != mesh.vertices.size()) {
    fail(ErrorCode::kShape, "weights cover " + std::to_string(controllers.weights.rows()) +
                                " vertices but the mesh has " +
                                std::to_string(mesh.vertices.size()));
  }
  const std::size_t nc = controllers.size();
  std::vector<const ControllerTransform*> by_controller(nc, nullptr);
  for (const auto& t : transforms) {
    if (t.controller < 0 || static_cast<std::size_t>(t.controller) >= nc) {
      fail(ErrorCode::kInvalidArgument, "transform for unknown controller " +
                                            std::to_string(t.controller));
    }
    by_controller[t.controller] = &t;
  }

  DeformStats local;
  Mesh out = mesh;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto row = controllers.weights.row(v);
    Vec3 acc = Vec3::Zero();
    double total = 0.0, active = 0.0;
    for (const auto& e : row) {
      if (e.weight == 0.0) continue;
      const auto* t = by_controller[e.controller];
      if (t == nullptr) {
        fail(ErrorCode::kMissing, "no transform for controller " + std::to_string(e.controller) +
                                      " which carries weight on vertex " + std::to_string(v));
      }
      total += e.weight;
      if (!t->active) continue;
      acc += e.weight * t->translation;
      active += e.weight;
    }
    if (total == 0.0) continue;
    if (active == 0.0) {
      ++local.undeformed_vertices;
      continue;
    }
    if (active < total) {
      acc *= total / active;
      ++local.renormalized_vertices;
    }
    for (int c = 0; c < 3; ++c) {
      if (acc[c] != 0.0) out.vertices[v][c] += acc[c];
    }
  }
  if (stats) *stats = local;
  return out;
}

FrameResult retarget_frame(const Mesh& rest, const ControllerSet& controllers,
                           const PerspectiveCamera& camera, const FrameInput& frame) {
  FrameResult result;
  std::vector<ControllerTransform> transforms;
  transforms.reserve(controllers.size());
  for (std::size_t j = 0; j < controllers.size(); ++j) {
    const auto idx = static_cast<std::int32_t>(j);
    const auto& ctrl = controllers.controllers[j];
    const auto tracked = track_controller(ctrl.rest_pixel, frame.flow);
    if (tracked.clamped) result.diagnostics.clamped_controllers.push_back(idx);
    auto t = estimate_controller_transform(idx, ctrl.rest_pixel, tracked.pixel, frame.depth_src,
                                           frame.depth_dst, camera);
    if (!t.active) result.diagnostics.inactive_controllers.push_back(idx);
    transforms.push_back(t);
  }
  DeformStats stats;
  result.mesh = deform_mesh(rest, controllers, transforms, &stats);
  result.diagnostics.renormalized_vertices = stats.renormalized_vertices;
  result.diagnostics.undeformed_vertices = stats.undeformed_vertices;
  return result;
}

std::vector<FrameResult> retarget_sequence(const Mesh& rest, const ControllerSet& controllers,
                                           const PerspectiveCamera& camera,
                                           std::span<const FrameInput> frames, unsigned workers) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const bool ok = f.flow.width() == camera.width() && f.flow.height() == camera.height() &&
                    f.depth_src.width() == camera.width() &&
                    f.depth_src.height() == camera.height() &&
                    f.depth_dst.width() == camera.width() &&
                    f.depth_dst.height() == camera.height();
    if (!ok) {
      fail(ErrorCode::kShape, "frame " + std::to_string(i) + ": resolution does not match the " +
                                  std::to_string(camera.width()) + "x" +
                                  std::to_string(camera.height()) + " camera");
    }
  }
  std::vector<FrameResult> out(frames.size());
  parallel_for(frames.size(), workers, [&](std::size_t i) {
    try {
      out[i] = retarget_frame(rest, controllers, camera, frames[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace flowrt
