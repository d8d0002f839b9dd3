// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include <Eigen/Core>
#include "json.hpp"

#include "flowrt/mesh.hpp"

namespace flowrt {

/// How pixel rows map to clip-space y. kYDown: y_clip = 1 - 2y/H (image rows
/// grow downwards); kYUp: y_clip = 2y/H - 1. x_clip = 2x/W - 1 in both.
enum class PixelConvention { kYDown, kYUp };

/// How a normalized depth sample in [-1, 1] becomes an NDC depth.
///   kNdc:    the sample already is the NDC depth (rendered z-buffer).
///   kLinear: the sample maps linearly to eye depth in [near, far] and is
///            converted with the projection's z/w rows; requires a matrix of
///            the standard perspective form (no x/y terms in rows 2 and 3).
enum class DepthEncoding { kNdc, kLinear };

class PerspectiveCamera {
 public:
  /// Throws Error(kNumeric) when `projection` is singular or badly
  /// conditioned, Error(kInvalidArgument) on bad sizes or near >= far.
  PerspectiveCamera(const Eigen::Matrix4d& projection, int width, int height,
                    double near_plane, double far_plane,
                    PixelConvention convention = PixelConvention::kYDown,
                    DepthEncoding encoding = DepthEncoding::kNdc);

  /// OpenGL-style frustum looking down -z.
  static Eigen::Matrix4d perspective(double fov_y_radians, double aspect,
                                     double near_plane, double far_plane);

  static PerspectiveCamera from_json(const nlohmann::json& j);
  static PerspectiveCamera load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const Eigen::Matrix4d& projection() const { return projection_; }
  const Eigen::Matrix4d& inverse() const { return inverse_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double near_plane() const { return near_; }
  double far_plane() const { return far_; }
  PixelConvention convention() const { return convention_; }
  DepthEncoding encoding() const { return encoding_; }

  Vec2 pixel_to_ndc(const Vec2& pixel) const;
  Vec2 ndc_to_pixel(const Vec2& ndc) const;

  /// NDC depth for a normalized depth sample, per the depth encoding.
  double ndc_depth(double normalized_depth) const;
  double normalized_depth(double ndc_depth) const;

  /// P^-1 (x, y, z, 1)^T followed by the perspective divide. Throws
  /// Error(kNumeric, "point at infinity") when w vanishes.
  Vec3 unproject_ndc(const Vec3& ndc) const;

  /// Pixel plus normalized depth sample to a world point.
  Vec3 unproject(const Vec2& pixel, double normalized_depth) const;

  struct Projection {
    Vec2 pixel;
    double ndc_depth;
    double w;  // clip w; positive in front of the camera
  };
  Projection project(const Vec3& world) const;

 private:
  Eigen::Matrix4d projection_;
  Eigen::Matrix4d inverse_;
  int width_;
  int height_;
  double near_;
  double far_;
  PixelConvention convention_;
  DepthEncoding encoding_;
};

}  // namespace flowrt
