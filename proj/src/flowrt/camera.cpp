// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/camera.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "flowrt/error.hpp"

namespace flowrt {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kMinW = 1e-12;
constexpr double kDepthSlack = 1e-9;

}  // namespace

PerspectiveCamera::PerspectiveCamera(const Eigen::Matrix4d& projection,
                                     int width, int height, double near_plane,
                                     double far_plane, PixelConvention convention,
                                     DepthEncoding encoding)
    : projection_(projection),
      width_(width),
      height_(height),
      near_(near_plane),
      far_(far_plane),
      convention_(convention),
      encoding_(encoding) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "camera image size must be positive");
  }
  if (!(near_plane < far_plane)) {
    fail(ErrorCode::kInvalidArgument, "camera near must be less than far");
  }
  if (!projection.allFinite()) {
    fail(ErrorCode::kNumeric, "perspective matrix has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(projection);
  const auto& s = svd.singularValues();
  const double cond = s(0) / s(3);
  if (!(s(3) > 0.0) || !std::isfinite(cond) || cond > kMaxCondition) {
    fail(ErrorCode::kNumeric, "perspective matrix is singular (condition number " +
                                  std::to_string(cond) + ")");
  }
  inverse_ = projection.inverse();
  if (encoding_ == DepthEncoding::kLinear &&
      (projection(2, 0) != 0.0 || projection(2, 1) != 0.0 ||
       projection(3, 0) != 0.0 || projection(3, 1) != 0.0)) {
    fail(ErrorCode::kInvalidArgument,
         "linear depth encoding needs a projection without x/y terms in its z and w rows");
  }
}

Eigen::Matrix4d PerspectiveCamera::perspective(double fov_y, double aspect,
                                               double n, double f) {
  const double t = 1.0 / std::tan(fov_y / 2.0);
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  p(0, 0) = t / aspect;
  p(1, 1) = t;
  p(2, 2) = (f + n) / (n - f);
  p(2, 3) = 2.0 * f * n / (n - f);
  p(3, 2) = -1.0;
  return p;
}

PerspectiveCamera PerspectiveCamera::from_json(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("P");
    if (!rows.is_array() || rows.size() != 16) {
      fail(ErrorCode::kFormat, "camera 'P' must be 16 numbers in row-major order");
    }
    Eigen::Matrix4d p;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) p(r, c) = rows[r * 4 + c].get<double>();
    }
    auto convention = PixelConvention::kYDown;
    if (j.contains("pixel_convention")) {
      const auto s = j["pixel_convention"].get<std::string>();
      if (s == "y_down") {
        convention = PixelConvention::kYDown;
      } else if (s == "y_up") {
        convention = PixelConvention::kYUp;
      } else {
        fail(ErrorCode::kFormat, "unknown pixel_convention '" + s + "'");
      }
    }
    auto encoding = DepthEncoding::kNdc;
    if (j.contains("depth_encoding")) {
      const auto s = j["depth_encoding"].get<std::string>();
      if (s == "ndc") {
        encoding = DepthEncoding::kNdc;
      } else if (s == "linear") {
        encoding = DepthEncoding::kLinear;
      } else {
        fail(ErrorCode::kFormat, "unknown depth_encoding '" + s + "'");
      }
    }
    return PerspectiveCamera(p, j.at("width").get<int>(), j.at("height").get<int>(),
                             j.at("near").get<double>(), j.at("far").get<double>(),
                             convention, encoding);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("camera json: ") + e.what());
  }
}

PerspectiveCamera PerspectiveCamera::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open camera file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json PerspectiveCamera::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) rows.push_back(projection_(r, c));
  }
  return {
      {"P", rows},
      {"width", width_},
      {"height", height_},
      {"near", near_},
      {"far", far_},
      {"pixel_convention", convention_ == PixelConvention::kYDown ? "y_down" : "y_up"},
      {"depth_encoding", encoding_ == DepthEncoding::kNdc ? "ndc" : "linear"},
  };
}

Vec2 PerspectiveCamera::pixel_to_ndc(const Vec2& pixel) const {
  const double x = 2.0 * pixel.x() / width_ - 1.0;
  const double y = convention_ == PixelConvention::kYDown
                       ? 1.0 - 2.0 * pixel.y() / height_
                       : 2.0 * pixel.y() / height_ - 1.0;
  return {x, y};
}

Vec2 PerspectiveCamera::ndc_to_pixel(const Vec2& ndc) const {
  const double x = (ndc.x() + 1.0) * width_ / 2.0;
  const double y = convention_ == PixelConvention::kYDown
                       ? (1.0 - ndc.y()) * height_ / 2.0
                       : (ndc.y() + 1.0) * height_ / 2.0;
  return {x, y};
}

double PerspectiveCamera::ndc_depth(double d) const {
  if (!(d >= -1.0 - kDepthSlack && d <= 1.0 + kDepthSlack)) {
    fail(ErrorCode::kInvalidArgument,
         "depth sample " + std::to_string(d) + " outside [-1, 1]");
  }
  if (encoding_ == DepthEncoding::kNdc) return d;
  const double eye_depth = near_ + (d + 1.0) * 0.5 * (far_ - near_);
  const double z = -eye_depth;
  return (projection_(2, 2) * z + projection_(2, 3)) /
         (projection_(3, 2) * z + projection_(3, 3));
}

double PerspectiveCamera::normalized_depth(double ndc) const {
  if (encoding_ == DepthEncoding::kNdc) return ndc;
  // Solve ndc = (a z + b) / (c z + e) for eye z.
  const double a = projection_(2, 2), b = projection_(2, 3);
  const double c = projection_(3, 2), e = projection_(3, 3);
  const double z = (b - ndc * e) / (ndc * c - a);
  return 2.0 * (-z - near_) / (far_ - near_) - 1.0;
}

Vec3 PerspectiveCamera::unproject_ndc(const Vec3& ndc) const {
  const Eigen::Vector4d h = inverse_ * Eigen::Vector4d(ndc.x(), ndc.y(), ndc.z(), 1.0);
  if (std::abs(h.w()) < kMinW) fail(ErrorCode::kNumeric, "point at infinity");
  return h.head<3>() / h.w();
}

Vec3 PerspectiveCamera::unproject(const Vec2& pixel, double normalized) const {
  if (!(pixel.x() >= 0.0 && pixel.x() <= width_ && pixel.y() >= 0.0 &&
        pixel.y() <= height_)) {
    fail(ErrorCode::kInvalidArgument, "pixel outside image");
  }
  const Vec2 xy = pixel_to_ndc(pixel);
  return unproject_ndc({xy.x(), xy.y(), ndc_depth(normalized)});
}

PerspectiveCamera::Projection PerspectiveCamera::project(const Vec3& world) const {
  const Eigen::Vector4d clip = projection_ * world.homogeneous();
  if (std::abs(clip.w()) < kMinW) fail(ErrorCode::kNumeric, "point at infinity");
  const Vec3 ndc = clip.head<3>() / clip.w();
  return {ndc_to_pixel(ndc.head<2>()), ndc.z(), clip.w()};
}

}  // namespace flowrt
