// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/rgbd_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "flowrt/error.hpp"

namespace flowrt {

namespace {

void check_range(const DepthRange& r) {
  if (!(r.near_mm < r.far_mm) || r.near_mm < 0.0 || r.far_mm > 65535.0) {
    fail(ErrorCode::kInvalidArgument, "depth range must satisfy 0 <= near < far <= 65535 mm");
  }
}

cv::Mat read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kIo, "missing image " + path.string());
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) fail(ErrorCode::kFormat, "cannot decode image " + path.string());
  return img;
}

void write_image(const std::filesystem::path& path, const cv::Mat& img) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), img);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kIo, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

double normalize_depth_mm(double mm, const DepthRange& range) {
  const double c = std::clamp(mm, range.near_mm, range.far_mm);
  return 2.0 * (c - range.near_mm) / (range.far_mm - range.near_mm) - 1.0;
}

double depth_mm_from_normalized(double value, const DepthRange& range) {
  return range.near_mm + (value + 1.0) * 0.5 * (range.far_mm - range.near_mm);
}

FeatureMap load_color(const std::filesystem::path& color_path) {
  const cv::Mat img = read_image(color_path);
  if (img.type() != CV_8UC3) {
    fail(ErrorCode::kFormat, color_path.string() + ": color must be 8-bit, 3 channels");
  }
  FeatureMap color(3, img.rows, img.cols);
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.cols; ++x) {
      // OpenCV stores BGR.
      for (int c = 0; c < 3; ++c) color.at(c, y, x) = row[x][2 - c] / 127.5 - 1.0;
    }
  }
  return color;
}

DepthMap load_depth(const std::filesystem::path& depth_path, const DepthRange& range) {
  check_range(range);
  const cv::Mat img = read_image(depth_path);
  if (img.type() != CV_16UC1) {
    fail(ErrorCode::kFormat, depth_path.string() + ": depth must be 16-bit, single channel");
  }
  DepthMap depth(img.rows, img.cols);
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<std::uint16_t>(y);
    for (int x = 0; x < img.cols; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * img.cols + x;
      if (row[x] == 0) {
        depth.valid[i] = 0;
        depth.values.at(0, y, x) = 1.0;
      } else {
        depth.values.at(0, y, x) = normalize_depth_mm(row[x], range);
      }
    }
  }
  return depth;
}

RgbdFrame load_rgbd(const std::filesystem::path& color_path,
                    const std::filesystem::path& depth_path, const DepthRange& range) {
  RgbdFrame frame{load_color(color_path), load_depth(depth_path, range)};
  if (!frame.color.same_extent(frame.depth.values)) {
    fail(ErrorCode::kShape, "color " + color_path.string() + " and depth " +
                                depth_path.string() + " differ in size");
  }
  return frame;
}

void save_color(const FeatureMap& color, const std::filesystem::path& color_path) {
  if (color.channels() != 3) fail(ErrorCode::kShape, "color raster needs three channels");
  cv::Mat img(color.height(), color.width(), CV_8UC3);
  for (int y = 0; y < color.height(); ++y) {
    auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < color.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const double b = std::round((color.at(c, y, x) + 1.0) * 127.5);
        row[x][2 - c] = static_cast<std::uint8_t>(std::clamp(b, 0.0, 255.0));
      }
    }
  }
  write_image(color_path, img);
}

void save_depth(const DepthMap& depth, const std::filesystem::path& depth_path,
                const DepthRange& range) {
  check_range(range);
  cv::Mat img(depth.height(), depth.width(), CV_16UC1);
  for (int y = 0; y < depth.height(); ++y) {
    auto* row = img.ptr<std::uint16_t>(y);
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.is_valid(y, x)) {
        row[x] = 0;
        continue;
      }
      const double mm = std::round(depth_mm_from_normalized(depth.at(y, x), range));
      row[x] = static_cast<std::uint16_t>(std::clamp(mm, std::max(1.0, range.near_mm), range.far_mm));
    }
  }
  write_image(depth_path, img);
}

void save_rgbd(const RgbdFrame& frame, const std::filesystem::path& color_path,
               const std::filesystem::path& depth_path, const DepthRange& range) {
  if (!frame.color.same_extent(frame.depth.values)) {
    fail(ErrorCode::kShape, "color and depth rasters differ in size");
  }
  save_color(frame.color, color_path);
  save_depth(frame.depth, depth_path, range);
}

}  // namespace flowrt
