// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flowrt {

/// Channels x height x width raster, channel-major (CHW) storage.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  bool same_shape(const FeatureMap& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }
  bool same_extent(const FeatureMap& o) const {
    return height_ == o.height_ && width_ == o.width_;
  }
  bool all_finite() const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Bilinear sample of channel c at continuous (x, y); pixel centers sit on
/// integer coordinates and coordinates outside the raster clamp to the edge.
double sample_bilinear(const FeatureMap& map, int c, double x, double y);

/// Dense 2D displacement field in pixels; channel 0 is dx, channel 1 is dy.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int height, int width) : map_(2, height, width) {}
  explicit FlowField(FeatureMap map);

  int height() const { return map_.height(); }
  int width() const { return map_.width(); }
  double& dx(int y, int x) { return map_.at(0, y, x); }
  double& dy(int y, int x) { return map_.at(1, y, x); }
  double dx(int y, int x) const { return map_.at(0, y, x); }
  double dy(int y, int x) const { return map_.at(1, y, x); }

  const FeatureMap& map() const { return map_; }
  FeatureMap& map() { return map_; }

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  FeatureMap map_;
};

/// Single-channel depth raster in normalized units with a validity mask
/// (sensor zeros are invalid).
struct DepthMap {
  FeatureMap values;
  std::vector<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(int height, int width, double fill = 0.0)
      : values(1, height, width, fill),
        valid(static_cast<std::size_t>(height) * width, 1) {}

  int height() const { return values.height(); }
  int width() const { return values.width(); }
  double at(int y, int x) const { return values.at(0, y, x); }
  bool is_valid(int y, int x) const {
    return valid[static_cast<std::size_t>(y) * width() + x] != 0;
  }
};

/// Color (3 x H x W) and depth (1 x H x W) in [-1, 1].
struct RgbdFrame {
  FeatureMap color;
  DepthMap depth;
};

}  // namespace flowrt
