// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/raster.hpp"

#include <algorithm>
#include <cmath>

#include "flowrt/error.hpp"

namespace flowrt {

FeatureMap::FeatureMap(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    fail(ErrorCode::kShape, "raster dimensions must be non-negative");
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

bool FeatureMap::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double sample_bilinear(const FeatureMap& map, int c, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(map.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(map.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, map.width() - 1);
  const int y1 = std::min(y0 + 1, map.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  // a + t (b - a) keeps constants exact; t == 0 returns the sample itself
  // so integer positions reproduce the input bit for bit.
  auto lerp = [](double a, double b, double t) { return t == 0.0 ? a : a + t * (b - a); };
  const double top = lerp(map.at(c, y0, x0), map.at(c, y0, x1), fx);
  if (fy == 0.0) return top;
  const double bottom = lerp(map.at(c, y1, x0), map.at(c, y1, x1), fx);
  return lerp(top, bottom, fy);
}

FlowField::FlowField(FeatureMap map) : map_(std::move(map)) {
  if (map_.channels() != 2) {
    fail(ErrorCode::kShape, "flow field needs exactly two channels (dx, dy)");
  }
}

}  // namespace flowrt
