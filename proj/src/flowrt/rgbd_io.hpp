// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "flowrt/raster.hpp"

namespace flowrt {

/// Linear depth normalization: millimetres in [near_mm, far_mm] map to
/// [-1, 1] with clamping; a raw zero is a sensor hole and marked invalid
/// (stored as +1, the far plane).
struct DepthRange {
  double near_mm = 300.0;
  double far_mm = 1500.0;
};

/// Color: 8-bit 3-channel PNG (RGB order in memory), bytes 0..255 -> [-1, 1].
/// Depth: 16-bit single-channel PNG in millimetres.
RgbdFrame load_rgbd(const std::filesystem::path& color_path,
                    const std::filesystem::path& depth_path, const DepthRange& range);
DepthMap load_depth(const std::filesystem::path& depth_path, const DepthRange& range);
FeatureMap load_color(const std::filesystem::path& color_path);

/// Inverse of the loaders, rounding to the nearest code.
void save_rgbd(const RgbdFrame& frame, const std::filesystem::path& color_path,
               const std::filesystem::path& depth_path, const DepthRange& range);
void save_depth(const DepthMap& depth, const std::filesystem::path& depth_path,
                const DepthRange& range);
void save_color(const FeatureMap& color, const std::filesystem::path& color_path);

double normalize_depth_mm(double mm, const DepthRange& range);
double depth_mm_from_normalized(double value, const DepthRange& range);

}  // namespace flowrt
