// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowrt/raster.hpp"

namespace flowrt {

enum class DType { kFloat32, kFloat64 };

/// Dense little-endian tensor. On disk:
///   "FRTT" | uint32 header length | JSON header | payload
/// where the header is {"dtype": "float32"|"float64", "shape": [...],
/// "layout": "..."} and the payload holds prod(shape) values in row-major
/// order. Layouts in use: "CHW" feature maps and masks, "HW" single-channel
/// rasters, "MCHW" depth dictionaries, "NL" latent dictionaries, "L"
/// vectors.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::string layout;
  DType dtype = DType::kFloat64;
  std::vector<double> data;

  std::size_t element_count() const;
};

std::vector<std::byte> encode_tensor(const Tensor& t);
Tensor parse_tensor(std::span<const std::byte> bytes, const std::string& source = "<tensor>");
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

Tensor tensor_from(const FeatureMap& map, DType dtype = DType::kFloat64);
Tensor tensor_from(std::span<const double> vec, DType dtype = DType::kFloat64);

/// Accepts "CHW" or "HW" tensors.
FeatureMap to_feature_map(const Tensor& t);
/// Accepts "MCHW" tensors, one map per leading index.
std::vector<FeatureMap> to_feature_maps(const Tensor& t);
/// Accepts "NL" tensors, one row per vector.
std::vector<std::vector<double>> to_rows(const Tensor& t);

}  // namespace flowrt
