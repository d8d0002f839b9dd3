// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "flowrt/raster.hpp"

namespace flowrt {

// Middlebury .flo: float32 tag 202021.25 ("PIEH"), int32 width, int32
// height, then height*width interleaved (dx, dy) float32, all little-endian.
inline constexpr float kFloMagic = 202021.25f;

FlowField parse_flo(std::span<const std::byte> bytes, const std::string& source = "<flo>");
std::vector<std::byte> encode_flo(const FlowField& flow);

FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& flow, const std::filesystem::path& path);

}  // namespace flowrt
