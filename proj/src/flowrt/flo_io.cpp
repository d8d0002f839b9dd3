// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/flo_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "flowrt/error.hpp"

namespace flowrt {

static_assert(std::endian::native == std::endian::little,
              ".flo and tensor codecs assume a little-endian host");

namespace {

template <typename T>
T load(std::span<const std::byte> bytes, std::size_t offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<std::byte>& out, T v) {
  const auto* p = reinterpret_cast<const std::byte*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

}  // namespace

FlowField parse_flo(std::span<const std::byte> bytes, const std::string& source) {
  constexpr std::size_t kHeader = 12;
  if (bytes.size() < 4 || load<float>(bytes, 0) != kFloMagic) {
    fail(ErrorCode::kFormat, source + ": not a .flo file");
  }
  if (bytes.size() < kHeader) {
    fail(ErrorCode::kFormat, source + ": truncated header: expected " + std::to_string(kHeader) +
                                 " bytes, got " + std::to_string(bytes.size()));
  }
  const auto w = load<std::int32_t>(bytes, 4);
  const auto h = load<std::int32_t>(bytes, 8);
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20)) {
    fail(ErrorCode::kFormat, source + ": implausible size " + std::to_string(w) + "x" +
                                 std::to_string(h));
  }
  const std::size_t expected =
      kHeader + static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 2 * sizeof(float);
  if (bytes.size() != expected) {
    fail(ErrorCode::kFormat, source + ": truncated payload: expected " + std::to_string(expected) +
                                 " bytes, got " + std::to_string(bytes.size()));
  }
  FlowField flow(h, w);
  std::size_t off = kHeader;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      flow.dx(y, x) = load<float>(bytes, off);
      flow.dy(y, x) = load<float>(bytes, off + 4);
      off += 8;
    }
  }
  return flow;
}

std::vector<std::byte> encode_flo(const FlowField& flow) {
  std::vector<std::byte> out;
  out.reserve(12 + static_cast<std::size_t>(flow.width()) * flow.height() * 8);
  out.insert(out.end(), {std::byte{'P'}, std::byte{'I'}, std::byte{'E'}, std::byte{'H'}});
  store<std::int32_t>(out, flow.width());
  store<std::int32_t>(out, flow.height());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      store<float>(out, static_cast<float>(flow.dx(y, x)));
      store<float>(out, static_cast<float>(flow.dy(y, x)));
    }
  }
  return out;
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open flow file " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_flo(std::as_bytes(std::span(raw)), path.string());
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  const auto bytes = encode_flo(flow);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write flow file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace flowrt
