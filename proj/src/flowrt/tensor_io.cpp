// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

#include "flowrt/error.hpp"

namespace flowrt {

namespace {

constexpr char kMagic[4] = {'F', 'R', 'T', 'T'};

const char* dtype_name(DType d) { return d == DType::kFloat32 ? "float32" : "float64"; }

std::size_t dtype_size(DType d) { return d == DType::kFloat32 ? 4 : 8; }

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::vector<std::byte> encode_tensor(const Tensor& t) {
  if (t.data.size() != t.element_count()) {
    fail(ErrorCode::kShape, "tensor data does not match its shape");
  }
  const nlohmann::json header = {
      {"dtype", dtype_name(t.dtype)}, {"shape", t.shape}, {"layout", t.layout}};
  const std::string text = header.dump();
  std::vector<std::byte> out;
  out.reserve(8 + text.size() + t.data.size() * dtype_size(t.dtype));
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  const auto len = static_cast<std::uint32_t>(text.size());
  const auto* lp = reinterpret_cast<const std::byte*>(&len);
  out.insert(out.end(), lp, lp + 4);
  for (char c : text) out.push_back(static_cast<std::byte>(c));
  for (double v : t.data) {
    if (t.dtype == DType::kFloat32) {
      const auto f = static_cast<float>(v);
      const auto* p = reinterpret_cast<const std::byte*>(&f);
      out.insert(out.end(), p, p + 4);
    } else {
      const auto* p = reinterpret_cast<const std::byte*>(&v);
      out.insert(out.end(), p, p + 8);
    }
  }
  return out;
}

Tensor parse_tensor(std::span<const std::byte> bytes, const std::string& source) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::kFormat, source + ": not a tensor file");
  }
  std::uint32_t len;
  std::memcpy(&len, bytes.data() + 4, 4);
  if (bytes.size() < 8 + static_cast<std::size_t>(len)) {
    fail(ErrorCode::kFormat, source + ": truncated tensor header");
  }
  Tensor t;
  try {
    const auto header = nlohmann::json::parse(
        std::string(reinterpret_cast<const char*>(bytes.data() + 8), len));
    const auto dtype = header.at("dtype").get<std::string>();
    if (dtype == "float32") {
      t.dtype = DType::kFloat32;
    } else if (dtype == "float64") {
      t.dtype = DType::kFloat64;
    } else {
      fail(ErrorCode::kFormat, source + ": unsupported dtype '" + dtype + "'");
    }
    t.shape = header.at("shape").get<std::vector<std::int64_t>>();
    t.layout = header.value("layout", std::string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, source + ": bad tensor header: " + e.what());
  }
  for (auto s : t.shape) {
    if (s < 0) fail(ErrorCode::kFormat, source + ": negative dimension");
  }
  if (!t.layout.empty() && t.layout.size() != t.shape.size()) {
    fail(ErrorCode::kFormat, source + ": layout '" + t.layout + "' does not match rank " +
                                 std::to_string(t.shape.size()));
  }
  const std::size_t n = t.element_count();
  const std::size_t expected = 8 + len + n * dtype_size(t.dtype);
  if (bytes.size() != expected) {
    fail(ErrorCode::kFormat, source + ": expected " + std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
  }
  t.data.resize(n);
  const std::byte* p = bytes.data() + 8 + len;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.dtype == DType::kFloat32) {
      float f;
      std::memcpy(&f, p + 4 * i, 4);
      t.data[i] = f;
    } else {
      std::memcpy(&t.data[i], p + 8 * i, 8);
    }
  }
  return t;
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open tensor file " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_tensor(std::as_bytes(std::span(raw)), path.string());
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write tensor file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

Tensor tensor_from(const FeatureMap& map, DType dtype) {
  Tensor t;
  t.shape = {map.channels(), map.height(), map.width()};
  t.layout = "CHW";
  t.dtype = dtype;
  t.data.assign(map.data().begin(), map.data().end());
  return t;
}

Tensor tensor_from(std::span<const double> vec, DType dtype) {
  Tensor t;
  t.shape = {static_cast<std::int64_t>(vec.size())};
  t.layout = "L";
  t.dtype = dtype;
  t.data.assign(vec.begin(), vec.end());
  return t;
}

FeatureMap to_feature_map(const Tensor& t) {
  int c = 1, h = 0, w = 0;
  if (t.shape.size() == 3 && (t.layout.empty() || t.layout == "CHW")) {
    c = static_cast<int>(t.shape[0]);
    h = static_cast<int>(t.shape[1]);
    w = static_cast<int>(t.shape[2]);
  } else if (t.shape.size() == 2 && (t.layout.empty() || t.layout == "HW")) {
    h = static_cast<int>(t.shape[0]);
    w = static_cast<int>(t.shape[1]);
  } else {
    fail(ErrorCode::kShape, "expected a CHW or HW tensor, got layout '" + t.layout + "'");
  }
  FeatureMap m(c, h, w);
  std::copy(t.data.begin(), t.data.end(), m.data().begin());
  return m;
}

std::vector<FeatureMap> to_feature_maps(const Tensor& t) {
  if (t.shape.size() != 4 || !(t.layout.empty() || t.layout == "MCHW")) {
    fail(ErrorCode::kShape, "expected an MCHW tensor, got layout '" + t.layout + "'");
  }
  const auto m = static_cast<std::size_t>(t.shape[0]);
  const int c = static_cast<int>(t.shape[1]);
  const int h = static_cast<int>(t.shape[2]);
  const int w = static_cast<int>(t.shape[3]);
  std::vector<FeatureMap> out;
  const std::size_t per = static_cast<std::size_t>(c) * h * w;
  for (std::size_t j = 0; j < m; ++j) {
    FeatureMap map(c, h, w);
    std::copy(t.data.begin() + j * per, t.data.begin() + (j + 1) * per, map.data().begin());
    out.push_back(std::move(map));
  }
  return out;
}

std::vector<std::vector<double>> to_rows(const Tensor& t) {
  if (t.shape.size() != 2 || !(t.layout.empty() || t.layout == "NL")) {
    fail(ErrorCode::kShape, "expected an NL tensor, got layout '" + t.layout + "'");
  }
  const auto n = static_cast<std::size_t>(t.shape[0]);
  const auto l = static_cast<std::size_t>(t.shape[1]);
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].assign(t.data.begin() + i * l, t.data.begin() + (i + 1) * l);
  }
  return rows;
}

}  // namespace flowrt
