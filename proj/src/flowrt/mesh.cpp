// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowrt/error.hpp"

namespace flowrt {

void Mesh::validate() const {
  const auto n = static_cast<std::int64_t>(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) {
      fail(ErrorCode::kNumeric,
           "vertex " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    for (auto idx : face) {
      if (idx < 0 || idx >= n) {
        fail(ErrorCode::kTopology, "face " + std::to_string(f) +
                                       " references vertex " +
                                       std::to_string(idx) + " but mesh has " +
                                       std::to_string(n) + " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      fail(ErrorCode::kTopology,
           "face " + std::to_string(f) + " is degenerate (repeated index)");
    }
  }
}

namespace {

std::int64_t parse_index_token(const std::string& token, std::size_t line_no,
                               const std::string& source) {
  // "a", "a/b", "a//c", "a/b/c": only the position index matters.
  const auto slash = token.find('/');
  const std::string head = token.substr(0, slash);
  std::int64_t value = 0;
  const auto* first = head.data();
  const auto* last = head.data() + head.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || value == 0) {
    fail(ErrorCode::kFormat, source + ":" + std::to_string(line_no) +
                                 ": bad face index '" + token + "'");
  }
  return value;
}

}  // namespace

Mesh parse_obj(std::istream& in, const std::string& source_name) {
  Mesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        fail(ErrorCode::kFormat, source_name + ":" + std::to_string(line_no) +
                                     ": vertex needs three coordinates");
      }
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (tokens.size() != 3) {
        fail(ErrorCode::kFormat,
             source_name + ":" + std::to_string(line_no) + ": face with " +
                 std::to_string(tokens.size()) +
                 " corners; only triangles are supported");
      }
      Face face{};
      const auto nv = static_cast<std::int64_t>(mesh.vertices.size());
      for (int c = 0; c < 3; ++c) {
        const std::int64_t raw = parse_index_token(tokens[c], line_no, source_name);
        const std::int64_t idx = raw > 0 ? raw - 1 : nv + raw;
        face[c] = static_cast<std::int32_t>(idx);
      }
      mesh.faces.push_back(face);
    }
    // vt, vn, g, o, s, usemtl, mtllib: not needed for deformation
  }
  mesh.validate();
  return mesh;
}

Mesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open mesh file " + path.string());
  return parse_obj(in, path.string());
}

std::string format_obj(const Mesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.faces.size() * 24);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    const int n = std::snprintf(buf, sizeof(buf), "v %.6f %.6f %.6f\n", v.x(),
                                v.y(), v.z());
    out.append(buf, static_cast<std::size_t>(n));
  }
  for (const auto& f : mesh.faces) {
    const int n = std::snprintf(buf, sizeof(buf), "f %d %d %d\n", f[0] + 1,
                                f[1] + 1, f[2] + 1);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write mesh file " + path.string());
  const std::string text = format_obj(mesh);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace flowrt
