// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace flowrt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Face = std::array<std::int32_t, 3>;

/// Triangle mesh: vertex positions in world units plus index triples.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  /// Throws Error(kTopology) on out-of-range or repeated face indices and
  /// Error(kNumeric) on non-finite coordinates.
  void validate() const;
};

/// Parses Wavefront OBJ text. Only `v` and `f` records are used; texture
/// and normal references in face tokens are ignored, negative (relative)
/// indices are resolved. Faces with more than three corners are rejected.
Mesh parse_obj(std::istream& in, const std::string& source_name = "<obj>");
Mesh read_obj(const std::filesystem::path& path);

/// Vertices are printed with six decimals, faces with 1-based indices.
std::string format_obj(const Mesh& mesh);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace flowrt
