// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

// Oracles and generators shared by the unit and acceptance tests. Oracles
// are deliberately naive and use nothing from the library but plain data.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "flowrt/camera.hpp"
#include "flowrt/geodesic.hpp"
#include "flowrt/mesh.hpp"
#include "flowrt/raster.hpp"

namespace flowrt::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Fresh, empty scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("flowrt_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

// All-pairs shortest paths, O(V^3).
inline std::vector<std::vector<double>> floyd_warshall(std::size_t n,
                                                       std::span<const EdgeGraph::Edge> edges,
                                                       std::span<const double> lengths) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    d[a][b] = std::min(d[a][b], lengths[e]);
    d[b][a] = std::min(d[b][a], lengths[e]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = d[i][k] + d[k][j];
        if (via < d[i][j]) d[i][j] = via;
      }
    }
  }
  return d;
}

// Edge set of a face list, each undirected edge once, sorted.
inline std::vector<EdgeGraph::Edge> mesh_edges(const Mesh& mesh) {
  std::set<std::pair<int, int>> seen;
  for (const auto& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      int a = f[i], b = f[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      seen.emplace(a, b);
    }
  }
  std::vector<EdgeGraph::Edge> out;
  for (const auto& [a, b] : seen) out.push_back({a, b});
  return out;
}

// Jittered grid with random holes; retried until the edge graph is
// connected. At most `max_vertices` vertices.
inline Mesh random_connected_mesh(std::mt19937_64& rng, int max_vertices = 200) {
  std::uniform_int_distribution<int> side(3, 14);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::bernoulli_distribution drop(0.15);
  for (;;) {
    const int cols = side(rng);
    const int rows = std::max(2, std::min(side(rng), max_vertices / cols));
    Mesh m;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m.vertices.emplace_back(c + jitter(rng), r + jitter(rng), jitter(rng));
    }
    for (int r = 0; r + 1 < rows; ++r) {
      for (int c = 0; c + 1 < cols; ++c) {
        const int v = r * cols + c;
        if (!drop(rng)) m.faces.push_back({v, v + 1, v + cols + 1});
        if (!drop(rng)) m.faces.push_back({v, v + cols + 1, v + cols});
      }
    }
    // Drop vertices no face uses, then require one component.
    std::vector<int> remap(m.vertices.size(), -1);
    Mesh packed;
    for (auto& f : m.faces) {
      for (auto& i : f) {
        if (remap[i] < 0) {
          remap[i] = static_cast<int>(packed.vertices.size());
          packed.vertices.push_back(m.vertices[i]);
        }
        i = remap[i];
      }
      packed.faces.push_back(f);
    }
    if (packed.vertices.size() < 3) continue;
    if (EdgeGraph::from_mesh(packed).component_count() == 1) return packed;
  }
}

// Bilinear sample with clamp-to-edge, written out longhand.
inline double bilinear_oracle(const FeatureMap& m, int c, double x, double y) {
  const double cx = std::clamp(x, 0.0, double(m.width() - 1));
  const double cy = std::clamp(y, 0.0, double(m.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, m.width() - 1);
  const int y1 = std::min(y0 + 1, m.height() - 1);
  const double fx = cx - x0, fy = cy - y0;
  return (1 - fx) * (1 - fy) * m.at(c, y0, x0) + fx * (1 - fy) * m.at(c, y0, x1) +
         (1 - fx) * fy * m.at(c, y1, x0) + fx * fy * m.at(c, y1, x1);
}

// Camera looking down -z from the origin with vertical field of view
// `fov_y`: the world point through `pixel` whose projected NDC depth equals
// `ndc_depth`, found by marching along the viewing ray and bisecting the
// crossing. Only camera.project() is used.
inline Vec3 ray_march_oracle(const PerspectiveCamera& cam, double fov_y, const Vec2& pixel,
                             double ndc_depth) {
  const double aspect = double(cam.width()) / cam.height();
  const double t = std::tan(0.5 * fov_y);
  const double xn = 2.0 * pixel.x() / cam.width() - 1.0;
  const double yn = 1.0 - 2.0 * pixel.y() / cam.height();
  const Vec3 dir(xn * t * aspect, yn * t, -1.0);
  auto depth_at = [&](double s) { return cam.project(s * dir).ndc_depth; };
  const double n = cam.near_plane(), f = cam.far_plane();
  const int steps = 4000;
  double lo = n, hi = f;
  double prev = n;
  for (int i = 1; i <= steps; ++i) {
    const double s = n + (f - n) * i / steps;
    if (depth_at(s) >= ndc_depth) {
      lo = prev;
      hi = s;
      break;
    }
    prev = s;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (depth_at(mid) < ndc_depth ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) * dir;
}

// 5-point Laplacian with replicate padding, one channel.
inline double laplacian_oracle(const FeatureMap& d, int y, int x) {
  auto at = [&](int yy, int xx) {
    return d.at(0, std::clamp(yy, 0, d.height() - 1), std::clamp(xx, 0, d.width() - 1));
  };
  return at(y, x + 1) + at(y, x - 1) + at(y + 1, x) + at(y - 1, x) - 4.0 * at(y, x);
}

// Structure loss by brute force: gradient magnitude at every q in the
// clipped window, max, squared difference, mean.
inline double structure_oracle(const FeatureMap& d, const FeatureMap& e, int window) {
  const int h = d.height(), w = d.width(), r = window / 2;
  auto grad = [&](const FeatureMap& m, int y, int x) {
    auto at = [&](int yy, int xx) { return m.at(0, std::clamp(yy, 0, h - 1), std::clamp(xx, 0, w - 1)); };
    const double gx = at(y, x + 1) - at(y, x - 1);
    const double gy = at(y + 1, x) - at(y - 1, x);
    return std::sqrt(gx * gx + gy * gy);
  };
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double md = 0.0, me = 0.0;
      for (int qy = std::max(0, y - r); qy <= std::min(h - 1, y + r); ++qy) {
        for (int qx = std::max(0, x - r); qx <= std::min(w - 1, x + r); ++qx) {
          md = std::max(md, grad(d, qy, qx));
          me = std::max(me, grad(e, qy, qx));
        }
      }
      sum += (md - me) * (md - me);
    }
  }
  return sum / (h * w);
}

inline FeatureMap random_map(std::mt19937_64& rng, int c, int h, int w, double lo = -1.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  FeatureMap m(c, h, w);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace flowrt::testing
