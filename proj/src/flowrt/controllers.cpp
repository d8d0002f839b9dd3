// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <tuple>

#include <Eigen/Geometry>

#include "flowrt/error.hpp"
#include "flowrt/geodesic.hpp"
#include "flowrt/parallel.hpp"

namespace flowrt {

WeightMatrix::WeightMatrix(std::vector<std::vector<Entry>> rows) {
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  for (auto& r : rows) {
    entries_.insert(entries_.end(), r.begin(), r.end());
    offsets_.push_back(entries_.size());
  }
}

const char* to_string(DistanceMetric metric) {
  return metric == DistanceMetric::kGeodesic ? "geodesic" : "euclidean";
}

DistanceMetric distance_metric_from_string(const std::string& s) {
  if (s == "geodesic") return DistanceMetric::kGeodesic;
  if (s == "euclidean") return DistanceMetric::kEuclidean;
  fail(ErrorCode::kInvalidArgument, "unknown distance metric '" + s + "'");
}

std::vector<Landmark> landmarks_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::kFormat, "landmark file must hold a JSON array");
  std::vector<Landmark> out;
  out.reserve(j.size());
  try {
    for (const auto& item : j) {
      Landmark lm;
      const auto& id = item.at("id");
      lm.id = id.is_string() ? id.get<std::string>() : id.dump();
      lm.x_px = item.at("x_px").get<double>();
      lm.y_px = item.at("y_px").get<double>();
      if (!std::isfinite(lm.x_px) || !std::isfinite(lm.y_px)) {
        fail(ErrorCode::kNumeric, "landmark " + lm.id + " has non-finite position");
      }
      out.push_back(std::move(lm));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("landmark json: ") + e.what());
  }
  return out;
}

std::vector<Landmark> read_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open landmark file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return landmarks_from_json(j);
}

nlohmann::json landmarks_to_json(std::span<const Landmark> landmarks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& lm : landmarks) {
    arr.push_back({{"id", lm.id}, {"x_px", lm.x_px}, {"y_px", lm.y_px}});
  }
  return arr;
}

namespace {

struct Candidate {
  double dist;
  std::int32_t controller;

  bool operator<(const Candidate& o) const {
    return std::tie(dist, controller) < std::tie(o.dist, o.controller);
  }
};

// Keeps the k best (distance, index) pairs in ascending order.
void offer(std::vector<Candidate>& best, std::size_t k, Candidate c) {
  if (!std::isfinite(c.dist)) return;
  if (best.size() == k && !(c < best.back())) return;
  best.insert(std::upper_bound(best.begin(), best.end(), c), c);
  if (best.size() > k) best.pop_back();
}

}  // namespace

WeightReport compute_controlling_weights(const Mesh& mesh, ControllerSet& set,
                                         const WeightOptions& options) {
  if (set.controllers.empty()) {
    fail(ErrorCode::kInvalidArgument, "cannot compute weights without controllers");
  }
  if (options.k == 0) fail(ErrorCode::kInvalidArgument, "k must be at least 1");
  mesh.validate();
  const std::size_t nv = mesh.vertices.size();
  for (const auto& c : set.controllers) {
    if (c.vertex < 0 || static_cast<std::size_t>(c.vertex) >= nv) {
      fail(ErrorCode::kInvalidArgument,
           "controller " + c.id + " is bound to missing vertex " + std::to_string(c.vertex));
    }
  }

  const std::size_t k = std::min(options.k, set.controllers.size());
  std::optional<EdgeGraph> graph;
  if (options.metric == DistanceMetric::kGeodesic) graph = EdgeGraph::from_mesh(mesh);

  WeightReport report;
  std::vector<std::vector<Candidate>> best(nv);
  // Fields are computed a batch at a time and merged in controller order,
  // which keeps the result independent of the worker count.
  const std::size_t batch = std::max<std::size_t>(1, options.workers) * 4;
  std::vector<std::vector<double>> fields(batch);
  for (std::size_t start = 0; start < set.controllers.size(); start += batch) {
    const std::size_t count = std::min(batch, set.controllers.size() - start);
    parallel_for(count, options.workers, [&](std::size_t b) {
      const auto& ctrl = set.controllers[start + b];
      if (graph) {
        fields[b] = geodesic_distances(*graph, ctrl.vertex).dist;
      } else {
        fields[b] = euclidean_distances(mesh, mesh.vertices[ctrl.vertex]);
      }
    });
    for (std::size_t b = 0; b < count; ++b) {
      const auto j = static_cast<std::int32_t>(start + b);
      for (std::size_t v = 0; v < nv; ++v) {
        const double d = fields[b][v];
        if (!std::isfinite(d)) ++report.unreachable_pairs;
        offer(best[v], k, {d, j});
      }
    }
  }

  std::vector<std::vector<WeightMatrix::Entry>> rows(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& cand = best[v];
    auto& row = rows[v];
    if (cand.empty()) {
      ++report.zero_rows;
      continue;
    }
    if (cand.front().dist == 0.0) {
      row.push_back({cand.front().controller, 1.0});
      continue;
    }
    double total = 0.0;
    for (const auto& c : cand) {
      const double raw = 1.0 / (c.dist * c.dist);
      row.push_back({c.controller, raw});
      total += raw;
    }
    for (auto& e : row) e.weight /= total;
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.controller < b.controller; });
  }
  set.weights = WeightMatrix(std::move(rows));
  return report;
}

Anchoring anchor_landmarks(const Mesh& mesh, const PerspectiveCamera& camera,
                           std::span<const Landmark> landmarks) {
  mesh.validate();
  const std::size_t nv = mesh.vertices.size();
  std::vector<PerspectiveCamera::Projection> proj(nv);
  std::vector<bool> in_front(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const Eigen::Vector4d clip = camera.projection() * mesh.vertices[v].homogeneous();
    in_front[v] = clip.w() > 0.0;
    if (in_front[v]) proj[v] = camera.project(mesh.vertices[v]);
  }

  auto covered = [&](const Vec2& p) {
    for (const auto& f : mesh.faces) {
      if (!in_front[f[0]] || !in_front[f[1]] || !in_front[f[2]]) continue;
      const Vec2& a = proj[f[0]].pixel;
      const Vec2& b = proj[f[1]].pixel;
      const Vec2& c = proj[f[2]].pixel;
      const double area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
      if (area == 0.0) continue;
      const double l1 = ((b - p).x() * (c - p).y() - (b - p).y() * (c - p).x()) / area;
      const double l2 = ((c - p).x() * (a - p).y() - (c - p).y() * (a - p).x()) / area;
      const double l3 = 1.0 - l1 - l2;
      constexpr double eps = -1e-9;
      if (l1 >= eps && l2 >= eps && l3 >= eps) return true;
    }
    return false;
  };

  Anchoring result;
  for (const auto& lm : landmarks) {
    const Vec2 p(lm.x_px, lm.y_px);
    if (p.x() < 0.0 || p.y() < 0.0 || p.x() > camera.width() - 1 || p.y() > camera.height() - 1 ||
        !covered(p)) {
      result.dropped.push_back(lm.id);
      continue;
    }
    std::int32_t best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_z = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < nv; ++v) {
      if (!in_front[v]) continue;
      const double d2 = (proj[v].pixel - p).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && proj[v].ndc_depth < best_z)) {
        best = static_cast<std::int32_t>(v);
        best_d2 = d2;
        best_z = proj[v].ndc_depth;
      }
    }
    result.set.controllers.push_back({lm.id, best, p, mesh.vertices[best]});
  }
  return result;
}

ControllerSet controllers_at_vertices(const Mesh& mesh,
                                      std::span<const std::int32_t> vertices,
                                      const PerspectiveCamera* camera) {
  ControllerSet set;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto v = vertices[i];
    if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size()) {
      fail(ErrorCode::kInvalidArgument, "controller vertex " + std::to_string(v) + " out of range");
    }
    Controller c;
    c.id = std::to_string(i);
    c.vertex = v;
    c.rest_position = mesh.vertices[v];
    if (camera) c.rest_pixel = camera->project(c.rest_position).pixel;
    set.controllers.push_back(std::move(c));
  }
  return set;
}

nlohmann::json controllers_to_json(const ControllerSet& set) {
  nlohmann::json ctrl = nlohmann::json::array();
  for (const auto& c : set.controllers) {
    ctrl.push_back({{"id", c.id},
                    {"vertex", c.vertex},
                    {"rest_pixel", {c.rest_pixel.x(), c.rest_pixel.y()}},
                    {"rest_position",
                     {c.rest_position.x(), c.rest_position.y(), c.rest_position.z()}}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t v = 0; v < set.weights.rows(); ++v) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& e : set.weights.row(v)) row.push_back({e.controller, e.weight});
    rows.push_back(std::move(row));
  }
  return {{"controllers", ctrl}, {"vertex_count", set.weights.rows()}, {"weights", rows}};
}

ControllerSet controllers_from_json(const nlohmann::json& j, std::size_t vertex_count) {
  ControllerSet set;
  try {
    for (const auto& c : j.at("controllers")) {
      Controller ctrl;
      ctrl.id = c.at("id").get<std::string>();
      ctrl.vertex = c.at("vertex").get<std::int32_t>();
      const auto& px = c.at("rest_pixel");
      const auto& pos = c.at("rest_position");
      ctrl.rest_pixel = {px.at(0).get<double>(), px.at(1).get<double>()};
      ctrl.rest_position = {pos.at(0).get<double>(), pos.at(1).get<double>(),
                            pos.at(2).get<double>()};
      if (ctrl.vertex < 0 || static_cast<std::size_t>(ctrl.vertex) >= vertex_count) {
        fail(ErrorCode::kTopology, "controller " + ctrl.id + " vertex out of range");
      }
      set.controllers.push_back(std::move(ctrl));
    }
    const auto& rows = j.at("weights");
    if (rows.size() != vertex_count) {
      fail(ErrorCode::kShape, "weight file has " + std::to_string(rows.size()) +
                                  " rows but the mesh has " + std::to_string(vertex_count) +
                                  " vertices");
    }
    std::vector<std::vector<WeightMatrix::Entry>> entries(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) {
      for (const auto& e : rows[v]) {
        const auto ctrl = e.at(0).get<std::int32_t>();
        const auto w = e.at(1).get<double>();
        if (ctrl < 0 || static_cast<std::size_t>(ctrl) >= set.controllers.size()) {
          fail(ErrorCode::kFormat, "weight row " + std::to_string(v) +
                                       " references unknown controller " + std::to_string(ctrl));
        }
        if (!(w >= 0.0) || !std::isfinite(w)) {
          fail(ErrorCode::kNumeric, "weight row " + std::to_string(v) + " has an invalid weight");
        }
        entries[v].push_back({ctrl, w});
      }
    }
    set.weights = WeightMatrix(std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("weight json: ") + e.what());
  }
  return set;
}

}  // namespace flowrt
