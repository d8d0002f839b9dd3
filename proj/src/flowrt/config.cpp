// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/config.hpp"

#include <fstream>
#include <set>

#include "flowrt/error.hpp"

namespace flowrt {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      fail(ErrorCode::kFormat, "unknown config key '" + where + key + "'");
    }
  }
}

std::filesystem::path resolve(const nlohmann::json& value, const std::filesystem::path& base) {
  if (value.is_null()) return {};
  std::filesystem::path p = value.get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p.lexically_normal();
  return (base / p).lexically_normal();
}

std::string path_text(const std::filesystem::path& p) { return p.generic_string(); }

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  if (!j.is_object()) fail(ErrorCode::kFormat, "config must be a JSON object");
  try {
    reject_unknown(j,
                   {"paths", "k_nearest", "distance_metric", "depth_dictionary_size",
                    "loss_weights", "depth_normalization", "workers"},
                   "");
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      reject_unknown(p,
                     {"mesh", "camera", "landmarks", "source_depth", "frame_dir", "flow_dir",
                      "output_dir", "weights"},
                     "paths.");
      auto get = [&](const char* key) {
        return p.contains(key) ? resolve(p[key], base_dir) : std::filesystem::path();
      };
      cfg.paths.mesh = get("mesh");
      cfg.paths.camera = get("camera");
      cfg.paths.landmarks = get("landmarks");
      cfg.paths.source_depth = get("source_depth");
      cfg.paths.frame_dir = get("frame_dir");
      cfg.paths.flow_dir = get("flow_dir");
      cfg.paths.output_dir = get("output_dir");
      cfg.paths.weights = get("weights");
    }
    if (j.contains("k_nearest")) {
      const auto k = j["k_nearest"].get<long long>();
      if (k < 1) fail(ErrorCode::kInvalidArgument, "k_nearest must be at least 1");
      cfg.k_nearest = static_cast<std::size_t>(k);
    }
    if (j.contains("distance_metric")) {
      cfg.metric = distance_metric_from_string(j["distance_metric"].get<std::string>());
    }
    if (j.contains("depth_dictionary_size")) {
      const auto m = j["depth_dictionary_size"].get<long long>();
      if (m < 0) fail(ErrorCode::kInvalidArgument, "depth_dictionary_size must be >= 0");
      cfg.depth_dictionary_size = static_cast<std::size_t>(m);
    }
    if (j.contains("loss_weights")) {
      const auto& w = j["loss_weights"];
      reject_unknown(w, {"rec", "sm", "sp"}, "loss_weights.");
      cfg.loss_weights.rec = w.value("rec", cfg.loss_weights.rec);
      cfg.loss_weights.sm = w.value("sm", cfg.loss_weights.sm);
      cfg.loss_weights.sp = w.value("sp", cfg.loss_weights.sp);
    }
    if (j.contains("depth_normalization")) {
      const auto& d = j["depth_normalization"];
      reject_unknown(d, {"near_mm", "far_mm"}, "depth_normalization.");
      cfg.depth_range.near_mm = d.value("near_mm", cfg.depth_range.near_mm);
      cfg.depth_range.far_mm = d.value("far_mm", cfg.depth_range.far_mm);
    }
    if (j.contains("workers")) {
      const auto w = j["workers"].get<long long>();
      if (w < 1 || w > 1024) fail(ErrorCode::kInvalidArgument, "workers must be in [1, 1024]");
      cfg.workers = static_cast<unsigned>(w);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json RunConfig::to_json() const {
  auto opt = [](const std::filesystem::path& p) -> nlohmann::json {
    if (p.empty()) return nullptr;
    return path_text(p);
  };
  return {
      {"paths",
       {{"mesh", opt(paths.mesh)},
        {"camera", opt(paths.camera)},
        {"landmarks", opt(paths.landmarks)},
        {"source_depth", opt(paths.source_depth)},
        {"frame_dir", opt(paths.frame_dir)},
        {"flow_dir", opt(paths.flow_dir)},
        {"output_dir", opt(paths.output_dir)},
        {"weights", opt(paths.weights)}}},
      {"k_nearest", k_nearest},
      {"distance_metric", to_string(metric)},
      {"depth_dictionary_size", depth_dictionary_size},
      {"loss_weights", {{"rec", loss_weights.rec}, {"sm", loss_weights.sm}, {"sp", loss_weights.sp}}},
      {"depth_normalization", {{"near_mm", depth_range.near_mm}, {"far_mm", depth_range.far_mm}}},
      {"workers", workers},
  };
}

void RunConfig::validate() const {
  if (k_nearest < 1) fail(ErrorCode::kInvalidArgument, "k_nearest must be at least 1");
  if (!(depth_range.near_mm < depth_range.far_mm)) {
    fail(ErrorCode::kInvalidArgument, "depth_normalization: near_mm must be less than far_mm");
  }
  if (!(loss_weights.rec >= 0 && loss_weights.sm >= 0 && loss_weights.sp >= 0)) {
    fail(ErrorCode::kInvalidArgument, "loss weights must be non-negative");
  }
  if (workers < 1) fail(ErrorCode::kInvalidArgument, "workers must be at least 1");
}

}  // namespace flowrt
