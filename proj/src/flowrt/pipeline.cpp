// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>

#include "flowrt/camera.hpp"
#include "flowrt/error.hpp"
#include "flowrt/flo_io.hpp"
#include "flowrt/mesh.hpp"
#include "flowrt/parallel.hpp"
#include "flowrt/retarget.hpp"
#include "flowrt/tensor_io.hpp"
#include "flowrt/warp.hpp"

namespace flowrt {

namespace fs = std::filesystem;

namespace {

void require_path(const fs::path& p, const char* key) {
  if (p.empty()) fail(ErrorCode::kInvalidArgument, std::string("config is missing paths.") + key);
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string frame_name(const char* prefix, long index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%05ld%s", prefix, index, ext);
  return buf;
}

fs::path resolve(const nlohmann::json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return {};
  fs::path p = j[key].get<std::string>();
  if (p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

struct Weighted {
  ControllerSet set;
  nlohmann::json info;
};

Weighted prepare_controllers(const RunConfig& cfg, const Mesh& mesh,
                             const PerspectiveCamera& camera) {
  Weighted out;
  if (!cfg.paths.weights.empty()) {
    out.set = controllers_from_json(read_json(cfg.paths.weights), mesh.vertex_count());
    if (out.set.controllers.empty()) {
      fail(ErrorCode::kInvalidArgument, "weight file holds no controllers");
    }
    out.info = {{"source", "weight_file"}, {"controllers", out.set.size()}};
    return out;
  }
  require_path(cfg.paths.landmarks, "landmarks");
  const auto landmarks = read_landmarks(cfg.paths.landmarks);
  auto anchoring = anchor_landmarks(mesh, camera, landmarks);
  if (anchoring.set.controllers.empty()) {
    fail(ErrorCode::kInvalidArgument, "no landmark falls on the mesh; nothing to drive it");
  }
  const auto report = compute_controlling_weights(
      mesh, anchoring.set, {cfg.k_nearest, cfg.metric, cfg.workers});
  out.set = std::move(anchoring.set);
  out.info = {{"source", "landmarks"},
              {"controllers", out.set.size()},
              {"dropped_landmarks", anchoring.dropped},
              {"dropped_count", anchoring.dropped.size()},
              {"k_nearest", cfg.k_nearest},
              {"distance_metric", to_string(cfg.metric)},
              {"unreachable_pairs", report.unreachable_pairs},
              {"unweighted_vertices", report.zero_rows}};
  return out;
}

}  // namespace

std::map<long, fs::path> index_files(const fs::path& dir, const std::string& prefix,
                                     const std::string& extension) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "not a directory: " + dir.string());
  const std::regex pattern(std::regex_replace(prefix, std::regex(R"([.^$|()\[\]{}*+?\\])"),
                                              R"(\$&)") +
                           "([0-9]+)" +
                           std::regex_replace(extension, std::regex(R"([.^$|()\[\]{}*+?\\])"),
                                              R"(\$&)"));
  std::map<long, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    const long idx = std::stol(m[1].str());
    const auto [it, inserted] = out.emplace(idx, entry.path());
    if (!inserted) {
      fail(ErrorCode::kFormat, "frame " + std::to_string(idx) + ": ambiguous files " +
                                   it->second.filename().string() + " and " + name);
    }
  }
  return out;
}

std::vector<SequenceFrame> match_sequence(const fs::path& frame_dir, const fs::path& flow_dir) {
  const auto depths = index_files(frame_dir, "depth_", ".png");
  const auto flows = index_files(flow_dir, "flow_", ".flo");
  std::set<long> all;
  for (const auto& [i, _] : depths) all.insert(i);
  for (const auto& [i, _] : flows) all.insert(i);
  std::vector<SequenceFrame> frames;
  for (long i : all) {
    const auto d = depths.find(i);
    const auto f = flows.find(i);
    if (f == flows.end()) {
      fail(ErrorCode::kMissing, "frame " + std::to_string(i) + ": missing flow file " +
                                    (flow_dir / frame_name("flow_", i, ".flo")).string());
    }
    if (d == depths.end()) {
      fail(ErrorCode::kMissing, "frame " + std::to_string(i) + ": missing depth frame " +
                                    (frame_dir / frame_name("depth_", i, ".png")).string());
    }
    frames.push_back({i, d->second, f->second});
  }
  return frames;
}

nlohmann::json run_weights(const RunConfig& cfg, const fs::path& out) {
  require_path(cfg.paths.mesh, "mesh");
  require_path(cfg.paths.camera, "camera");
  const Mesh mesh = read_obj(cfg.paths.mesh);
  const auto camera = PerspectiveCamera::load(cfg.paths.camera);
  RunConfig fresh = cfg;
  fresh.paths.weights.clear();
  auto weighted = prepare_controllers(fresh, mesh, camera);
  nlohmann::json j = controllers_to_json(weighted.set);
  j["report"] = weighted.info;
  if (!out.empty()) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, j.dump() + "\n");
  }
  return weighted.info;
}

nlohmann::json run_retarget(const RunConfig& cfg) {
  cfg.validate();
  require_path(cfg.paths.mesh, "mesh");
  require_path(cfg.paths.camera, "camera");
  require_path(cfg.paths.source_depth, "source_depth");
  require_path(cfg.paths.frame_dir, "frame_dir");
  require_path(cfg.paths.flow_dir, "flow_dir");
  require_path(cfg.paths.output_dir, "output_dir");

  const Mesh mesh = read_obj(cfg.paths.mesh);
  const auto camera = PerspectiveCamera::load(cfg.paths.camera);
  const auto weighted = prepare_controllers(cfg, mesh, camera);
  const DepthMap source = load_depth(cfg.paths.source_depth, cfg.depth_range);
  if (source.width() != camera.width() || source.height() != camera.height()) {
    fail(ErrorCode::kShape, "source depth size does not match the camera");
  }
  const auto frames = match_sequence(cfg.paths.frame_dir, cfg.paths.flow_dir);
  fs::create_directories(cfg.paths.output_dir);

  std::vector<FrameDiagnostics> diags(frames.size());
  parallel_for(frames.size(), cfg.workers, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const FlowField flow = read_flo(f.flow);
      const DepthMap depth = load_depth(f.depth, cfg.depth_range);
      if (flow.width() != camera.width() || flow.height() != camera.height() ||
          depth.width() != camera.width() || depth.height() != camera.height()) {
        fail(ErrorCode::kShape, "resolution does not match the " + std::to_string(camera.width()) +
                                    "x" + std::to_string(camera.height()) + " camera");
      }
      auto result = retarget_frame(mesh, weighted.set, camera, {flow, source, depth});
      write_obj(result.mesh, cfg.paths.output_dir / frame_name("frame_", f.index, ".obj"));
      diags[i] = std::move(result.diagnostics);
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(f.index) + ": " + e.what());
    }
  });

  auto ids = [&](const std::vector<std::int32_t>& idx) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto j : idx) arr.push_back(weighted.set.controllers[j].id);
    return arr;
  };
  nlohmann::json frame_json = nlohmann::json::array();
  std::size_t inactive_total = 0, clamped_total = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& d = diags[i];
    inactive_total += d.inactive_controllers.size();
    clamped_total += d.clamped_controllers.size();
    frame_json.push_back({{"index", frames[i].index},
                          {"output", frame_name("frame_", frames[i].index, ".obj")},
                          {"inactive_controllers", ids(d.inactive_controllers)},
                          {"clamped_controllers", ids(d.clamped_controllers)},
                          {"renormalized_vertices", d.renormalized_vertices},
                          {"undeformed_vertices", d.undeformed_vertices}});
  }
  nlohmann::json diagnostics = {
      {"config", cfg.to_json()},
      {"camera", camera.to_json()},
      {"mesh", {{"vertices", mesh.vertex_count()}, {"faces", mesh.face_count()}}},
      {"controllers", weighted.info},
      {"frame_count", frames.size()},
      {"totals", {{"inactive_controllers", inactive_total}, {"clamped_controllers", clamped_total}}},
      {"frames", frame_json},
      {"run", {{"timestamp", utc_timestamp()}}},
  };
  write_text(cfg.paths.output_dir / "diagnostics.json", diagnostics.dump(2) + "\n");
  return diagnostics;
}

namespace {

DType parse_dtype(const nlohmann::json& req) {
  const auto s = req.value("dtype", std::string("float64"));
  if (s == "float64") return DType::kFloat64;
  if (s == "float32") return DType::kFloat32;
  fail(ErrorCode::kInvalidArgument, "unknown dtype '" + s + "'");
}

FlowField load_flow_any(const fs::path& p) {
  if (p.extension() == ".flo") return read_flo(p);
  return FlowField(to_feature_map(read_tensor(p)));
}

}  // namespace

nlohmann::json run_warp(const nlohmann::json& req, const fs::path& base) {
  try {
    const auto op = req.value("op", std::string("apply"));
    const auto output = resolve(req, "output", base);
    if (output.empty()) fail(ErrorCode::kInvalidArgument, "warp: output path required");
    nlohmann::json summary = {{"op", op}, {"output", output.generic_string()}};
    FeatureMap result;
    if (op == "apply") {
      const auto features_path = resolve(req, "features", base);
      const auto flow_path = resolve(req, "flow", base);
      if (features_path.empty() || flow_path.empty()) {
        fail(ErrorCode::kInvalidArgument, "warp: features and flow are required");
      }
      const FeatureMap x = to_feature_map(read_tensor(features_path));
      result = backward_warp(x, load_flow_any(flow_path));
      const auto mask_path = resolve(req, "mask", base);
      if (!mask_path.empty()) result = apply_mask(result, to_feature_map(read_tensor(mask_path)));
      const auto dict_path = resolve(req, "dictionary", base);
      if (!dict_path.empty()) {
        const auto dict = DepthMotionDictionary::from_raw(to_feature_maps(read_tensor(dict_path)));
        const auto expected = req.value("dictionary_size", dict.size());
        if (dict.size() != expected) {
          fail(ErrorCode::kShape, "depth dictionary holds " + std::to_string(dict.size()) +
                                      " bases, configured size is " + std::to_string(expected));
        }
        std::vector<double> beta;
        if (req.contains("beta") && req["beta"].is_array()) {
          beta = req["beta"].get<std::vector<double>>();
        } else if (req.contains("beta") && req["beta"].is_string()) {
          beta = read_tensor(resolve(req, "beta", base)).data;
        } else {
          fail(ErrorCode::kInvalidArgument, "warp: a dictionary needs beta");
        }
        result = depth_motion_combine(result, beta, dict);
        summary["dictionary_size"] = dict.size();
      }
    } else if (op == "refine") {
      const auto& dec = req.at("decoded");
      const auto& inp = req.at("inpainted");
      if (dec.size() != inp.size()) {
        fail(ErrorCode::kShape, "refine: decoded and inpainted level counts differ");
      }
      std::vector<PyramidLevel> levels;
      for (std::size_t k = 0; k < dec.size(); ++k) {
        auto rel = [&](const nlohmann::json& v) {
          fs::path p = v.get<std::string>();
          return p.is_absolute() ? p : (base / p).lexically_normal();
        };
        levels.push_back({to_feature_map(read_tensor(rel(dec[k]))),
                          to_feature_map(read_tensor(rel(inp[k])))});
      }
      result = pyramid_refine(levels);
      summary["levels"] = levels.size();
    } else {
      fail(ErrorCode::kInvalidArgument, "warp: unknown op '" + op + "'");
    }
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    write_tensor(tensor_from(result, parse_dtype(req)), output);
    summary["shape"] = {result.channels(), result.height(), result.width()};
    return summary;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("warp request: ") + e.what());
  }
}

namespace {

Reduction parse_reduction(const nlohmann::json& req, const char* key) {
  const auto s = req.value(key, std::string("mean_squared"));
  if (s == "mean_squared") return Reduction::kMeanSquared;
  if (s == "mean_absolute") return Reduction::kMeanAbsolute;
  fail(ErrorCode::kInvalidArgument, std::string(key) + ": unknown reduction '" + s + "'");
}

FeatureMap concat_rgbd(const RgbdFrame& f) {
  FeatureMap out(4, f.color.height(), f.color.width());
  auto dst = out.data();
  std::copy(f.color.data().begin(), f.color.data().end(), dst.begin());
  std::copy(f.depth.values.data().begin(), f.depth.values.data().end(),
            dst.begin() + static_cast<std::ptrdiff_t>(f.color.size()));
  return out;
}

std::vector<FeatureMap> load_features(const fs::path& dir, long index) {
  const auto files = index_files(dir, "features_" + frame_name("", index, "") + "_s", ".tensor");
  std::vector<FeatureMap> out;
  long expect = 0;
  for (const auto& [scale, path] : files) {
    if (scale != expect++) {
      fail(ErrorCode::kMissing, "frame " + std::to_string(index) + ": feature scales not contiguous");
    }
    out.push_back(to_feature_map(read_tensor(path)));
  }
  return out;
}

}  // namespace

nlohmann::json run_loss(const nlohmann::json& req, const fs::path& base) {
  try {
    const auto pred_dir = resolve(req, "pred_dir", base);
    const auto gt_dir = resolve(req, "gt_dir", base);
    if (pred_dir.empty() || gt_dir.empty()) {
      fail(ErrorCode::kInvalidArgument, "loss: pred_dir and gt_dir are required");
    }
    DepthRange range;
    if (req.contains("depth_normalization")) {
      range.near_mm = req["depth_normalization"].value("near_mm", range.near_mm);
      range.far_mm = req["depth_normalization"].value("far_mm", range.far_mm);
    }
    LossWeights weights;
    if (req.contains("loss_weights")) {
      weights.rec = req["loss_weights"].value("rec", weights.rec);
      weights.sm = req["loss_weights"].value("sm", weights.sm);
      weights.sp = req["loss_weights"].value("sp", weights.sp);
    }
    const Reduction sm_red = parse_reduction(req, "smooth_reduction");
    const Reduction sp_red = parse_reduction(req, "structure_reduction");
    const int window = req.value("window", 5);

    const auto pred = index_files(pred_dir, "depth_", ".png");
    const auto gt = index_files(gt_dir, "depth_", ".png");
    for (const auto& [i, _] : gt) {
      if (!pred.contains(i)) fail(ErrorCode::kMissing, "frame " + std::to_string(i) + ": missing prediction");
    }
    for (const auto& [i, _] : pred) {
      if (!gt.contains(i)) fail(ErrorCode::kMissing, "frame " + std::to_string(i) + ": missing ground truth");
    }

    auto load_optional = [&](const char* key) -> nlohmann::json {
      const auto p = resolve(req, key, base);
      return p.empty() ? nlohmann::json() : read_json(p);
    };
    const auto pred_lm = load_optional("pred_landmarks");
    const auto gt_lm = load_optional("gt_landmarks");
    const auto pred_emb = load_optional("pred_embeddings");
    const auto gt_emb = load_optional("gt_embeddings");
    const auto pred_feat_dir = resolve(req, "pred_features", base);
    const auto gt_feat_dir = resolve(req, "gt_features", base);
    if (pred_lm.is_null() != gt_lm.is_null() || pred_emb.is_null() != gt_emb.is_null() ||
        pred_feat_dir.empty() != gt_feat_dir.empty()) {
      fail(ErrorCode::kInvalidArgument, "loss: landmark, embedding and feature inputs come in pairs");
    }

    std::map<std::string, std::vector<double>> series;
    nlohmann::json frames = nlohmann::json::array();
    std::size_t pos = 0;
    for (const auto& [index, depth_path] : gt) {
      const auto color_name = frame_name("color_", index, ".png");
      const RgbdFrame g = load_rgbd(gt_dir / color_name, depth_path, range);
      const RgbdFrame p = load_rgbd(pred_dir / color_name, pred.at(index), range);
      nlohmann::json f = {{"index", index}};
      auto record = [&](const std::string& key, double v) {
        f[key] = v;
        series[key].push_back(v);
      };
      const double l_rec = l1_loss(concat_rgbd(p), concat_rgbd(g));
      const double l_sm = smooth_loss(g.depth.values, p.depth.values, sm_red);
      const double l_sp = structure_preserve_loss(g.depth.values, p.depth.values, window, sp_red);
      double l_vgg = 0.0;
      if (!pred_feat_dir.empty()) {
        l_vgg = perceptual_loss(load_features(pred_feat_dir, index), load_features(gt_feat_dir, index));
        record("l_vgg", l_vgg);
      }
      record("l_rec", l_rec);
      record("depth_l1", l1_loss(p.depth.values, g.depth.values));
      record("l_sm", l_sm);
      record("l_sp", l_sp);
      record("total", combined_loss(l_vgg, l_rec, l_sm, l_sp, weights));
      if (!pred_lm.is_null()) {
        const auto a = pred_lm.at(pos).get<std::vector<std::array<double, 2>>>();
        const auto b = gt_lm.at(pos).get<std::vector<std::array<double, 2>>>();
        std::vector<Vec2> pa, pb;
        for (const auto& q : a) pa.emplace_back(q[0], q[1]);
        for (const auto& q : b) pb.emplace_back(q[0], q[1]);
        record("akd", akd(pa, pb));
      }
      if (!pred_emb.is_null()) {
        const auto a = pred_emb.at(pos).get<std::vector<double>>();
        const auto b = gt_emb.at(pos).get<std::vector<double>>();
        record("aed", aed(a, b));
        record("csim", csim(a, b));
      }
      frames.push_back(std::move(f));
      ++pos;
    }
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [key, values] : series) {
      const auto s = summarize(values);
      summary[key] = {{"mean", s.mean}, {"stddev", s.stddev}};
    }
    nlohmann::json report = {
        {"frames", frames},
        {"summary", summary},
        {"loss_weights", {{"rec", weights.rec}, {"sm", weights.sm}, {"sp", weights.sp}}},
        {"conventions",
         {{"smooth_reduction", to_string(sm_red)},
          {"structure_reduction", to_string(sp_red)},
          {"structure_window", window},
          {"structure_max", "max over window of |grad D(q)|, window clipped at borders"},
          {"gradient_magnitude", "l2"},
          {"stencil_border", "replicate"},
          {"l_rec", "mean absolute difference over color and depth channels"},
          {"invalid_depth", "far plane (+1)"},
          {"stddev", "population"}}},
    };
    const auto output = resolve(req, "output", base);
    if (!output.empty()) {
      if (output.has_parent_path()) fs::create_directories(output.parent_path());
      write_text(output, report.dump(2) + "\n");
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("loss request: ") + e.what());
  }
}

}  // namespace flowrt
