// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "flowrt/error.hpp"
#include "flowrt/flo_io.hpp"
#include "flowrt/linalg.hpp"
#include "flowrt/raster.hpp"
#include "flowrt/rgbd_io.hpp"
#include "flowrt/tensor_io.hpp"
#include "flowrt/warp.hpp"

namespace flowrt {

namespace fs = std::filesystem;

namespace {

template <typename Skip>
Mesh grid(int cols, int rows, Skip skip) {
  Mesh mesh;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      if (skip(c, r)) continue;
      const std::int32_t v00 = r * cols + c, v10 = v00 + 1;
      const std::int32_t v01 = v00 + cols, v11 = v01 + 1;
      mesh.faces.push_back({v00, v10, v11});
      mesh.faces.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

// Sequence scene layout.
constexpr int kCols = 25;
constexpr int kRows = 20;
constexpr double kDx = 0.065;
constexpr double kDy = 0.07;
constexpr double kPlaneZ = -2.0;
constexpr int kMouthRow = 6;  // cell row between vertex rows 6 and 7
constexpr int kMouthBegin = 8;
constexpr int kMouthEnd = 17;
constexpr int kHoleFrame = 7;
constexpr int kImageSize = 128;
const DepthRange kSequenceRange{1.0, 65535.0};

const Vec3 kOrigin{-0.5 * kDx * (kCols - 1), -0.5 * kDy * (kRows - 1), kPlaneZ};

bool mouth_cell(int c, int r) { return r == kMouthRow && c >= kMouthBegin && c < kMouthEnd; }

double lip_bottom() { return kOrigin.y() + kMouthRow * kDy; }
double lip_top() { return kOrigin.y() + (kMouthRow + 1) * kDy; }

// Rest-plane point (x, y) lies on the mesh.
bool on_plate(double x, double y) {
  const double u = (x - kOrigin.x()) / kDx;
  const double v = (y - kOrigin.y()) / kDy;
  if (u < 0.0 || v < 0.0 || u > kCols - 1 || v > kRows - 1) return false;
  const int c = std::min(static_cast<int>(u), kCols - 2);
  const int r = std::min(static_cast<int>(v), kRows - 2);
  return !(mouth_cell(c, r) && v > kMouthRow && v < kMouthRow + 1);
}

struct Motion {
  Vec3 head = Vec3::Zero();
  double jaw = 0.0;  // downward opening of everything below the lips

  bool still() const { return head.isZero(0.0) && jaw == 0.0; }

  // Jaw weight falls from 1 below the lower lip line to 0 at the upper one.
  static double jaw_weight(double y) {
    return std::clamp((lip_top() - y) / (lip_top() - lip_bottom()), 0.0, 1.0);
  }
  Vec3 apply(const Vec3& p) const {
    return p + head - Vec3(0.0, jaw * jaw_weight(p.y()), 0.0);
  }
  // Rest y whose animated y is `y`; monotone so bisection suffices.
  double invert_y(double y) const {
    double lo = kOrigin.y() - 1.0, hi = -kOrigin.y() + 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = mid + head.y() - jaw * jaw_weight(mid);
      (f < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

Motion motion_at(int t) {
  const double s = static_cast<double>(t) / (kSequenceFrames - 1);
  Motion m;
  m.head = {0.05 * std::sin(2.0 * std::numbers::pi * s), 0.03 * std::sin(std::numbers::pi * s),
            0.1 * std::sin(std::numbers::pi * s)};
  m.jaw = 0.08 * std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * s);
  if (t == 0) m = Motion{};
  return m;
}

// World point on the plane z = plane_z seen through pixel p.
Vec3 ray_plane(const PerspectiveCamera& cam, const Vec2& p, double plane_z) {
  const Vec2 ndc = cam.pixel_to_ndc(p);
  const Vec3 a = cam.unproject_ndc({ndc.x(), ndc.y(), -1.0});
  const Vec3 b = cam.unproject_ndc({ndc.x(), ndc.y(), 1.0});
  const double s = (plane_z - a.z()) / (b.z() - a.z());
  return a + s * (b - a);
}

std::array<double, 3> albedo(double x, double y) {
  const double u = (x - kOrigin.x()) / (kDx * (kCols - 1));
  const double v = (y - kOrigin.y()) / (kDy * (kRows - 1));
  return {0.55 + 0.35 * u, 0.35 + 0.25 * std::sin(6.0 * v), 0.3 + 0.2 * std::cos(5.0 * u + v)};
}

struct Rendered {
  DepthMap depth;  // normalized; invalid where nothing is hit
  FeatureMap color;
};

Rendered render(const PerspectiveCamera& cam, const Motion& m) {
  Rendered out{DepthMap(kImageSize, kImageSize, 1.0), FeatureMap(3, kImageSize, kImageSize, 0.0)};
  const double plane_z = kPlaneZ + m.head.z();
  const double nd = cam.normalized_depth(cam.project({0.0, 0.0, plane_z}).ndc_depth);
  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      const Vec3 q = ray_plane(cam, {double(x), double(y)}, plane_z);
      Vec3 p = q - m.head;
      if (!m.still()) p.y() = m.invert_y(q.y());
      const bool hit = on_plate(p.x(), p.y());
      out.depth.valid[static_cast<std::size_t>(y) * kImageSize + x] = hit ? 1 : 0;
      out.depth.values.at(0, y, x) = hit ? nd : 1.0;
      const auto rgb = hit ? albedo(p.x(), p.y()) : std::array<double, 3>{0.1, 0.12, 0.15};
      for (int c = 0; c < 3; ++c) out.color.at(c, y, x) = 2.0 * rgb[c] - 1.0;
    }
  }
  return out;
}

FlowField scene_flow(const PerspectiveCamera& cam, const Motion& m) {
  FlowField flow(kImageSize, kImageSize);
  if (m.still()) return flow;
  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      const Vec3 p = ray_plane(cam, {double(x), double(y)}, kPlaneZ);
      const Vec2 a = cam.project(p).pixel;
      const Vec2 b = cam.project(m.apply(p)).pixel;
      flow.dx(y, x) = b.x() - a.x();
      flow.dy(y, x) = b.y() - a.y();
    }
  }
  return flow;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string numbered(const char* prefix, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%05d%s", prefix, i, ext);
  return buf;
}

struct SequenceLandmark {
  const char* id;
  int c, r;
  double ox, oy;  // pixel offset, pointing into the plate
};

// Ids follow a face layout on the plate: mouth, nose, eyes, brows, jaw.
constexpr SequenceLandmark kLandmarks[] = {
    {"mouth_left", 8, 6, 0.3, 0.2},     {"mouth_right", 16, 6, -0.3, 0.2},
    {"lower_lip_l", 10, 6, 0.2, 0.25},  {"lower_lip_c", 12, 6, 0.2, 0.25},
    {"lower_lip_r", 14, 6, 0.2, 0.25},  {"upper_lip_l", 10, 7, 0.2, -0.25},
    {"upper_lip_c", 12, 7, 0.2, -0.25}, {"upper_lip_r", 14, 7, 0.2, -0.25},
    {"chin", 12, 2, 0.1, 0.1},          {"jaw_left", 4, 4, 0.1, 0.1},
    {"jaw_right", 20, 4, 0.1, 0.1},     {"nose_tip", 12, 10, 0.1, 0.1},
    {"eye_left", 8, 13, 0.1, 0.1},      {"eye_right", 16, 13, 0.1, 0.1},
    {"brow_left", 7, 16, 0.1, 0.1},     {"brow_right", 17, 16, 0.1, 0.1},
};

void write_sequence(const fs::path& dir) {
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "flows");
  const auto scene = make_synthetic_scene();
  const auto& cam = scene.camera;
  write_obj(scene.mesh, dir / "mesh.obj");
  write_json(dir / "camera.json", cam.to_json());

  nlohmann::json landmarks = nlohmann::json::array();
  for (const auto& l : kLandmarks) {
    const Vec2 px = cam.project(scene.mesh.vertices[l.r * kCols + l.c]).pixel;
    landmarks.push_back({{"id", l.id}, {"x_px", px.x() + l.ox}, {"y_px", px.y() + l.oy}});
  }
  landmarks.push_back({{"id", "background"}, {"x_px", 3.0}, {"y_px", 3.0}});
  write_json(dir / "landmarks.json", landmarks);

  const Rendered rest = render(cam, Motion{});
  save_depth(rest.depth, dir / "source_depth.png", kSequenceRange);

  for (int t = 0; t < kSequenceFrames; ++t) {
    const Motion m = motion_at(t);
    Rendered frame = render(cam, m);
    const FlowField flow = scene_flow(cam, m);
    if (t == kHoleFrame) {
      // Sensor dropout wider than the depth search radius around the
      // tracked left mouth corner.
      const auto& l = kLandmarks[0];
      const Vec2 rest_px = cam.project(scene.mesh.vertices[l.r * kCols + l.c]).pixel;
      const int cx = static_cast<int>(std::lround(rest_px.x() + flow.dx(int(rest_px.y()), int(rest_px.x()))));
      const int cy = static_cast<int>(std::lround(rest_px.y() + flow.dy(int(rest_px.y()), int(rest_px.x()))));
      for (int y = cy - 6; y <= cy + 6; ++y) {
        for (int x = cx - 6; x <= cx + 6; ++x) {
          if (x < 0 || y < 0 || x >= kImageSize || y >= kImageSize) continue;
          frame.depth.valid[static_cast<std::size_t>(y) * kImageSize + x] = 0;
          frame.depth.values.at(0, y, x) = 1.0;
        }
      }
    }
    save_rgbd({frame.color, frame.depth}, dir / "frames" / numbered("color_", t, ".png"),
              dir / "frames" / numbered("depth_", t, ".png"), kSequenceRange);
    write_flo(flow, dir / "flows" / numbered("flow_", t, ".flo"));
  }

  write_json(dir / "config.json",
             {{"paths",
               {{"mesh", "mesh.obj"},
                {"camera", "camera.json"},
                {"landmarks", "landmarks.json"},
                {"source_depth", "source_depth.png"},
                {"frame_dir", "frames"},
                {"flow_dir", "flows"},
                {"output_dir", "out"}}},
              {"k_nearest", 10},
              {"distance_metric", "geodesic"},
              {"depth_normalization",
               {{"near_mm", kSequenceRange.near_mm}, {"far_mm", kSequenceRange.far_mm}}},
              {"workers", 1}});
}

void write_slit(const fs::path& dir) {
  fs::create_directories(dir);
  const auto fx = make_lip_slit_fixture();
  write_obj(fx.mesh, dir / "mesh.obj");
  nlohmann::json j = controllers_to_json(fx.controllers);
  j["upper_controller_count"] = fx.upper_controller_count;
  j["upper_strip"] = fx.upper_strip;
  j["lower_strip"] = fx.lower_strip;
  j["facing"] = fx.facing;
  write_json(dir / "slit.json", j);
}

FeatureMap random_map(std::mt19937_64& rng, int c, int h, int w, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  FeatureMap m(c, h, w);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

void write_kernels(const fs::path& dir) {
  fs::create_directories(dir);
  std::mt19937_64 rng(20260401);
  constexpr int kC = 3, kH = 16, kW = 16;
  write_tensor(tensor_from(random_map(rng, kC, kH, kW, -1.0, 1.0)), dir / "features.tensor");
  FlowField flow(kH, kW);
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      flow.dx(y, x) = 1.5 * std::sin(0.3 * y) + 0.25;
      flow.dy(y, x) = -0.75 * std::cos(0.2 * x);
    }
  }
  write_flo(flow, dir / "flow.flo");
  write_tensor(tensor_from(random_map(rng, 1, kH, kW, 0.0, 1.0)), dir / "mask.tensor");

  std::vector<std::vector<double>> raw(DepthMotionDictionary::kDefaultSize);
  for (auto& v : raw) {
    const auto m = random_map(rng, kC, kH, kW, -1.0, 1.0);
    v.assign(m.data().begin(), m.data().end());
  }
  modified_gram_schmidt(raw);
  Tensor dict;
  dict.shape = {static_cast<std::int64_t>(raw.size()), kC, kH, kW};
  dict.layout = "MCHW";
  for (const auto& v : raw) dict.data.insert(dict.data.end(), v.begin(), v.end());
  write_tensor(dict, dir / "dictionary.tensor");

  write_json(dir / "apply.json", {{"op", "apply"},
                                  {"features", "features.tensor"},
                                  {"flow", "flow.flo"},
                                  {"mask", "mask.tensor"},
                                  {"dictionary", "dictionary.tensor"},
                                  {"dictionary_size", DepthMotionDictionary::kDefaultSize},
                                  {"beta", {0.5, -0.25, 0.125, 0.0, 1.0}},
                                  {"output", "out/warped.tensor"}});

  nlohmann::json dec = nlohmann::json::array(), inp = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) {
    const int s = 4 << k;
    const auto d = "decoded_" + std::to_string(k) + ".tensor";
    const auto i = "inpainted_" + std::to_string(k) + ".tensor";
    write_tensor(tensor_from(random_map(rng, kC, s, s, -0.5, 0.5)), dir / d);
    write_tensor(tensor_from(random_map(rng, kC, s, s, -0.1, 0.1)), dir / i);
    dec.push_back(d);
    inp.push_back(i);
  }
  write_json(dir / "refine.json",
             {{"op", "refine"}, {"decoded", dec}, {"inpainted", inp}, {"output", "out/refined.tensor"}});
}

void write_loss(const fs::path& dir) {
  fs::create_directories(dir / "gt");
  fs::create_directories(dir / "pred");
  fs::create_directories(dir / "features_gt");
  fs::create_directories(dir / "features_pred");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.02);
  const auto scene = make_synthetic_scene();
  nlohmann::json lm_gt = nlohmann::json::array(), lm_pred = nlohmann::json::array();
  nlohmann::json emb_gt = nlohmann::json::array(), emb_pred = nlohmann::json::array();
  for (int t = 0; t < 3; ++t) {
    const Motion m = motion_at(3 * t);
    const Rendered gt = render(scene.camera, m);
    Rendered pred = gt;
    for (auto& v : pred.color.data()) v = std::clamp(v + noise(rng), -1.0, 1.0);
    for (int y = 0; y < kImageSize; ++y) {
      for (int x = 0; x < kImageSize; ++x) {
        if (!pred.depth.is_valid(y, x)) continue;
        pred.depth.values.at(0, y, x) =
            std::clamp(pred.depth.values.at(0, y, x) + 0.002 * std::sin(0.2 * x + 0.1 * y), -1.0, 1.0);
      }
    }
    save_rgbd({gt.color, gt.depth}, dir / "gt" / numbered("color_", t, ".png"),
              dir / "gt" / numbered("depth_", t, ".png"), kSequenceRange);
    save_rgbd({pred.color, pred.depth}, dir / "pred" / numbered("color_", t, ".png"),
              dir / "pred" / numbered("depth_", t, ".png"), kSequenceRange);

    nlohmann::json g = nlohmann::json::array(), p = nlohmann::json::array();
    for (const auto& l : kLandmarks) {
      const Vec2 px = scene.camera.project(m.apply(scene.mesh.vertices[l.r * kCols + l.c])).pixel;
      g.push_back({px.x(), px.y()});
      p.push_back({px.x() + noise(rng) * 25.0, px.y() + noise(rng) * 25.0});
    }
    lm_gt.push_back(g);
    lm_pred.push_back(p);
    std::vector<double> eg(16), ep(16);
    for (int i = 0; i < 16; ++i) {
      eg[i] = std::sin(0.7 * i + 0.1 * t);
      ep[i] = eg[i] + noise(rng);
    }
    emb_gt.push_back(eg);
    emb_pred.push_back(ep);
    for (int s = 0; s < 3; ++s) {
      const int size = 16 >> s;
      const auto name = numbered("features_", t, "_s") + std::to_string(s) + ".tensor";
      const auto fg = random_map(rng, 8, size, size, 0.0, 1.0);
      FeatureMap fp = fg;
      for (auto& v : fp.data()) v += noise(rng);
      write_tensor(tensor_from(fg), dir / "features_gt" / name);
      write_tensor(tensor_from(fp), dir / "features_pred" / name);
    }
  }
  write_json(dir / "landmarks_gt.json", lm_gt);
  write_json(dir / "landmarks_pred.json", lm_pred);
  write_json(dir / "embeddings_gt.json", emb_gt);
  write_json(dir / "embeddings_pred.json", emb_pred);
  write_json(dir / "request.json",
             {{"pred_dir", "pred"},
              {"gt_dir", "gt"},
              {"depth_normalization",
               {{"near_mm", kSequenceRange.near_mm}, {"far_mm", kSequenceRange.far_mm}}},
              {"pred_landmarks", "landmarks_pred.json"},
              {"gt_landmarks", "landmarks_gt.json"},
              {"pred_embeddings", "embeddings_pred.json"},
              {"gt_embeddings", "embeddings_gt.json"},
              {"pred_features", "features_pred"},
              {"gt_features", "features_gt"},
              {"output", "out/report.json"}});
}

}  // namespace

Mesh make_grid_mesh(int cols, int rows, const Vec3& origin, double dx, double dy) {
  if (cols < 2 || rows < 2) fail(ErrorCode::kInvalidArgument, "grid needs at least 2 x 2 vertices");
  Mesh mesh = grid(cols, rows, [](int, int) { return false; });
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) mesh.vertices.push_back(origin + Vec3(c * dx, r * dy, 0.0));
  }
  return mesh;
}

LipSlitFixture make_lip_slit_fixture(const LipSlitParams& p) {
  if (p.columns < 5 || p.rows_below < 1 || p.rows_above < 1) {
    fail(ErrorCode::kInvalidArgument, "lip-slit fixture too small");
  }
  const int rows = p.rows_below + p.rows_above;
  const int lower_line = p.rows_below - 1;
  const int upper_line = p.rows_below;
  // The slit spans every cell column but the first and the last.
  const int first = 1, last = p.columns - 2;
  LipSlitFixture fx;
  fx.mesh = grid(p.columns, rows, [&](int c, int r) { return r == lower_line && c >= first && c < last; });
  for (int r = 0; r < rows; ++r) {
    const double y = r < p.rows_below ? -(lower_line - r) * p.dy - 0.5 * p.gap
                                      : (r - upper_line) * p.dy + 0.5 * p.gap;
    for (int c = 0; c < p.columns; ++c) fx.mesh.vertices.emplace_back(c * p.dx, y, 0.0);
  }
  const auto vid = [&](int r, int c) { return static_cast<std::int32_t>(r * p.columns + c); };
  std::vector<std::int32_t> ctrl;
  for (int c = first + 1; c < last; ++c) ctrl.push_back(vid(upper_line, c));
  fx.upper_controller_count = ctrl.size();
  for (int c = first + 1; c < last; ++c) ctrl.push_back(vid(lower_line, c));
  fx.controllers = controllers_at_vertices(fx.mesh, ctrl);
  for (std::size_t j = 0; j < fx.controllers.size(); ++j) {
    fx.controllers.controllers[j].id =
        (j < fx.upper_controller_count ? "upper_" : "lower_") + std::to_string(j % fx.upper_controller_count);
  }
  for (int r = upper_line; r < rows; ++r) {
    for (int c = first + 1; c < last; ++c) {
      fx.upper_strip.push_back(vid(r, c));
      fx.facing.push_back(static_cast<std::int32_t>(fx.upper_controller_count) + (c - first - 1));
    }
  }
  for (int r = 0; r <= lower_line; ++r) {
    for (int c = first + 1; c < last; ++c) fx.lower_strip.push_back(vid(r, c));
  }
  return fx;
}

SyntheticScene make_synthetic_scene() {
  Mesh mesh = grid(kCols, kRows, mouth_cell);
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) mesh.vertices.push_back(kOrigin + Vec3(c * kDx, r * kDy, 0.0));
  }
  PerspectiveCamera camera(PerspectiveCamera::perspective(std::numbers::pi / 3.0, 1.0, 0.1, 10.0),
                           kImageSize, kImageSize, 0.1, 10.0);
  return {std::move(mesh), std::move(camera)};
}

void generate_fixtures(const fs::path& dir) {
  write_slit(dir / "slit");
  write_sequence(dir / "sequence");
  write_kernels(dir / "kernels");
  write_loss(dir / "loss");
}

}  // namespace flowrt
