// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "flowrt/flowrt.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("flowrt_capi_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(path); }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  frt_string_free(s);
  return out;
}

// Two triangles forming the unit square in the z = 0 plane.
frt_mesh* square() {
  const double xyz[] = {0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0};
  const int32_t faces[] = {0, 1, 2, 0, 2, 3};
  frt_mesh* m = nullptr;
  REQUIRE(frt_mesh_create(xyz, 4, faces, 2, &m) == FRT_OK);
  return m;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::strlen(frt_version()) > 0);
  CHECK(std::string(frt_status_name(FRT_OK)) == "ok");
  CHECK(std::string(frt_status_name(FRT_ERR_MISSING)) == "missing");
}

TEST_CASE("errors set the last error message") {
  frt_mesh* m = nullptr;
  CHECK(frt_mesh_load("/nonexistent/mesh.obj", &m) == FRT_ERR_IO);
  CHECK(m == nullptr);
  CHECK(std::string(frt_last_error()).find("mesh.obj") != std::string::npos);
  CHECK(frt_mesh_create(nullptr, 0, nullptr, 0, nullptr) == FRT_ERR_INVALID_ARGUMENT);
  const double xyz[] = {0, 0, 0, 1, 0, 0, 0, 1, 0};
  const int32_t faces[] = {0, 1, 5};
  CHECK(frt_mesh_create(xyz, 3, faces, 1, &m) != FRT_OK);
}

TEST_CASE("mesh, geodesics, weights and deformation") {
  frt_mesh* m = square();
  CHECK(frt_mesh_vertex_count(m) == 4);
  CHECK(frt_mesh_face_count(m) == 2);
  double dist[4];
  REQUIRE(frt_geodesic_distances(m, 0, dist, 4) == FRT_OK);
  CHECK(dist[0] == 0.0);
  CHECK(dist[1] == 1.0);
  CHECK(dist[2] == doctest::Approx(std::sqrt(2.0)));
  CHECK(frt_geodesic_distances(m, 9, dist, 4) != FRT_OK);

  const int32_t at[] = {0, 2};
  frt_controllers* c = nullptr;
  REQUIRE(frt_controllers_at_vertices(m, at, 2, &c) == FRT_OK);
  CHECK(frt_controllers_count(c) == 2);
  size_t unreachable = 7;
  REQUIRE(frt_controllers_compute_weights(c, m, 10, FRT_METRIC_GEODESIC, 1, &unreachable) == FRT_OK);
  CHECK(unreachable == 0);
  int32_t ids[2];
  double w[2];
  size_t count = 0;
  REQUIRE(frt_controllers_weight_row(c, 1, ids, w, 2, &count) == FRT_OK);
  REQUIRE(count == 2);
  CHECK(w[0] + w[1] == doctest::Approx(1.0));
  CHECK(frt_controllers_weight_row(c, 1, ids, w, 1, &count) == FRT_ERR_SHAPE);
  CHECK(count == 2);

  const double t[] = {0.5, -1.0, 0.25, 0.5, -1.0, 0.25};
  frt_mesh* out = nullptr;
  REQUIRE(frt_deform(m, c, t, &out) == FRT_OK);
  double xyz[12];
  REQUIRE(frt_mesh_vertices(out, xyz, 12) == FRT_OK);
  CHECK(xyz[3] == doctest::Approx(1.5));
  CHECK(xyz[4] == doctest::Approx(-1.0));
  CHECK(xyz[5] == doctest::Approx(0.25));
  CHECK(frt_mesh_vertices(out, xyz, 11) == FRT_ERR_SHAPE);
  frt_mesh_free(out);
  frt_controllers_free(c);
  frt_mesh_free(m);
}

TEST_CASE("camera round trip") {
  const double n = 0.1, f = 10.0, t = 1.0 / std::tan(M_PI / 6.0);
  const double p[16] = {t, 0, 0, 0, 0, t, 0, 0, 0, 0, -(f + n) / (f - n), -2 * f * n / (f - n), 0, 0, -1, 0};
  frt_camera* cam = nullptr;
  REQUIRE(frt_camera_create(p, 64, 64, n, f, &cam) == FRT_OK);
  const double world[3] = {0.3, -0.2, -2.5};
  double px[2], depth = 0;
  REQUIRE(frt_camera_project(cam, world, px, &depth) == FRT_OK);
  double back[3];
  REQUIRE(frt_camera_unproject(cam, px[0], px[1], depth, back) == FRT_OK);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(world[i]).epsilon(1e-9));
  frt_camera_free(cam);
}

TEST_CASE("flow, warp, mask and upsampling") {
  Scratch dir;
  std::vector<double> dxdy(2 * 3 * 4, 0.0);
  for (int i = 0; i < 12; ++i) dxdy[i] = 1.0;
  frt_flow* flow = nullptr;
  REQUIRE(frt_flow_create(dxdy.data(), 4, 3, &flow) == FRT_OK);
  const auto path = (dir.path / "f.flo").string();
  REQUIRE(frt_flow_save(flow, path.c_str()) == FRT_OK);
  frt_flow* loaded = nullptr;
  REQUIRE(frt_flow_load(path.c_str(), &loaded) == FRT_OK);
  CHECK(frt_flow_width(loaded) == 4);
  CHECK(frt_flow_height(loaded) == 3);
  std::vector<double> back(24);
  REQUIRE(frt_flow_data(loaded, back.data(), back.size()) == FRT_OK);
  CHECK(back == dxdy);

  std::vector<double> x(12), out(12);
  for (int i = 0; i < 12; ++i) x[i] = i % 4;
  REQUIRE(frt_backward_warp(x.data(), 1, 3, 4, loaded, out.data()) == FRT_OK);
  CHECK(out[0] == 1.0);
  CHECK(out[3] == 3.0);

  std::vector<double> mask(12, 0.5);
  REQUIRE(frt_apply_mask(x.data(), 1, 3, 4, mask.data(), out.data()) == FRT_OK);
  CHECK(out[1] == 0.5);
  mask[0] = 2.0;
  CHECK(frt_apply_mask(x.data(), 1, 3, 4, mask.data(), out.data()) == FRT_ERR_INVALID_ARGUMENT);

  std::vector<double> up(48);
  REQUIRE(frt_upsample2x(x.data(), 1, 3, 4, up.data()) == FRT_OK);
  CHECK(up[0] == 0.0);
  CHECK(up[1] == 0.25);
  frt_flow_free(loaded);
  frt_flow_free(flow);
}

TEST_CASE("latent composition and losses") {
  double dict[] = {2, 0, 0, 1, 1, 0};
  REQUIRE(frt_orthonormalize(dict, 2, 3) == FRT_OK);
  CHECK(dict[0] == 1.0);
  CHECK(dict[4] == doctest::Approx(1.0));
  const double z[] = {1, 1, 1};
  const double a[] = {0.5, -2.0};
  double zsd[3];
  REQUIRE(frt_latent_compose(z, a, dict, 2, 3, zsd) == FRT_OK);
  CHECK(zsd[0] == 1.5);
  CHECK(zsd[1] == doctest::Approx(-1.0));
  CHECK(zsd[2] == 1.0);

  double v = -1;
  const double p[] = {1, 2, 3}, q[] = {1, 3, 1};
  REQUIRE(frt_loss_l1(p, q, 3, &v) == FRT_OK);
  CHECK(v == 1.0);
  REQUIRE(frt_loss_combined(0, 1, 1, 1, nullptr, &v) == FRT_OK);
  CHECK(v == 450.0);
  std::vector<double> d(25, 0.0), e(25, 0.0);
  REQUIRE(frt_loss_smooth(d.data(), e.data(), 5, 5, &v) == FRT_OK);
  CHECK(v == 0.0);
  REQUIRE(frt_loss_structure(d.data(), e.data(), 5, 5, 5, &v) == FRT_OK);
  CHECK(v == 0.0);
}

TEST_CASE("whole runs through the C interface") {
  Scratch dir;
  REQUIRE(frt_generate_fixtures(dir.path.string().c_str()) == FRT_OK);
  const auto cfg_path = (dir.path / "sequence/config.json").string();
  char* resolved = nullptr;
  REQUIRE(frt_resolve_config(cfg_path.c_str(), R"({"workers": 2, "k_nearest": 4})", &resolved) == FRT_OK);
  const auto cfg = nlohmann::json::parse(take(resolved));
  CHECK(cfg["workers"] == 2);
  CHECK(cfg["k_nearest"] == 4);
  CHECK(fs::path(cfg["paths"]["mesh"].get<std::string>()).is_absolute());

  char* diag = nullptr;
  REQUIRE(frt_run_retarget(cfg.dump().c_str(), &diag) == FRT_OK);
  CHECK(nlohmann::json::parse(take(diag))["frame_count"] == 20);

  CHECK(frt_resolve_config(cfg_path.c_str(), R"({"bogus": 1})", &resolved) == FRT_ERR_FORMAT);
  CHECK(frt_run_retarget("{not json", &diag) == FRT_ERR_FORMAT);
}
