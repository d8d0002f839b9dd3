// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "flowrt/camera.hpp"
#include "flowrt/controllers.hpp"
#include "flowrt/error.hpp"
#include "flowrt/fixtures.hpp"
#include "flowrt/retarget.hpp"
#include "support.hpp"

using namespace flowrt;
using namespace flowrt::testing;

namespace {

constexpr double kFov = std::numbers::pi / 3.0;

PerspectiveCamera standard_camera(int w = 64, int h = 64) {
  return {PerspectiveCamera::perspective(kFov, double(w) / h, 0.1, 10.0), w, h, 0.1, 10.0};
}

DepthMap constant_depth(int h, int w, double v) { return DepthMap(h, w, v); }

FlowField constant_flow(int h, int w, double dx, double dy) {
  FlowField f(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.dx(y, x) = dx;
      f.dy(y, x) = dy;
    }
  }
  return f;
}

// Bar of two unit triangles strips; controllers at both ends.
struct Bar {
  Mesh mesh;
  ControllerSet set;
};

Bar bar() {
  Bar b;
  b.mesh = make_grid_mesh(5, 2, Vec3::Zero(), 1.0, 1.0);
  const std::vector<std::int32_t> ctrl{0, 4};
  b.set = controllers_at_vertices(b.mesh, ctrl);
  compute_controlling_weights(b.mesh, b.set, {.k = 2});
  return b;
}

}  // namespace

TEST_CASE("identity projection unprojects clip coordinates unchanged") {
  const PerspectiveCamera cam(Eigen::Matrix4d::Identity(), 100, 100, 0.1, 10.0);
  const Vec2 px = cam.ndc_to_pixel({0.5, -0.25});
  CHECK(px.x() == 75.0);
  CHECK(px.y() == 62.5);
  const Vec3 p = cam.unproject(px, 0.1);
  CHECK(p.x() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.y() == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(p.z() == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("pixel convention maps rows downwards by default and upwards on request") {
  const PerspectiveCamera down(Eigen::Matrix4d::Identity(), 10, 20, 0.1, 1.0);
  const PerspectiveCamera up(Eigen::Matrix4d::Identity(), 10, 20, 0.1, 1.0, PixelConvention::kYUp);
  CHECK(down.pixel_to_ndc({0, 0}).y() == 1.0);
  CHECK(up.pixel_to_ndc({0, 0}).y() == -1.0);
  CHECK(down.pixel_to_ndc({10, 20}) == Vec2(1.0, -1.0));
}

TEST_CASE("singular and degenerate cameras are rejected") {
  Eigen::Matrix4d singular = Eigen::Matrix4d::Identity();
  singular(3, 3) = 0.0;
  CHECK_THROWS_AS(PerspectiveCamera(singular, 10, 10, 0.1, 1.0), Error);
  CHECK_THROWS_AS(PerspectiveCamera(Eigen::Matrix4d::Identity(), 0, 10, 0.1, 1.0), Error);
  CHECK_THROWS_AS(PerspectiveCamera(Eigen::Matrix4d::Identity(), 10, 10, 1.0, 1.0), Error);
}

TEST_CASE("a vanishing w is a point at infinity") {
  const auto cam = standard_camera();
  // P^-1 maps NDC points on the plane w' = 0 to infinity; search for one
  // through the inverse's last row.
  const Eigen::Matrix4d inv = cam.inverse();
  const double z = -(inv(3, 3)) / inv(3, 2);
  CHECK_THROWS_WITH_AS(cam.unproject_ndc({0.0, 0.0, z}), doctest::Contains("point at infinity"), Error);
}

TEST_CASE("unproject matches the ray-march oracle at the image centre") {
  const auto cam = standard_camera(128, 128);
  const Vec2 center(64.0, 64.0);
  const Vec3 p = cam.unproject(center, 0.0);
  const Vec3 q = ray_march_oracle(cam, kFov, center, 0.0);
  CHECK((p - q).norm() < 1e-4);
}

TEST_CASE("project then unproject returns the point") {
  std::mt19937_64 rng(5);
  const auto cam = standard_camera(80, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double depth = 0.1 + 9.9 * u(rng);
    const Vec2 px(80.0 * u(rng), 60.0 * u(rng));
    const Vec3 world = ray_march_oracle(cam, kFov, px, cam.project(Vec3(0, 0, -depth)).ndc_depth);
    const auto pr = cam.project(world);
    CHECK((cam.unproject(pr.pixel, pr.ndc_depth) - world).norm() < 1e-6);
  }
}

TEST_CASE("linear depth encoding maps the normalized range to eye depth") {
  const PerspectiveCamera cam(PerspectiveCamera::perspective(kFov, 1.0, 0.5, 4.5), 32, 32, 0.5, 4.5,
                              PixelConvention::kYDown, DepthEncoding::kLinear);
  CHECK(cam.unproject({16, 16}, -1.0).z() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(cam.unproject({16, 16}, 1.0).z() == doctest::Approx(-4.5).epsilon(1e-12));
  CHECK(cam.unproject({16, 16}, 0.0).z() == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(cam.normalized_depth(cam.ndc_depth(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("camera json round-trips") {
  const auto cam = standard_camera(40, 30);
  const auto back = PerspectiveCamera::from_json(cam.to_json());
  CHECK(back.projection() == cam.projection());
  CHECK(back.width() == 40);
  CHECK(back.height() == 30);
  CHECK(back.to_json() == cam.to_json());
}

TEST_CASE("tracking with zero and constant flow") {
  const Vec2 rest(10.25, 7.5);
  CHECK(track_controller(rest, FlowField(16, 16)).pixel == rest);
  const auto t = track_controller(rest, constant_flow(16, 16, 3.0, -2.0));
  CHECK(t.pixel == Vec2(13.25, 5.5));
  CHECK_FALSE(t.clamped);
}

TEST_CASE("tracking through a ramp flow matches the bilinear formula") {
  FlowField f(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) f.dx(y, x) = 0.1 * x;
  }
  const Vec2 rest(2.3, 4.6);
  // Hand evaluation: corners x = 2 and 3 carry 0.2 and 0.3.
  const double expect = 0.7 * 0.2 + 0.3 * 0.3;
  CHECK(track_controller(rest, f).pixel.x() == doctest::Approx(2.3 + expect).epsilon(1e-15));
  CHECK(track_controller(rest, f).pixel.y() == 4.6);
}

TEST_CASE("tracking off the image clamps and flags") {
  const auto t = track_controller({14.0, 1.0}, constant_flow(16, 16, 5.0, -3.0));
  CHECK(t.clamped);
  CHECK(t.pixel == Vec2(15.0, 0.0));
  CHECK_THROWS_AS(track_controller({-1.0, 3.0}, FlowField(16, 16)), Error);
}

TEST_CASE("depth sampling falls back to valid neighbours") {
  DepthMap d(10, 10, 0.5);
  d.values.at(0, 4, 5) = 0.7;
  d.valid[4 * 10 + 4] = 0;
  // Cell (4..5, 4..5) with corner (4,4) invalid: renormalized over the rest.
  const auto s = sample_depth(d, {4.5, 4.0});
  REQUIRE(s);
  CHECK(*s == doctest::Approx(0.7).epsilon(1e-15));

  DepthMap hole(20, 20, 0.25);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) hole.valid[y * 20 + x] = 0;
  }
  hole.values.at(0, 10, 4) = 0.125;
  const auto near_edge = sample_depth(hole, {6.0, 10.0});  // valid pixel 2 px away
  REQUIRE(near_edge);
  CHECK(*near_edge == 0.125);
  CHECK_FALSE(sample_depth(hole, {10.0, 10.0}));  // 5 px from anything valid
}

TEST_CASE("identical frames with zero flow give zero translation") {
  const auto cam = standard_camera();
  const auto depth = constant_depth(64, 64, 0.9);
  const auto t = estimate_controller_transform(0, {20, 30}, {20, 30}, depth, depth, cam);
  CHECK(t.active);
  CHECK(t.translation == Vec3::Zero());
}

TEST_CASE("a rigid image shift at constant depth moves controllers parallel to the image plane") {
  const auto cam = standard_camera();
  const auto depth = constant_depth(64, 64, 0.9);
  const Vec3 a = estimate_controller_transform(0, {20, 30}, {25, 30}, depth, depth, cam).translation;
  const Vec3 b = estimate_controller_transform(1, {40, 10}, {45, 10}, depth, depth, cam).translation;
  CHECK((a - b).norm() < 1e-12);
  CHECK(std::abs(a.z()) < 1e-12);
  CHECK(a.x() > 0.0);
}

TEST_CASE("a depth step shows up in the translation's z component") {
  const auto cam = standard_camera();
  DepthMap src = constant_depth(64, 64, 0.90);
  DepthMap dst = constant_depth(64, 64, 0.92);
  const Vec2 p(32.0, 32.0);
  const auto t = estimate_controller_transform(0, p, p, src, dst, cam);
  const Vec3 expected = ray_march_oracle(cam, kFov, p, 0.92) - ray_march_oracle(cam, kFov, p, 0.90);
  CHECK((t.translation - expected).norm() < 1e-4);
}

TEST_CASE("no depth near either pixel deactivates the controller") {
  const auto cam = standard_camera();
  DepthMap hole(64, 64, 0.0);
  std::fill(hole.valid.begin(), hole.valid.end(), 0);
  const auto t = estimate_controller_transform(3, {5, 5}, {5, 5}, hole, hole, cam);
  CHECK_FALSE(t.active);
  CHECK(t.controller == 3);
}

TEST_CASE("zero transforms reproduce the mesh bit for bit") {
  auto b = bar();
  b.mesh.vertices[3].y() = -0.0;
  std::vector<ControllerTransform> t{{0, Vec3::Zero(), true}, {1, Vec3::Zero(), true}};
  const Mesh out = deform_mesh(b.mesh, b.set, t);
  CHECK(out.faces == b.mesh.faces);
  for (std::size_t v = 0; v < out.vertex_count(); ++v) {
    for (int c = 0; c < 3; ++c) {
      CHECK(std::signbit(out.vertices[v][c]) == std::signbit(b.mesh.vertices[v][c]));
      CHECK(out.vertices[v][c] == b.mesh.vertices[v][c]);
    }
  }
}

TEST_CASE("bar midpoint moves half way") {
  const auto b = bar();
  std::vector<ControllerTransform> t{{0, {1, 0, 0}, true}, {1, Vec3::Zero(), true}};
  const Mesh out = deform_mesh(b.mesh, b.set, t);
  CHECK((out.vertices[2] - b.mesh.vertices[2] - Vec3(0.5, 0, 0)).norm() < 1e-15);
  CHECK(out.vertices[0] == b.mesh.vertices[0] + Vec3(1, 0, 0));
}

TEST_CASE("common translation moves every weighted vertex by exactly that vector") {
  std::mt19937_64 rng(8);
  const Mesh m = random_connected_mesh(rng);
  std::vector<std::int32_t> ctrl;
  for (std::int32_t j = 0; j < static_cast<std::int32_t>(m.vertex_count()); j += 9) ctrl.push_back(j);
  auto set = controllers_at_vertices(m, ctrl);
  compute_controlling_weights(m, set);
  const Vec3 shift(0.3, -1.7, 2.25);
  std::vector<ControllerTransform> t;
  for (std::size_t j = 0; j < set.size(); ++j) t.push_back({static_cast<std::int32_t>(j), shift, true});
  const Mesh out = deform_mesh(m, set, t);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    CHECK((out.vertices[v] - m.vertices[v] - shift).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("inactive controllers renormalize the remaining weight") {
  const auto b = bar();
  std::vector<ControllerTransform> t{{0, {1, 0, 0}, true}, {1, {5, 5, 5}, false}};
  DeformStats stats;
  const Mesh out = deform_mesh(b.mesh, b.set, t, &stats);
  CHECK((out.vertices[2] - b.mesh.vertices[2] - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK(out.vertices[4] == b.mesh.vertices[4]);
  CHECK(stats.undeformed_vertices == 1);
  CHECK(stats.renormalized_vertices == b.mesh.vertex_count() - 2);
}

TEST_CASE("a missing transform for a weighted controller is an error") {
  const auto b = bar();
  std::vector<ControllerTransform> t{{0, {1, 0, 0}, true}};
  CHECK_THROWS_AS(deform_mesh(b.mesh, b.set, t), Error);
}

namespace {

// Plane facing the camera, controllers anchored on its projection.
struct PlaneScene {
  Mesh mesh;
  ControllerSet set;
  PerspectiveCamera camera = standard_camera(64, 64);
  DepthMap depth;
};

PlaneScene plane_scene() {
  PlaneScene s;
  s.mesh = make_grid_mesh(9, 9, Vec3(-0.8, -0.8, -3.0), 0.2, 0.2);
  std::vector<std::int32_t> ctrl{10, 16, 40, 64, 70};
  s.set = controllers_at_vertices(s.mesh, ctrl, &s.camera);
  compute_controlling_weights(s.mesh, s.set);
  s.depth = DepthMap(64, 64, s.camera.project({0, 0, -3.0}).ndc_depth);
  return s;
}

}  // namespace

TEST_CASE("sequence: empty, zero-flow, and scaled constant flows") {
  const auto s = plane_scene();
  CHECK(retarget_sequence(s.mesh, s.set, s.camera, {}).empty());

  const FlowField zero(64, 64);
  const FrameInput still{zero, s.depth, s.depth};
  const auto one = retarget_sequence(s.mesh, s.set, s.camera, std::span(&still, 1));
  REQUIRE(one.size() == 1);
  CHECK(format_obj(one[0].mesh) == format_obj(s.mesh));

  const auto c1 = constant_flow(64, 64, 1.5, -0.5);
  const auto c2 = constant_flow(64, 64, 3.0, -1.0);
  const std::vector<FrameInput> frames{{c1, s.depth, s.depth}, {c2, s.depth, s.depth}};
  const auto out = retarget_sequence(s.mesh, s.set, s.camera, frames, 2);
  for (std::size_t v = 0; v < s.mesh.vertex_count(); ++v) {
    const Vec3 d1 = out[0].mesh.vertices[v] - s.mesh.vertices[v];
    const Vec3 d2 = out[1].mesh.vertices[v] - s.mesh.vertices[v];
    CHECK((d2 - 2.0 * d1).norm() <= 1e-9);
  }
}

TEST_CASE("constant flow over constant depth translates like a hand unprojection") {
  const auto s = plane_scene();
  const auto flow = constant_flow(64, 64, 2.0, 1.0);
  const FrameInput f{flow, s.depth, s.depth};
  const auto r = retarget_frame(s.mesh, s.set, s.camera, f);
  const double nd = s.depth.at(0, 0);
  const Vec2 p = s.set.controllers[0].rest_pixel;
  const Vec3 expected = ray_march_oracle(s.camera, kFov, p + Vec2(2.0, 1.0), nd) -
                        ray_march_oracle(s.camera, kFov, p, nd);
  for (std::size_t v = 0; v < s.mesh.vertex_count(); ++v) {
    CHECK((r.mesh.vertices[v] - s.mesh.vertices[v] - expected).norm() < 1e-4);
  }
}

TEST_CASE("frames are independent of order and worker count") {
  const auto s = plane_scene();
  std::vector<FlowField> flows;
  for (int i = 0; i < 6; ++i) flows.push_back(constant_flow(64, 64, 0.5 * i, -0.25 * i));
  std::vector<FrameInput> fwd, rev;
  for (int i = 0; i < 6; ++i) fwd.push_back({flows[i], s.depth, s.depth});
  for (int i = 5; i >= 0; --i) rev.push_back({flows[i], s.depth, s.depth});
  const auto a = retarget_sequence(s.mesh, s.set, s.camera, fwd, 1);
  const auto b = retarget_sequence(s.mesh, s.set, s.camera, rev, 4);
  for (int i = 0; i < 6; ++i) CHECK(format_obj(a[i].mesh) == format_obj(b[5 - i].mesh));
}

TEST_CASE("a resolution mismatch names the frame") {
  const auto s = plane_scene();
  const FlowField ok(64, 64), bad(32, 32);
  const std::vector<FrameInput> frames{{ok, s.depth, s.depth}, {bad, s.depth, s.depth}};
  CHECK_THROWS_WITH_AS(retarget_sequence(s.mesh, s.set, s.camera, frames), doctest::Contains("frame 1"),
                       Error);
}

TEST_CASE("landmarks outside the silhouette are dropped") {
  const auto s = plane_scene();
  const Vec2 on = s.camera.project(s.mesh.vertices[40]).pixel;
  const std::vector<Landmark> lms{{"centre", on.x() + 0.2, on.y() + 0.1}, {"corner", 1.0, 1.0},
                                  {"off_image", -4.0, 10.0}};
  const auto a = anchor_landmarks(s.mesh, s.camera, lms);
  REQUIRE(a.set.size() == 1);
  CHECK(a.set.controllers[0].vertex == 40);
  CHECK(a.set.controllers[0].rest_pixel == Vec2(on.x() + 0.2, on.y() + 0.1));
  CHECK(a.dropped == std::vector<std::string>{"corner", "off_image"});
}
