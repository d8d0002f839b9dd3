// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "flowrt/error.hpp"
#include "flowrt/linalg.hpp"
#include "flowrt/warp.hpp"
#include "support.hpp"

using namespace flowrt;
using namespace flowrt::testing;

namespace {

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

std::vector<FeatureMap> orthonormal_maps(std::mt19937_64& rng, std::size_t m, int c, int h, int w) {
  std::vector<std::vector<double>> raw;
  for (std::size_t j = 0; j < m; ++j) {
    const auto f = random_map(rng, c, h, w);
    raw.emplace_back(f.data().begin(), f.data().end());
  }
  modified_gram_schmidt(raw);
  std::vector<FeatureMap> out;
  for (const auto& v : raw) {
    FeatureMap f(c, h, w);
    std::copy(v.begin(), v.end(), f.data().begin());
    out.push_back(std::move(f));
  }
  return out;
}

FeatureMap constant_map(int c, int h, int w, double v) { return FeatureMap(c, h, w, v); }

FeatureMap add(const FeatureMap& a, const FeatureMap& b, double s = 1.0) {
  FeatureMap out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += s * b.data()[i];
  return out;
}

}  // namespace

TEST_CASE("zero flow is the identity, bit for bit") {
  std::mt19937_64 rng(1);
  FeatureMap x = random_map(rng, 3, 9, 7);
  x.at(1, 2, 3) = -0.0;
  const FeatureMap out = backward_warp(x, FlowField(9, 7));
  CHECK(out == x);
  CHECK(std::signbit(out.at(1, 2, 3)));
}

TEST_CASE("integer shift of a column ramp clamps at the right edge") {
  const int w = 6;
  FeatureMap x(1, 4, w);
  for (int y = 0; y < 4; ++y) {
    for (int c = 0; c < w; ++c) x.at(0, y, c) = c;
  }
  const auto out = backward_warp(x, constant_flow(4, w, 1.0, 0.0));
  for (int y = 0; y < 4; ++y) {
    for (int c = 0; c < w; ++c) CHECK(out.at(0, y, c) == std::min(c + 1, w - 1));
  }
}

TEST_CASE("sub-pixel warp matches the scalar bilinear oracle") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> f(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_map(rng, 2, 8, 8);
    FlowField flow(8, 8);
    for (int y = 0; y < 8; ++y) {
      for (int c = 0; c < 8; ++c) {
        flow.dx(y, c) = f(rng);
        flow.dy(y, c) = f(rng);
      }
    }
    const auto out = backward_warp(x, flow);
    for (int ch = 0; ch < 2; ++ch) {
      for (int y = 0; y < 8; ++y) {
        for (int c = 0; c < 8; ++c) {
          const double o = bilinear_oracle(x, ch, c + flow.dx(y, c), y + flow.dy(y, c));
          CHECK(std::abs(out.at(ch, y, c) - o) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("warp rejects mismatched sizes") {
  CHECK_THROWS_AS(backward_warp(FeatureMap(1, 4, 4), FlowField(4, 5)), Error);
}

TEST_CASE("two constant integer warps compose away from the border") {
  std::mt19937_64 rng(3);
  const auto x = random_map(rng, 1, 12, 12);
  const auto twice = backward_warp(backward_warp(x, constant_flow(12, 12, 1, -1)), constant_flow(12, 12, 1, 0));
  const auto once = backward_warp(x, constant_flow(12, 12, 2, -1));
  for (int y = 2; y < 10; ++y) {
    for (int c = 2; c < 10; ++c) CHECK(std::abs(twice.at(0, y, c) - once.at(0, y, c)) <= 1e-6);
  }
}

TEST_CASE("masks: ones, zeros, checkerboard, idempotence, range") {
  std::mt19937_64 rng(4);
  const auto x = random_map(rng, 3, 6, 6);
  CHECK(apply_mask(x, constant_map(1, 6, 6, 1.0)) == x);
  CHECK(apply_mask(x, constant_map(1, 6, 6, 0.0)) == constant_map(3, 6, 6, 0.0));
  FeatureMap board(1, 6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int c = 0; c < 6; ++c) board.at(0, y, c) = (y + c) % 2;
  }
  const auto m = apply_mask(x, board);
  for (int ch = 0; ch < 3; ++ch) {
    for (int y = 0; y < 6; ++y) {
      for (int c = 0; c < 6; ++c) {
        if (board.at(0, y, c) == 0.0) CHECK(m.at(ch, y, c) == 0.0);
        else CHECK(m.at(ch, y, c) == x.at(ch, y, c));
      }
    }
  }
  CHECK(apply_mask(m, board) == m);
  board.at(0, 0, 0) = 1.5;
  CHECK_THROWS_AS(apply_mask(x, board), Error);
  CHECK_THROWS_AS(apply_mask(x, constant_map(1, 5, 6, 1.0)), Error);
}

TEST_CASE("depth-motion combination") {
  std::mt19937_64 rng(5);
  const auto masked = random_map(rng, 2, 5, 5);
  const auto dict = DepthMotionDictionary::from_raw(orthonormal_maps(rng, 5, 2, 5, 5));
  CHECK(dict.size() == DepthMotionDictionary::kDefaultSize);
  const std::vector<double> zero(5, 0.0);
  CHECK(depth_motion_combine(masked, zero, dict) == masked);

  const auto single = DepthMotionDictionary::from_raw(orthonormal_maps(rng, 1, 2, 5, 5));
  const std::vector<double> two{2.0};
  const auto out = depth_motion_combine(masked, two, single);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.data()[i] - masked.data()[i] == doctest::Approx(2.0 * single.basis(0).data()[i]).epsilon(1e-12));
  }

  const auto beta = random_vector(rng, 5, -3, 3);
  const auto combined = depth_motion_combine(masked, beta, dict);
  const auto rec = project_depth_motion(add(combined, masked, -1.0), dict);
  CHECK(max_abs_diff(rec, beta) <= 1e-6);
  CHECK_THROWS_AS(depth_motion_combine(masked, std::vector<double>(4, 0.0), dict), Error);
}

TEST_CASE("near-orthonormal dictionaries are corrected, others rejected") {
  std::mt19937_64 rng(6);
  auto maps = orthonormal_maps(rng, 3, 1, 6, 6);
  auto nudged = maps;
  nudged[1].data()[0] += 2e-4;
  const auto fixed = DepthMotionDictionary::from_raw(nudged);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < maps[a].size(); ++i) g += fixed.basis(a).data()[i] * fixed.basis(b).data()[i];
      CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) <= 1e-12);
    }
  }
  auto far = maps;
  for (auto& v : far[2].data()) v *= 1.1;
  CHECK_THROWS_AS(DepthMotionDictionary::from_raw(far), Error);
}

TEST_CASE("upsampling keeps constants and uses half-pixel centres") {
  CHECK(upsample2x(constant_map(2, 3, 4, 0.75)) == constant_map(2, 6, 8, 0.75));
  FeatureMap x(1, 1, 2);
  x.at(0, 0, 0) = 0.0;
  x.at(0, 0, 1) = 1.0;
  const auto up = upsample2x(x);
  // Destination centres at source x = -0.25, 0.25, 0.75, 1.25.
  CHECK(up.at(0, 0, 0) == 0.0);
  CHECK(up.at(0, 0, 1) == 0.25);
  CHECK(up.at(0, 0, 2) == 0.75);
  CHECK(up.at(0, 0, 3) == 1.0);
}

TEST_CASE("pyramid refinement") {
  std::mt19937_64 rng(7);
  const auto d0 = random_map(rng, 2, 3, 3), i0 = random_map(rng, 2, 3, 3);
  const std::vector<PyramidLevel> one{{d0, i0}};
  CHECK(pyramid_refine(one) == add(d0, i0));

  const std::vector<PyramidLevel> zeros{{constant_map(1, 2, 2, 0), constant_map(1, 2, 2, 0)},
                                        {constant_map(1, 4, 4, 0), constant_map(1, 4, 4, 0)}};
  CHECK(pyramid_refine(zeros) == constant_map(1, 4, 4, 0));

  const std::vector<PyramidLevel> consts{{constant_map(1, 2, 2, 0.5), constant_map(1, 2, 2, 0.25)},
                                         {constant_map(1, 4, 4, 1.0), constant_map(1, 4, 4, 0.125)}};
  const auto out = pyramid_refine(consts);
  for (double v : out.data()) CHECK(v == doctest::Approx(1.875).epsilon(1e-15));

  const std::vector<PyramidLevel> bad{{constant_map(1, 2, 2, 0), constant_map(1, 2, 2, 0)},
                                      {constant_map(1, 5, 4, 0), constant_map(1, 5, 4, 0)}};
  CHECK_THROWS_AS(pyramid_refine(bad), Error);
  CHECK_THROWS_AS(pyramid_refine({}), Error);
}

TEST_CASE("pyramid refinement is linear in its inputs") {
  std::mt19937_64 rng(8);
  auto levels = [&] {
    std::vector<PyramidLevel> l;
    for (int k = 0; k < 6; ++k) {
      const int s = 2 << k;
      l.push_back({random_map(rng, 2, s, s), random_map(rng, 2, s, s)});
    }
    return l;
  };
  const auto a = levels(), b = levels();
  std::vector<PyramidLevel> sum;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum.push_back({add(a[k].decoded, b[k].decoded, 2.0), add(a[k].inpainted, b[k].inpainted, 2.0)});
  }
  const auto lhs = pyramid_refine(sum);
  const auto rhs = add(pyramid_refine(a), pyramid_refine(b), 2.0);
  CHECK(max_abs_diff(lhs.data(), rhs.data()) <= 1e-6);
}
