// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "flowrt/error.hpp"
#include "flowrt/latent.hpp"
#include "flowrt/linalg.hpp"
#include "support.hpp"

using namespace flowrt;
using namespace flowrt::testing;

namespace {

std::vector<std::vector<double>> random_basis(std::mt19937_64& rng, std::size_t n, std::size_t l) {
  std::vector<std::vector<double>> raw;
  for (std::size_t i = 0; i < n; ++i) raw.push_back(random_vector(rng, l));
  return raw;
}

}  // namespace

TEST_CASE("textbook Gram-Schmidt") {
  const auto d = MotionDictionary::orthonormalize({{1, 0}, {1, 1}});
  CHECK(d.basis() == std::vector<std::vector<double>>{{1, 0}, {0, 1}});
}

TEST_CASE("orthonormal input is returned unchanged") {
  std::mt19937_64 rng(1);
  const auto d = MotionDictionary::orthonormalize(random_basis(rng, 6, 16));
  const auto again = MotionDictionary::orthonormalize(d.basis());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(max_abs_diff(again.direction(i), d.direction(i)) <= 1e-12);
}

TEST_CASE("random basis: Gram matrix and span") {
  std::mt19937_64 rng(2);
  const auto raw = random_basis(rng, 8, 32);
  const auto d = MotionDictionary::orthonormalize(raw);
  CHECK(orthonormality_error(d.basis()) <= 1e-6);
  for (const auto& v : raw) {
    // Residual after projecting onto the dictionary.
    std::vector<double> r = v;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double c = dot(v, d.direction(i));
      for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * d.direction(i)[k];
    }
    double norm = 0.0;
    for (double x : r) norm += x * x;
    CHECK(std::sqrt(norm) <= 1e-6);
  }
}

TEST_CASE("rank deficiency names the vector") {
  CHECK_THROWS_WITH_AS(MotionDictionary::orthonormalize({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}),
                       doctest::Contains("2"), Error);
  CHECK_THROWS_AS(MotionDictionary::orthonormalize({{1, 0}, {0, 1}, {1, 1}}), Error);
}

TEST_CASE("compose_path basics") {
  std::mt19937_64 rng(3);
  const auto d = MotionDictionary::orthonormalize(random_basis(rng, 5, 12));
  const auto zero = compose_path(std::vector<double>(5, 0.0), d);
  CHECK(zero.role == LatentRole::kReferenceToDriving);
  for (double v : zero.values) CHECK(v == 0.0);
  std::vector<double> e(5, 0.0);
  e[3] = 1.0;
  const auto pick = compose_path(e, d);
  for (std::size_t k = 0; k < 12; ++k) CHECK(pick.values[k] == d.direction(3)[k]);
  const auto a = random_vector(rng, 5);
  CHECK(max_abs_diff(project_magnitudes(compose_path(a, d).values, d), a) <= 1e-6);
  CHECK_THROWS_AS(compose_path(std::vector<double>(4, 1.0), d), Error);
}

TEST_CASE("compose_code sums codes and checks roles") {
  std::mt19937_64 rng(4);
  const auto d = MotionDictionary::orthonormalize(random_basis(rng, 4, 10));
  const LatentCode z{LatentRole::kSourceToReference, random_vector(rng, 10)};
  const auto w0 = compose_path(std::vector<double>(4, 0.0), d);
  const auto same = compose_code(z, w0);
  CHECK(same.role == LatentRole::kSourceToDriving);
  CHECK(same.values == z.values);

  const auto w = compose_path(random_vector(rng, 4), d);
  const LatentCode origin{LatentRole::kSourceToReference, std::vector<double>(10, 0.0)};
  CHECK(compose_code(origin, w).values == w.values);

  const auto sd = compose_code(z, w);
  std::vector<double> diff(10);
  for (int k = 0; k < 10; ++k) diff[k] = sd.values[k] - z.values[k];
  CHECK(max_abs_diff(diff, w.values) <= 1e-9);

  CHECK_THROWS_AS(compose_code(w, z), Error);
  const LatentCode short_code{LatentRole::kSourceToReference, std::vector<double>(9, 0.0)};
  CHECK_THROWS_AS(compose_code(short_code, w), Error);
}

TEST_CASE("compose_path is additive") {
  std::mt19937_64 rng(5);
  const auto d = MotionDictionary::orthonormalize(random_basis(rng, 20, 64));
  const auto a = random_vector(rng, 20), b = random_vector(rng, 20);
  std::vector<double> ab(20);
  for (int i = 0; i < 20; ++i) ab[i] = a[i] + b[i];
  const auto lhs = compose_path(ab, d).values;
  const auto wa = compose_path(a, d).values, wb = compose_path(b, d).values;
  std::vector<double> rhs(64);
  for (int k = 0; k < 64; ++k) rhs[k] = wa[k] + wb[k];
  CHECK(max_abs_diff(lhs, rhs) <= 1e-9);
}
