// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowrt/error.hpp"

namespace flowrt {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kShape, "dot product of unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void modified_gram_schmidt(std::vector<std::vector<double>>& vectors,
                           double pivot_tolerance) {
  if (vectors.empty()) return;
  const std::size_t dim = vectors.front().size();
  if (vectors.size() > dim) {
    fail(ErrorCode::kShape, std::to_string(vectors.size()) + " vectors cannot be independent in " +
                                std::to_string(dim) + " dimensions");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& v = vectors[i];
    if (v.size() != dim) fail(ErrorCode::kShape, "basis vector " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < i; ++j) {
      const double proj = dot(v, vectors[j]);
      for (std::size_t t = 0; t < dim; ++t) v[t] -= proj * vectors[j][t];
    }
    const double norm = std::sqrt(dot(v, v));
    if (!(norm >= pivot_tolerance)) {
      fail(ErrorCode::kNumeric, "basis vector " + std::to_string(i) +
                                    " is linearly dependent on its predecessors");
    }
    for (auto& x : v) x /= norm;
  }
}

double orthonormality_error(const std::vector<std::vector<double>>& vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i; j < vectors.size(); ++j) {
      const double g = dot(vectors[i], vectors[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace flowrt
