// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/latent.hpp"

#include <cmath>

#include "flowrt/error.hpp"
#include "flowrt/linalg.hpp"

namespace flowrt {

MotionDictionary MotionDictionary::orthonormalize(std::vector<std::vector<double>> raw) {
  if (raw.empty()) fail(ErrorCode::kInvalidArgument, "motion dictionary needs at least one vector");
  for (const auto& v : raw) {
    for (double x : v) {
      if (!std::isfinite(x)) fail(ErrorCode::kNumeric, "motion dictionary has non-finite entries");
    }
  }
  modified_gram_schmidt(raw);
  MotionDictionary d;
  d.basis_ = std::move(raw);
  return d;
}

const char* to_string(LatentRole role) {
  switch (role) {
    case LatentRole::kSourceToReference: return "z_SR";
    case LatentRole::kDrivingToReference: return "z_DR";
    case LatentRole::kReferenceToDriving: return "w_RD";
    case LatentRole::kSourceToDriving: return "z_SD";
  }
  return "?";
}

LatentCode compose_path(std::span<const double> magnitudes, const MotionDictionary& dict) {
  if (magnitudes.size() != dict.size()) {
    fail(ErrorCode::kShape, "magnitude vector has " + std::to_string(magnitudes.size()) +
                                " entries but the dictionary has " + std::to_string(dict.size()) +
                                " directions");
  }
  LatentCode w{LatentRole::kReferenceToDriving, std::vector<double>(dict.dimension(), 0.0)};
  for (std::size_t i = 0; i < dict.size(); ++i) {
    const auto d = dict.direction(i);
    for (std::size_t t = 0; t < d.size(); ++t) w.values[t] += magnitudes[i] * d[t];
  }
  return w;
}

LatentCode compose_code(const LatentCode& z, const LatentCode& w) {
  if (z.role != LatentRole::kSourceToReference || w.role != LatentRole::kReferenceToDriving) {
    fail(ErrorCode::kInvalidArgument, std::string("compose_code expects (z_SR, w_RD), got (") +
                                          to_string(z.role) + ", " + to_string(w.role) + ")");
  }
  if (z.values.size() != w.values.size()) {
    fail(ErrorCode::kShape, "latent codes differ in dimension");
  }
  LatentCode out{LatentRole::kSourceToDriving, z.values};
  for (std::size_t t = 0; t < out.values.size(); ++t) out.values[t] += w.values[t];
  return out;
}

std::vector<double> project_magnitudes(std::span<const double> code,
                                       const MotionDictionary& dict) {
  if (code.size() != dict.dimension()) fail(ErrorCode::kShape, "code dimension mismatch");
  std::vector<double> a(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) a[i] = dot(code, dict.direction(i));
  return a;
}

}  // namespace flowrt
