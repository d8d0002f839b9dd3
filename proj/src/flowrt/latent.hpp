// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

namespace flowrt {

/// Orthonormal basis of motion directions in latent space.
class MotionDictionary {
 public:
  /// Orthonormalizes `raw` (N vectors of length L, N <= L) with modified
  /// Gram-Schmidt. Throws Error(kNumeric) on rank deficiency.
  static MotionDictionary orthonormalize(std::vector<std::vector<double>> raw);

  std::size_t size() const { return basis_.size(); }
  std::size_t dimension() const { return basis_.empty() ? 0 : basis_.front().size(); }
  std::span<const double> direction(std::size_t i) const { return basis_[i]; }
  const std::vector<std::vector<double>>& basis() const { return basis_; }

 private:
  std::vector<std::vector<double>> basis_;
};

enum class LatentRole {
  kSourceToReference,   // z_{S->R}
  kDrivingToReference,  // z_{D->R}
  kReferenceToDriving,  // w_{R->D}
  kSourceToDriving,     // z_{S->D}
};

const char* to_string(LatentRole role);

struct LatentCode {
  LatentRole role = LatentRole::kSourceToReference;
  std::vector<double> values;
};

/// Latent path w = sum_i magnitudes[i] * d_i.
LatentCode compose_path(std::span<const double> magnitudes, const MotionDictionary& dict);

/// z_{S->D} = z_{S->R} + w_{R->D}.
LatentCode compose_code(const LatentCode& source_to_reference,
                        const LatentCode& reference_to_driving);

/// Magnitudes recovered by projecting a code onto each direction.
std::vector<double> project_magnitudes(std::span<const double> code,
                                       const MotionDictionary& dict);

}  // namespace flowrt
