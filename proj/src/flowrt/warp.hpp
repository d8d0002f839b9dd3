// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "flowrt/raster.hpp"

namespace flowrt {

/// out(c, p) = x(c, p + flow(p)), bilinear, clamp-to-edge.
FeatureMap backward_warp(const FeatureMap& x, const FlowField& flow);

/// Elementwise product with a single-channel mask broadcast over channels.
/// Mask values must lie in [0, 1].
FeatureMap apply_mask(const FeatureMap& warped, const FeatureMap& mask);

/// Orthonormal depth-motion basis for one pyramid level.
class DepthMotionDictionary {
 public:
  /// Raw bases within 1e-3 of orthonormal (max Gram deviation) are
  /// corrected with modified Gram-Schmidt; worse ones are rejected.
  static DepthMotionDictionary from_raw(std::vector<FeatureMap> bases);

  static constexpr double kCorrectionTolerance = 1e-3;
  static constexpr std::size_t kDefaultSize = 5;

  std::size_t size() const { return bases_.size(); }
  const FeatureMap& basis(std::size_t j) const { return bases_[j]; }
  const std::vector<FeatureMap>& bases() const { return bases_; }

 private:
  std::vector<FeatureMap> bases_;
};

/// masked + sum_j beta[j] * d_j
FeatureMap depth_motion_combine(const FeatureMap& masked, std::span<const double> beta,
                                const DepthMotionDictionary& dict);

/// beta_j = <residual, d_j>
std::vector<double> project_depth_motion(const FeatureMap& residual,
                                         const DepthMotionDictionary& dict);

/// 2x bilinear upsampling, half-pixel (align_corners = false) convention:
/// source = (dst + 0.5) / 2 - 0.5, clamped to the raster.
FeatureMap upsample2x(const FeatureMap& x);

struct PyramidLevel {
  FeatureMap decoded;
  FeatureMap inpainted;
};

/// Coarse-to-fine residual composition. Level 0 is the coarsest:
///   out_0 = decoded_0 + inpainted_0
///   out_k = upsample2x(out_{k-1}) + decoded_k + inpainted_k
/// Every level must double the previous height and width.
FeatureMap pyramid_refine(std::span<const PyramidLevel> levels);

}  // namespace flowrt
