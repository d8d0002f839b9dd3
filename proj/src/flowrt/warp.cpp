// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowrt/error.hpp"
#include "flowrt/linalg.hpp"

namespace flowrt {

namespace {

std::string shape_str(const FeatureMap& m) {
  return std::to_string(m.channels()) + "x" + std::to_string(m.height()) + "x" +
         std::to_string(m.width());
}

void add_into(FeatureMap& dst, const FeatureMap& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

FeatureMap backward_warp(const FeatureMap& x, const FlowField& flow) {
  if (x.height() != flow.height() || x.width() != flow.width()) {
    fail(ErrorCode::kShape, "warp: feature map " + shape_str(x) + " vs flow " +
                                std::to_string(flow.height()) + "x" + std::to_string(flow.width()));
  }
  if (!flow.map().all_finite()) fail(ErrorCode::kNumeric, "warp: flow has non-finite values");
  FeatureMap out(x.channels(), x.height(), x.width());
  for (int y = 0; y < x.height(); ++y) {
    for (int px = 0; px < x.width(); ++px) {
      const double sx = px + flow.dx(y, px);
      const double sy = y + flow.dy(y, px);
      for (int c = 0; c < x.channels(); ++c) out.at(c, y, px) = sample_bilinear(x, c, sx, sy);
    }
  }
  return out;
}

FeatureMap apply_mask(const FeatureMap& warped, const FeatureMap& mask) {
  if (mask.channels() != 1 || !mask.same_extent(warped)) {
    fail(ErrorCode::kShape, "mask " + shape_str(mask) + " does not fit feature map " +
                                shape_str(warped));
  }
  for (double m : mask.data()) {
    if (!(m >= 0.0 && m <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "mask value " + std::to_string(m) + " outside [0, 1]");
    }
  }
  FeatureMap out(warped.channels(), warped.height(), warped.width());
  const auto m = mask.plane(0);
  for (int c = 0; c < warped.channels(); ++c) {
    const auto src = warped.plane(c);
    auto dst = out.data().subspan(c * warped.plane_size(), warped.plane_size());
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = m[i] * src[i];
  }
  return out;
}

DepthMotionDictionary DepthMotionDictionary::from_raw(std::vector<FeatureMap> bases) {
  DepthMotionDictionary d;
  if (bases.empty()) return d;
  for (std::size_t j = 1; j < bases.size(); ++j) {
    if (!bases[j].same_shape(bases[0])) {
      fail(ErrorCode::kShape, "depth dictionary basis " + std::to_string(j) +
                                  " differs in shape from basis 0");
    }
  }
  std::vector<std::vector<double>> vecs;
  for (const auto& b : bases) {
    if (!b.all_finite()) fail(ErrorCode::kNumeric, "depth dictionary has non-finite values");
    vecs.emplace_back(b.data().begin(), b.data().end());
  }
  const double err = orthonormality_error(vecs);
  if (err > kCorrectionTolerance) {
    fail(ErrorCode::kNumeric, "depth dictionary is too far from orthonormal (Gram error " +
                                  std::to_string(err) + ")");
  }
  modified_gram_schmidt(vecs);
  for (std::size_t j = 0; j < bases.size(); ++j) {
    std::copy(vecs[j].begin(), vecs[j].end(), bases[j].data().begin());
  }
  d.bases_ = std::move(bases);
  return d;
}

FeatureMap depth_motion_combine(const FeatureMap& masked, std::span<const double> beta,
                                const DepthMotionDictionary& dict) {
  if (beta.size() != dict.size()) {
    fail(ErrorCode::kShape, "beta has " + std::to_string(beta.size()) +
                                " entries, dictionary has " + std::to_string(dict.size()));
  }
  FeatureMap out = masked;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    const FeatureMap& d = dict.basis(j);
    if (!d.same_shape(masked)) {
      fail(ErrorCode::kShape, "dictionary basis " + shape_str(d) + " vs feature map " +
                                  shape_str(masked));
    }
    auto o = out.data();
    auto s = d.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += beta[j] * s[i];
  }
  return out;
}

std::vector<double> project_depth_motion(const FeatureMap& residual,
                                         const DepthMotionDictionary& dict) {
  std::vector<double> beta(dict.size());
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (!dict.basis(j).same_shape(residual)) fail(ErrorCode::kShape, "projection shape mismatch");
    beta[j] = dot(residual.data(), dict.basis(j).data());
  }
  return beta;
}

FeatureMap upsample2x(const FeatureMap& x) {
  FeatureMap out(x.channels(), x.height() * 2, x.width() * 2);
  for (int c = 0; c < x.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      const double sy = (y + 0.5) / 2.0 - 0.5;
      for (int px = 0; px < out.width(); ++px) {
        const double sx = (px + 0.5) / 2.0 - 0.5;
        out.at(c, y, px) = sample_bilinear(x, c, sx, sy);
      }
    }
  }
  return out;
}

FeatureMap pyramid_refine(std::span<const PyramidLevel> levels) {
  if (levels.empty()) fail(ErrorCode::kInvalidArgument, "pyramid needs at least one level");
  FeatureMap out;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& lvl = levels[k];
    if (!lvl.decoded.same_shape(lvl.inpainted)) {
      fail(ErrorCode::kShape, "pyramid level " + std::to_string(k) + ": decoded " +
                                  shape_str(lvl.decoded) + " vs inpainted " +
                                  shape_str(lvl.inpainted));
    }
    if (k == 0) {
      out = lvl.decoded;
    } else {
      if (lvl.decoded.height() != 2 * out.height() || lvl.decoded.width() != 2 * out.width() ||
          lvl.decoded.channels() != out.channels()) {
        fail(ErrorCode::kShape, "pyramid level " + std::to_string(k) + " (" +
                                    shape_str(lvl.decoded) + ") does not double level " +
                                    std::to_string(k - 1) + " (" + shape_str(out) + ")");
      }
      out = upsample2x(out);
      add_into(out, lvl.decoded);
    }
    add_into(out, lvl.inpainted);
  }
  return out;
}

}  // namespace flowrt
