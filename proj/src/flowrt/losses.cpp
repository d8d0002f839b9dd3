// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowrt/error.hpp"

namespace flowrt {

namespace {

void require_same_shape(const FeatureMap& a, const FeatureMap& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kShape, std::string(what) + ": shape mismatch (" +
                                std::to_string(a.channels()) + "x" + std::to_string(a.height()) +
                                "x" + std::to_string(a.width()) + " vs " +
                                std::to_string(b.channels()) + "x" + std::to_string(b.height()) +
                                "x" + std::to_string(b.width()) + ")");
  }
}

void require_stencil_size(const FeatureMap& d, const char* what) {
  if (d.height() < 3 || d.width() < 3) {
    fail(ErrorCode::kShape, std::string(what) + ": raster must be at least 3x3");
  }
}

double reduce(const FeatureMap& a, const FeatureMap& b, Reduction r) {
  if (a.size() == 0) return 0.0;
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    s += r == Reduction::kMeanSquared ? diff * diff : std::abs(diff);
  }
  return s / static_cast<double>(x.size());
}

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

const char* to_string(Reduction r) {
  return r == Reduction::kMeanSquared ? "mean_squared" : "mean_absolute";
}

double l1_loss(const FeatureMap& a, const FeatureMap& b) {
  require_same_shape(a, b, "l1_loss");
  return reduce(a, b, Reduction::kMeanAbsolute);
}

FeatureMap laplacian(const FeatureMap& d) {
  require_stencil_size(d, "laplacian");
  const int h = d.height(), w = d.width();
  FeatureMap out(d.channels(), h, w);
  for (int c = 0; c < d.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        out.at(c, y, x) = d.at(c, y, clampi(x + 1, 0, w - 1)) +
                          d.at(c, y, clampi(x - 1, 0, w - 1)) +
                          d.at(c, clampi(y + 1, 0, h - 1), x) +
                          d.at(c, clampi(y - 1, 0, h - 1), x) - 4.0 * d.at(c, y, x);
      }
    }
  }
  return out;
}

double smooth_loss(const FeatureMap& d, const FeatureMap& d_hat, Reduction reduction) {
  require_same_shape(d, d_hat, "smooth_loss");
  return reduce(laplacian(d), laplacian(d_hat), reduction);
}

std::pair<FeatureMap, FeatureMap> gradient_maps(const FeatureMap& d) {
  require_stencil_size(d, "gradient_maps");
  const int h = d.height(), w = d.width();
  FeatureMap gx(d.channels(), h, w), gy(d.channels(), h, w);
  for (int c = 0; c < d.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        gx.at(c, y, x) = d.at(c, y, clampi(x + 1, 0, w - 1)) - d.at(c, y, clampi(x - 1, 0, w - 1));
        gy.at(c, y, x) = d.at(c, clampi(y + 1, 0, h - 1), x) - d.at(c, clampi(y - 1, 0, h - 1), x);
      }
    }
  }
  return {std::move(gx), std::move(gy)};
}

FeatureMap max_gradient_magnitude(const FeatureMap& d, int window) {
  if (window < 1 || window % 2 == 0) {
    fail(ErrorCode::kInvalidArgument, "window must be a positive odd size");
  }
  const auto [gx, gy] = gradient_maps(d);
  const int h = d.height(), w = d.width();
  FeatureMap mag(d.channels(), h, w);
  for (int c = 0; c < d.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        mag.at(c, y, x) = std::hypot(gx.at(c, y, x), gy.at(c, y, x));
      }
    }
  }
  const int r = window / 2;
  // Separable max: rows then columns, each clipped at the borders.
  FeatureMap rows(d.channels(), h, w), out(d.channels(), h, w);
  for (int c = 0; c < d.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double m = mag.at(c, y, std::max(0, x - r));
        for (int q = std::max(0, x - r); q <= std::min(w - 1, x + r); ++q) m = std::max(m, mag.at(c, y, q));
        rows.at(c, y, x) = m;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double m = rows.at(c, std::max(0, y - r), x);
        for (int q = std::max(0, y - r); q <= std::min(h - 1, y + r); ++q) m = std::max(m, rows.at(c, q, x));
        out.at(c, y, x) = m;
      }
    }
  }
  return out;
}

double structure_preserve_loss(const FeatureMap& d, const FeatureMap& d_hat, int window,
                               Reduction reduction) {
  require_same_shape(d, d_hat, "structure_preserve_loss");
  return reduce(max_gradient_magnitude(d, window), max_gradient_magnitude(d_hat, window),
                reduction);
}

double perceptual_loss(std::span<const FeatureMap> pred, std::span<const FeatureMap> target) {
  if (pred.size() != target.size()) {
    fail(ErrorCode::kShape, "perceptual_loss: " + std::to_string(pred.size()) + " vs " +
                                std::to_string(target.size()) + " scales");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (!pred[s].same_shape(target[s])) {
      fail(ErrorCode::kShape, "perceptual_loss: shape mismatch at scale " + std::to_string(s));
    }
    total += reduce(pred[s], target[s], Reduction::kMeanAbsolute);
  }
  return total;
}

double combined_loss(double l_vgg, double l_rec, double l_sm, double l_sp,
                     const LossWeights& w) {
  for (double v : {l_vgg, l_rec, l_sm, l_sp}) {
    if (!std::isfinite(v)) fail(ErrorCode::kNumeric, "combined_loss: non-finite partial loss");
  }
  if (!(w.rec >= 0.0 && w.sm >= 0.0 && w.sp >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "combined_loss: loss weights must be non-negative");
  }
  return l_vgg + w.rec * l_rec + w.sm * l_sm + w.sp * l_sp;
}

double akd(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  if (pred.size() != gt.size()) {
    fail(ErrorCode::kShape, "akd: " + std::to_string(pred.size()) + " vs " +
                                std::to_string(gt.size()) + " landmarks");
  }
  if (pred.empty()) fail(ErrorCode::kInvalidArgument, "akd: no landmarks");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - gt[i]).norm();
  return s / static_cast<double>(pred.size());
}

double aed(std::span<const double> e1, std::span<const double> e2) {
  if (e1.size() != e2.size()) fail(ErrorCode::kShape, "aed: embedding dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) s += (e1[i] - e2[i]) * (e1[i] - e2[i]);
  return std::sqrt(s);
}

double csim(std::span<const double> e1, std::span<const double> e2) {
  if (e1.size() != e2.size()) fail(ErrorCode::kShape, "csim: embedding dimensions differ");
  double d = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    d += e1[i] * e2[i];
    n1 += e1[i] * e1[i];
    n2 += e2[i] * e2[i];
  }
  if (n1 == 0.0 || n2 == 0.0) fail(ErrorCode::kNumeric, "csim: zero-norm embedding");
  return std::clamp(d / (std::sqrt(n1) * std::sqrt(n2)), -1.0, 1.0);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

}  // namespace flowrt
