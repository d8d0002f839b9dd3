// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "flowrt/mesh.hpp"
#include "flowrt/raster.hpp"

namespace flowrt {

/// Reduction used for the depth losses. The default reads the |.|_2 in the
/// smooth and structure losses as a squared difference averaged over
/// pixels; kMeanAbsolute is available for comparison.
enum class Reduction { kMeanSquared, kMeanAbsolute };

const char* to_string(Reduction r);

/// Mean absolute difference over every element.
double l1_loss(const FeatureMap& a, const FeatureMap& b);

/// 5-point Laplacian per channel with replicate padding. H, W >= 3.
FeatureMap laplacian(const FeatureMap& d);

double smooth_loss(const FeatureMap& d, const FeatureMap& d_hat,
                   Reduction reduction = Reduction::kMeanSquared);

/// Central differences D(x+1) - D(x-1) (no 1/2 factor), replicate padding.
std::pair<FeatureMap, FeatureMap> gradient_maps(const FeatureMap& d);

/// Per pixel, the largest gradient magnitude |grad D(q)| over the window
/// centred on p (window clipped at the borders).
FeatureMap max_gradient_magnitude(const FeatureMap& d, int window);

double structure_preserve_loss(const FeatureMap& d, const FeatureMap& d_hat, int window = 5,
                               Reduction reduction = Reduction::kMeanSquared);

/// Sum over scales of the per-scale mean absolute difference.
double perceptual_loss(std::span<const FeatureMap> pred, std::span<const FeatureMap> target);

struct LossWeights {
  double rec = 200.0;
  double sm = 200.0;
  double sp = 50.0;
};

/// L = l_vgg + rec * l_rec + sm * l_sm + sp * l_sp
double combined_loss(double l_vgg, double l_rec, double l_sm, double l_sp,
                     const LossWeights& weights = {});

/// Average keypoint distance: mean Euclidean distance of paired landmarks.
double akd(std::span<const Vec2> pred, std::span<const Vec2> gt);
/// Euclidean distance between identity embeddings.
double aed(std::span<const double> e1, std::span<const double> e2);
/// Cosine similarity between identity embeddings.
double csim(std::span<const double> e1, std::span<const double> e2);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population
};
Summary summarize(std::span<const double> values);

}  // namespace flowrt
