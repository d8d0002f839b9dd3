// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace flowrt {

double dot(std::span<const double> a, std::span<const double> b);

/// In-place modified Gram-Schmidt over equally sized vectors. A residual
/// norm below `pivot_tolerance` throws Error(kNumeric) naming the vector.
void modified_gram_schmidt(std::vector<std::vector<double>>& vectors,
                           double pivot_tolerance = 1e-10);

/// max_ij |<v_i, v_j> - delta_ij|
double orthonormality_error(const std::vector<std::vector<double>>& vectors);

}  // namespace flowrt
