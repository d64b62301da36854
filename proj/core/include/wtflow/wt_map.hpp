// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow {

enum class WTMode { PerChannel, Global };

std::string to_string(WTMode mode);
WTMode parse_wt_mode(std::string_view name);

/// Frozen affine normalization WT(x) = gamma * x + beta with
/// gamma = 1 / sqrt(var + eps) and beta = -mean * gamma, per channel.
/// In Global mode every channel carries the same statistics.
struct WTParams {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> mean;
    std::vector<double> stddev;
    double eps = 1e-5;
    WTMode mode = WTMode::PerChannel;

    std::size_t channels() const noexcept { return gamma.size(); }
    /// gamma = 1, beta = 0 over `channels`.
    static WTParams identity(std::size_t channels);
};

/// Fits WT statistics over a batch laid out as [N], [N, C] or [N, C, H, W]
/// (channel axis 1). Statistics are population mean/std accumulated with
/// Welford's recurrence in index order. eps must be >= 0 and var + eps > 0.
WTParams fit_wt(const Tensor& features, double eps = 1e-5, WTMode mode = WTMode::PerChannel);

/// gamma * x + beta along channel axis 1 (rank-1 input is a single channel).
Tensor apply_wt(const Tensor& x, const WTParams& params);

} // namespace wtflow
