// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow {

/// Adaptive moments with decoupled weight decay. One step, for every entry:
///
///     m <- b1 m + (1 - b1) g
///     v <- b2 v + (1 - b2) g^2
///     m_hat = m / (1 - b1^k),  v_hat = v / (1 - b2^k)
///     theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
///
/// where k counts steps from 1.
struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.1;
};

struct AdamWState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::uint64_t step = 0;
};

/// Throws NumericalError (leaving params and state untouched) if any gradient is non-finite.
void adamw_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg, double lr);

/// lr0 * factor^floor(epoch / every); `every == 0` keeps lr0.
double step_decay_lr(double lr0, double factor, std::size_t every, std::size_t epoch);

} // namespace wtflow
