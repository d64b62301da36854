// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/optimizer.hpp"

#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow {

void adamw_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamWState& state,
                const AdamWConfig& cfg, double lr) {
    if (grads.size() != params.size()) throw InvalidArgument("adamw_step: gradient count mismatch");
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (grads[p].shape() != params[p].shape()) throw InvalidArgument("adamw_step: gradient shape mismatch");
        if (!grads[p].all_finite()) {
            throw NumericalError("adamw_step: non-finite gradient in parameter tensor " + std::to_string(p));
        }
    }
    if (state.m.empty()) {
        for (const Tensor& p : params) {
            state.m.emplace_back(p.shape());
            state.v.emplace_back(p.shape());
        }
    }
    state.step += 1;
    const double k = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, k);
    const double bc2 = 1.0 - std::pow(cfg.beta2, k);

    for (std::size_t p = 0; p < params.size(); ++p) {
        auto theta = params[p].data();
        auto m = state.m[p].data();
        auto v = state.v[p].data();
        const auto g = grads[p].data();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            const double update = m_hat / (std::sqrt(v_hat) + cfg.eps);
            theta[i] = theta[i] - lr * (update + cfg.weight_decay * theta[i]);
        }
    }
}

double step_decay_lr(double lr0, double factor, std::size_t every, std::size_t epoch) {
    if (every == 0) return lr0;
    return lr0 * std::pow(factor, static_cast<double>(epoch / every));
}

} // namespace wtflow
