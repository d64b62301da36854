// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "wtflow/model.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

/// v(x, t) on a [B, d] batch, one row per sample.
using VectorField = std::function<Tensor(const Tensor& x, double t)>;

/// Wraps a model; the model must outlive the returned field.
VectorField as_field(const VectorFieldModel& model);

/// Rows per field evaluation. Fixed so results do not depend on the worker count.
inline constexpr std::size_t kFlowChunkRows = 256;

struct FlowOptions {
    std::size_t threads = 1;
};

/// Evaluates `field` over chunks of kFlowChunkRows rows, spread over `threads` workers.
Tensor evaluate_field(const VectorField& field, const Tensor& x, double t, const FlowOptions& opts = {});

/// Path of one sample on the uniform grid t_j = j / n.
struct Trajectory {
    std::size_t n_steps = 0;
    /// Grid indices of the recorded states (all of 0..n, or {0, n} when not recording).
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<Tensor> states;
    std::vector<double> norms;

    const Tensor& terminal() const { return states.back(); }
};

/// Paths of a batch: states[k] is the [B, d] batch at grid index steps[k];
/// norms[k][b] is the Euclidean norm of sample b there.
struct BatchTrajectory {
    std::size_t n_steps = 0;
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<Tensor> states;
    std::vector<std::vector<double>> norms;

    const Tensor& terminal() const { return states.back(); }
    std::size_t batch_size() const { return states.front().rows(); }
    Trajectory sample(std::size_t b) const;
};

/// Forward Euler x_{j+1} = x_j + (1/n) v(x_j, t_j) from t = 0 to t = 1.
/// Throws IntegrationError (with the step index) on non-finite states.
BatchTrajectory integrate_euler_batch(const Tensor& x_init, const VectorField& field, std::size_t n_steps,
                                      bool record, const FlowOptions& opts = {});

/// Single sample version; `x_init` is a [d] vector.
Trajectory integrate_euler(const Tensor& x_init, const VectorField& field, std::size_t n_steps, bool record);

/// x + v(x, 0): the n = 1 Euler endpoint. Works on [d] or [B, d].
Tensor one_step_endpoint(const Tensor& x_init, const VectorField& field, const FlowOptions& opts = {});

} // namespace wtflow
