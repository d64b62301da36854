// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wtflow/tape.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

/// Builds a scalar on `tape` from parameter leaves (same order as passed to grad_check).
using ScalarFn = std::function<ad::Var(ad::Tape& tape, std::span<const ad::Var> params)>;

struct GradCheckOptions {
    double step = 1e-5;
    /// Check at most this many parameter entries, chosen with a seeded stream; 0 checks all.
    std::size_t max_entries = 0;
    std::uint64_t seed = 0;
};

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t worst_entry = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t entries_checked = 0;
};

/// Compares tape gradients against central differences:
/// max |ad - fd| / max(|ad|, |fd|, 1e-12) over the checked entries.
GradCheckReport grad_check(const ScalarFn& fn, const std::vector<Tensor>& params,
                           const GradCheckOptions& options = {});

/// Evaluates `fn` at `params` without differentiating.
double evaluate_scalar(const ScalarFn& fn, const std::vector<Tensor>& params);

} // namespace wtflow
