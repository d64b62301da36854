// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "wtflow/tensor.hpp"

namespace wtflow {

/// Conditional Gaussian probability paths with straight-line means.
///
///   ForwardRF  mu_t = t x1,        sigma_t = 1 - t            (noise -> data)
///   ForwardOT  mu_t = t x1,        sigma_t = 1 - (1 - eps) t  (noise -> data)
///   ReverseRF  mu_t = (1 - t) x0,  sigma_t = t                (data -> noise)
///
/// In every case the conditional field is mu_t' + sigma_t'/sigma_t (x - mu_t),
/// which is undefined where sigma_t vanishes (t = 0 for ReverseRF).
enum class PathKind { ForwardRF, ForwardOT, ReverseRF };

std::string to_string(PathKind kind);
/// Accepts "forward_rf", "forward_ot", "reverse_rf".
PathKind parse_path_kind(std::string_view name);

struct PathSpec {
    PathKind kind = PathKind::ReverseRF;
    /// Noise floor of ForwardOT; ignored by the other kinds.
    double epsilon = 0.0;
    /// Smallest sigma_t at which a conditional field is evaluated.
    double t_min = 1e-4;
    /// Training times are drawn from (0, horizon).
    double horizon = 1.0;

    void validate() const;
};

/// mu_t = mean_coeff * anchor, with derivative d_mean_coeff * anchor.
struct PathSchedule {
    double mean_coeff;
    double d_mean_coeff;
    double sigma;
    double d_sigma;
};

PathSchedule schedule(const PathSpec& spec, double t);

/// (1 - t) x0 + t x1. Bit-exact at t = 0 and t = 1.
Tensor interpolate(const Tensor& x0, const Tensor& x1, double t);

/// Regression target of the straight path: x_end - x_start.
Tensor conditional_target(const Tensor& x_start, const Tensor& x_end);

/// Reverse-path conditional field -x0 + (x_t - (1 - t) x0) / t.
/// Throws SingularityError for t < spec.t_min.
Tensor eval_reverse_field(const Tensor& x_t, const Tensor& x0, double t, const PathSpec& spec);

/// Forward OT field x1 - (1 - eps)/(1 - (1 - eps) t) (x_t - t x1).
/// Throws SingularityError when the denominator is below t_min.
Tensor eval_forward_ot_field(const Tensor& x_t, const Tensor& x1, double t, double epsilon,
                             double t_min = 1e-4);

/// Conditional field of any PathKind given its data anchor (x1 for forward kinds, x0 for reverse).
Tensor conditional_field(const PathSpec& spec, const Tensor& x, const Tensor& anchor, double t);

} // namespace wtflow
