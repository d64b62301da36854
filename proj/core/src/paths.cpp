// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/paths.hpp"

#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow {

std::string to_string(PathKind kind) {
    switch (kind) {
    case PathKind::ForwardRF: return "forward_rf";
    case PathKind::ForwardOT: return "forward_ot";
    case PathKind::ReverseRF: return "reverse_rf";
    }
    return "unknown";
}

PathKind parse_path_kind(std::string_view name) {
    if (name == "forward_rf") return PathKind::ForwardRF;
    if (name == "forward_ot") return PathKind::ForwardOT;
    if (name == "reverse_rf") return PathKind::ReverseRF;
    throw InvalidArgument("unknown path kind '" + std::string(name) + "'");
}

void PathSpec::validate() const {
    if (kind == PathKind::ForwardOT && !(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("forward_ot requires 0 < epsilon < 1");
    }
    if (!(t_min > 0.0 && t_min < 0.5)) throw InvalidArgument("t_min must lie in (0, 0.5)");
    if (!(horizon > 0.0 && horizon <= 1.0)) throw InvalidArgument("horizon must lie in (0, 1]");
}

PathSchedule schedule(const PathSpec& spec, double t) {
    switch (spec.kind) {
    case PathKind::ForwardRF:
        return {t, 1.0, 1.0 - t, -1.0};
    case PathKind::ForwardOT:
        return {t, 1.0, 1.0 - (1.0 - spec.epsilon) * t, -(1.0 - spec.epsilon)};
    case PathKind::ReverseRF:
        return {1.0 - t, -1.0, t, 1.0};
    }
    throw InvalidArgument("unknown path kind");
}

namespace {

void require_unit_time(double t, const char* what) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InvalidArgument(std::string(what) + ": t must lie in [0, 1], got " + std::to_string(t));
    }
}

} // namespace

Tensor interpolate(const Tensor& x0, const Tensor& x1, double t) {
    require_same_shape(x0, x1, "interpolate");
    require_unit_time(t, "interpolate");
    if (t == 0.0) return x0;
    if (t == 1.0) return x1;
    return axpby(1.0 - t, x0, t, x1);
}

Tensor conditional_target(const Tensor& x_start, const Tensor& x_end) {
    require_same_shape(x_start, x_end, "conditional_target");
    return sub(x_end, x_start);
}

Tensor eval_reverse_field(const Tensor& x_t, const Tensor& x0, double t, const PathSpec& spec) {
    if (spec.kind != PathKind::ReverseRF) {
        throw InvalidArgument("eval_reverse_field requires a reverse_rf path");
    }
    require_same_shape(x_t, x0, "eval_reverse_field");
    if (!(t >= spec.t_min)) {
        throw SingularityError("reverse conditional field is undefined at t=" + std::to_string(t) +
                               " (sigma_t = t vanishes; t_min=" + std::to_string(spec.t_min) + ")");
    }
    if (t > 1.0) throw InvalidArgument("eval_reverse_field: t must not exceed 1");
    Tensor out(x_t.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = -x0[i] + (x_t[i] - (1.0 - t) * x0[i]) / t;
    }
    return out;
}

Tensor eval_forward_ot_field(const Tensor& x_t, const Tensor& x1, double t, double epsilon,
                             double t_min) {
    require_same_shape(x_t, x1, "eval_forward_ot_field");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
    if (!(t >= 0.0 && t < 1.0)) throw InvalidArgument("eval_forward_ot_field: t must lie in [0, 1)");
    const double sigma = 1.0 - (1.0 - epsilon) * t;
    if (sigma < t_min) {
        throw SingularityError("forward OT field denominator " + std::to_string(sigma) +
                               " below guard " + std::to_string(t_min));
    }
    const double k = -(1.0 - epsilon) / sigma;
    Tensor out(x_t.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x1[i] + k * (x_t[i] - t * x1[i]);
    return out;
}

Tensor conditional_field(const PathSpec& spec, const Tensor& x, const Tensor& anchor, double t) {
    if (spec.kind == PathKind::ReverseRF) return eval_reverse_field(x, anchor, t, spec);
    if (spec.kind == PathKind::ForwardOT) {
        return eval_forward_ot_field(x, anchor, t, spec.epsilon, spec.t_min);
    }
    require_same_shape(x, anchor, "conditional_field");
    require_unit_time(t, "conditional_field");
    const PathSchedule s = schedule(spec, t);
    if (s.sigma < spec.t_min) {
        throw SingularityError("forward RF field is undefined at t=" + std::to_string(t));
    }
    const double k = s.d_sigma / s.sigma;
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = anchor[i] + k * (x[i] - t * anchor[i]);
    return out;
}

} // namespace wtflow
