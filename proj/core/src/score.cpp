// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/score.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wtflow/error.hpp"
#include "wtflow/wt_map.hpp"

namespace wtflow {

std::string to_string(ScoreMode mode) { return mode == ScoreMode::Wt ? "wt" : "rfm"; }

ScoreMode parse_score_mode(std::string_view name) {
    if (name == "wt") return ScoreMode::Wt;
    if (name == "rfm") return ScoreMode::Rfm;
    throw InvalidArgument("unknown score mode '" + std::string(name) + "' (expected wt or rfm)");
}

double location_score(std::span<const double> endpoint, ScoreMode mode) {
    const double r = norm2(endpoint);
    if (mode == ScoreMode::Wt) return r;
    return std::abs(r - std::sqrt(static_cast<double>(endpoint.size())));
}

namespace {

Shape map_shape(const Tensor& features) {
    if (features.rank() == 4) return {features.dim(0), features.dim(2), features.dim(3)};
    if (features.rank() == 2) return {features.dim(0), 1, 1};
    throw InvalidArgument("anomaly_map: features must be [N, d] or [N, C, H, W], got " +
                          shape_to_string(features.shape()));
}

Tensor score_rows(const Tensor& rows, const Shape& shape, const VectorField& field, std::size_t n_steps,
                  ScoreMode mode, const FlowOptions& opts) {
    const BatchTrajectory traj = integrate_euler_batch(rows, field, n_steps, false, opts);
    const Tensor& end = traj.terminal();
    Tensor map(shape);
    for (std::size_t i = 0; i < end.rows(); ++i) map[i] = location_score(end.row(i), mode);
    return map;
}

} // namespace

Tensor anomaly_map(const Tensor& features, const VectorField& field, std::size_t n_steps, ScoreMode mode,
                   const FlowOptions& opts) {
    const Shape shape = map_shape(features);
    return score_rows(to_location_rows(features), shape, field, n_steps, mode, opts);
}

Tensor anomaly_map(const Tensor& features, const Checkpoint& ckpt, std::size_t n_steps, ScoreMode mode,
                   const FlowOptions& opts) {
    const Shape shape = map_shape(features);
    Tensor rows = to_location_rows(features);
    if (rows.cols() != ckpt.model.dim()) {
        throw InvalidArgument("anomaly_map: features have " + std::to_string(rows.cols()) +
                              " channels but the model expects " + std::to_string(ckpt.model.dim()));
    }
    if (ckpt.wt) {
        if (ckpt.wt->channels() != rows.cols()) throw InvalidArgument("anomaly_map: WT map does not match features");
        rows = apply_wt(rows, *ckpt.wt);
    }
    return score_rows(rows, shape, as_field(ckpt.model), n_steps, mode, opts);
}

double topk_image_score(std::span<const double> map, double k_frac) {
    if (map.empty()) throw InvalidArgument("topk_image_score: empty map");
    if (!(k_frac > 0.0 && k_frac <= 1.0)) throw InvalidArgument("topk_image_score: k_frac must lie in (0, 1]");
    const auto n = map.size();
    auto k = static_cast<std::size_t>(std::ceil(k_frac * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::vector<double> v(map.begin(), map.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(), std::greater<>());
    std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += v[i];
    return s / static_cast<double>(k);
}

std::vector<double> image_scores(const Tensor& maps, double k_frac) {
    if (maps.rank() < 1 || maps.dim(0) == 0) throw InvalidArgument("image_scores: empty map batch");
    const std::size_t n = maps.dim(0);
    const std::size_t per = maps.size() / n;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = topk_image_score(maps.data().subspan(i * per, per), k_frac);
    return out;
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InvalidArgument("auroc: scores and labels differ in length");
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("auroc: labels must be 0 or 1");
        if (std::isnan(scores[i])) throw InvalidArgument("auroc: NaN score");
        n_pos += static_cast<std::size_t>(labels[i]);
    }
    const std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InvalidArgument("auroc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of average (1-based) ranks of the positives.
    double pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double pixel_auroc(const Tensor& maps, const Tensor& mask) {
    require_same_shape(maps, mask, "pixel_auroc");
    std::vector<int> labels(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] != 0.0 && mask[i] != 1.0) throw InvalidArgument("pixel_auroc: mask must be 0/1");
        labels[i] = mask[i] == 1.0 ? 1 : 0;
    }
    return auroc(maps.data(), labels);
}

} // namespace wtflow
