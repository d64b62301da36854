// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wtflow/checkpoint.hpp"
#include "wtflow/flow.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

/// Per-location score of an integrated endpoint x1:
/// Wt scores the radius ||x1||, Rfm the distance |‖x1‖ - sqrt(d)| from the Gaussian shell.
enum class ScoreMode { Wt, Rfm };

std::string to_string(ScoreMode mode);
/// Accepts "wt" and "rfm".
ScoreMode parse_score_mode(std::string_view name);

double location_score(std::span<const double> endpoint, ScoreMode mode);

/// Integrates every location of `features` ([N, C, H, W], or [N, d] as one
/// location per image) through the checkpoint's field after its WT map, and
/// returns the [N, H, W] score map ([N, 1, 1] for rank-2 input).
/// Throws InvalidArgument when the channel count disagrees with the model or WT map.
Tensor anomaly_map(const Tensor& features, const Checkpoint& ckpt, std::size_t n_steps, ScoreMode mode,
                   const FlowOptions& opts = {});

/// Same as above with an explicit field (no WT applied); used by tests and baselines.
Tensor anomaly_map(const Tensor& features, const VectorField& field, std::size_t n_steps, ScoreMode mode,
                   const FlowOptions& opts = {});

inline constexpr double kDefaultTopKFraction = 0.03;

/// Mean of the ceil(k_frac * N) largest entries.
double topk_image_score(std::span<const double> map, double k_frac = kDefaultTopKFraction);

/// One top-k score per image of an [N, ...] map.
std::vector<double> image_scores(const Tensor& maps, double k_frac = kDefaultTopKFraction);

/// Mann-Whitney U / (n_pos * n_neg) with ties counted half. Labels are 0/1.
/// Throws InvalidArgument if only one class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// AUROC over all pixels of a map against a same-shaped 0/1 mask.
double pixel_auroc(const Tensor& maps, const Tensor& mask);

} // namespace wtflow
