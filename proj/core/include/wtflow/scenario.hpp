// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow {

/// Seeded train/test split. Train rows are all normal; test labels are 0 (normal) or 1 (anomalous).
/// For point scenarios the tensors are [N, d]; for feature scenarios [N, C, H, W].
struct Dataset {
    std::string name;
    Tensor train;
    Tensor test;
    std::vector<int> test_labels;
};

/// Known names:
///
///   disc_grid           11 x 11 grid over [-sqrt2, sqrt2]^2 clipped to ||x|| < sqrt2; test = the grid,
///                       all normal. n_train and n_test are ignored.
///   origin_blob         train N(0, I), test N(0, 0.01 I) (all normal).
///   intersecting        train N(0, I); test half N(0, I), half anomalies N((-1,-1), 0.3 I).
///   disjoint            train N(0, 0.25 I); test half N(0, 0.25 I), half uniform on the radius-4 circle.
///   synthetic_features  [N, 16, 8, 8] ReLU features of a low-rank latent; anomalous test images
///                       carry a shifted 3 x 3 patch. n_train images train, n_test test images.
///
/// Output depends only on (name, n_train, n_test, seed). Throws InvalidArgument for unknown names.
Dataset gen_scenario(std::string_view name, std::size_t n_train, std::size_t n_test, std::uint64_t seed);

std::vector<std::string> scenario_names();

/// The disc_grid points: an n x n grid over [-r, r]^2 keeping ||x|| < r.
Tensor disc_grid(std::size_t n = 11, double radius = 1.4142135623730951);

struct FeatureSpec {
    std::size_t channels = 16;
    std::size_t height = 8;
    std::size_t width = 8;
    std::size_t latent = 4;
    std::size_t patch = 3;
    double shift = 4.0;
    double noise = 0.05;
};

/// Synthetic non-negative feature maps. Test images alternate normal / anomalous, starting normal.
Dataset synthetic_features(const FeatureSpec& spec, std::size_t n_train, std::size_t n_test, std::uint64_t seed);

} // namespace wtflow
