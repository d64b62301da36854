// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "wtflow/model.hpp"
#include "wtflow/train.hpp"

namespace wtflow::cli {

/// Training run description. JSON layout (every key optional except "data"):
///
///     {
///       "preset": "image" | "desk_toy",        base values for "train" (default "image")
///       "seed": 0,
///       "data": "train.ftc",                    FTC1 container, [N, d] or [N, C, H, W]
///       "out_dir": "run",
///       "log_every": 0,                         epoch lines on stderr every k epochs (0: none)
///       "train": {"lr", "weight_decay", "epochs", "batch_size", "lr_decay_factor",
///                 "lr_decay_every", "steps_per_epoch", "beta1", "beta2", "adam_eps"},
///       "path":  {"kind", "epsilon", "t_min", "horizon"},
///       "wt":    {"enabled", "eps", "mode"},
///       "model": {"hidden", "time_dim", "omega_min", "omega_max", "activation"}
///     }
///
/// Unknown keys at any level are rejected. Relative paths resolve against the config file's directory.
struct RunConfig {
    TrainConfig train = TrainConfig::image();
    ModelConfig model;
    std::string preset = "image";
    std::filesystem::path data;
    std::filesystem::path out_dir = "run";
    std::size_t log_every = 0;
};

/// Throws FormatError on unknown keys, wrong types or invalid values.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Full document with every default spelled out.
nlohmann::json to_json(const RunConfig& cfg);

} // namespace wtflow::cli
