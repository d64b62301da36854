// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wtflow/model.hpp"
#include "wtflow/paths.hpp"
#include "wtflow/wt_map.hpp"

namespace wtflow {

/// Everything needed to run inference with a trained field.
struct Checkpoint {
    VectorFieldModel model;
    std::optional<WTParams> wt;
    PathSpec path;
};

/// Little-endian checkpoint layout ("WTF1", version 1):
///
///     char[4]  magic "WTF1"
///     u32      version
///     u32      dim d
///     u32      time embedding dim K
///     f64      omega_min, omega_max
///     u32      activation (0 silu, 1 tanh)
///     u32      hidden layer count H, then u32 width[H]
///     per layer (H + 1 of them): f64 weight[in*out] row-major [in, out], f64 bias[out]
///     u32      WT present (0/1); if 1:
///                u32 mode (0 per_channel, 1 global), f64 eps, u32 channels C,
///                f64 gamma[C], beta[C], mean[C], stddev[C]
///     u32      path kind (0 forward_rf, 1 forward_ot, 2 reverse_rf)
///     f64      epsilon, t_min, horizon
inline constexpr char kCheckpointMagic[4] = {'W', 'T', 'F', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError on bad magic, unknown version, truncation or trailing bytes.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace wtflow
