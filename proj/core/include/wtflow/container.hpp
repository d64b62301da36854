// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow {

/// FTC1 feature container, all integers little-endian:
///
///     char[4]  magic "FTC1"
///     u32      version (1)
///     u32      dtype (0 f32, 1 f64)
///     u32      ndim, then u32 dims[ndim]
///     payload  product(dims) values, row-major, little-endian
enum class DType : std::uint32_t { F32 = 0, F64 = 1 };

inline constexpr char kContainerMagic[4] = {'F', 'T', 'C', '1'};
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::uint32_t kContainerMaxRank = 16;

std::size_t dtype_size(DType dtype);

struct FeatureContainer {
    Tensor tensor;
    DType dtype = DType::F64;
};

/// Throws InvalidArgument for non-finite tensors or dims that do not fit in u32.
std::vector<std::uint8_t> encode_container(const Tensor& tensor, DType dtype = DType::F64);
/// Throws FormatError on bad magic, unknown version or dtype, dim overflow, truncation or trailing bytes.
FeatureContainer decode_container(const std::vector<std::uint8_t>& bytes);

void write_container(const std::filesystem::path& path, const Tensor& tensor, DType dtype = DType::F64);
FeatureContainer read_container(const std::filesystem::path& path);

} // namespace wtflow
