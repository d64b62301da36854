// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow {

/// Seeded random stream.
///
/// The generator is PCG32 (XSH-RR output, 64-bit LCG state, multiplier
/// 6364136223846793005). Seeding follows the reference `pcg32_srandom_r`:
///
///     inc   = (sequence << 1) | 1
///     state = 0; step(); state += seed; step();
///
/// Uniform doubles take two 32-bit outputs a, b and return
/// ((a >> 5) * 2^26 + (b >> 6)) / 2^53, a value in [0, 1).
///
/// Standard normals use Box-Muller on two uniforms u1, u2:
/// r = sqrt(-2 log(1 - u1)), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2).
/// z0 is returned first and z1 is cached for the next call.
class RandomStream {
public:
    static constexpr std::uint64_t kDefaultSequence = 54;

    explicit RandomStream(std::uint64_t seed, std::uint64_t sequence = kDefaultSequence);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t sequence() const noexcept { return sequence_; }

    /// Raw 32-bit output.
    std::uint32_t next_u32() noexcept;
    /// Uniform in [0, 1).
    double uniform() noexcept;
    /// Uniform in the open interval (0, 1); exact zeros are rejected.
    double uniform_open() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal deviate.
    double normal() noexcept;

    /// Independent stream sharing this seed but on another LCG sequence.
    RandomStream derive(std::uint64_t sequence) const { return RandomStream(seed_, sequence); }

    /// Fisher-Yates shuffle of [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

private:
    void step() noexcept { state_ = state_ * 6364136223846793005ULL + inc_; }

    std::uint64_t seed_;
    std::uint64_t sequence_;
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    std::optional<double> spare_normal_;
};

/// I.i.d. standard normal tensor. Throws InvalidArgument for zero-element shapes.
Tensor sample_standard_normal(RandomStream& stream, const Shape& shape);

} // namespace wtflow
