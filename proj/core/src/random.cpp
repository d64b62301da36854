// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/random.hpp"

#include <cmath>
#include <numbers>

#include "wtflow/error.hpp"

namespace wtflow {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t sequence)
    : seed_(seed), sequence_(sequence) {
    state_ = 0;
    inc_ = (sequence << 1u) | 1u;
    step();
    state_ += seed;
    step();
}

std::uint32_t RandomStream::next_u32() noexcept {
    const std::uint64_t old = state_;
    step();
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

double RandomStream::uniform() noexcept {
    const std::uint32_t a = next_u32() >> 5u;
    const std::uint32_t b = next_u32() >> 6u;
    return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) / 9007199254740992.0;
}

double RandomStream::uniform_open() noexcept {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return u;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("RandomStream::below: n must be positive");
    // Rejection sampling on 64-bit draws keeps the result unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        const std::uint64_t r = (hi << 32u) | lo;
        if (r >= threshold) return r % n;
    }
}

double RandomStream::normal() noexcept {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    return r * std::cos(angle);
}

std::vector<std::size_t> RandomStream::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

Tensor sample_standard_normal(RandomStream& stream, const Shape& shape) {
    if (shape_product(shape) == 0) {
        throw InvalidArgument("sample_standard_normal: shape " + shape_to_string(shape) +
                              " has no elements");
    }
    Tensor out(shape);
    for (double& v : out.data()) v = stream.normal();
    return out;
}

} // namespace wtflow
