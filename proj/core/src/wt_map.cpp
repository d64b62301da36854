// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/wt_map.hpp"

#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow {

namespace {

struct Layout {
    std::size_t outer;
    std::size_t channels;
    std::size_t inner;
};

Layout layout_of(const Tensor& x) {
    const auto& s = x.shape();
    if (s.empty()) throw InvalidArgument("WT map needs at least a rank-1 tensor");
    if (s.size() == 1) return {s[0], 1, 1};
    std::size_t inner = 1;
    for (std::size_t i = 2; i < s.size(); ++i) inner *= s[i];
    return {s[0], s[1], inner};
}

struct Welford {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v) noexcept {
        count += 1.0;
        const double delta = v - mean;
        mean += delta / count;
        m2 += delta * (v - mean);
    }
    double variance() const noexcept { return count > 0.0 ? m2 / count : 0.0; }
};

} // namespace

std::string to_string(WTMode mode) { return mode == WTMode::Global ? "global" : "per_channel"; }

WTMode parse_wt_mode(std::string_view name) {
    if (name == "per_channel") return WTMode::PerChannel;
    if (name == "global") return WTMode::Global;
    throw InvalidArgument("unknown WT mode '" + std::string(name) + "'");
}

WTParams WTParams::identity(std::size_t channels) {
    WTParams p;
    p.gamma.assign(channels, 1.0);
    p.beta.assign(channels, 0.0);
    p.mean.assign(channels, 0.0);
    p.stddev.assign(channels, 1.0);
    p.eps = 0.0;
    return p;
}

WTParams fit_wt(const Tensor& features, double eps, WTMode mode) {
    if (features.empty()) throw InvalidArgument("fit_wt: empty batch");
    if (!(eps >= 0.0)) throw InvalidArgument("fit_wt: eps must be non-negative");
    const Layout l = layout_of(features);

    std::vector<Welford> acc(mode == WTMode::Global ? 1 : l.channels);
    const auto data = features.data();
    for (std::size_t n = 0; n < l.outer; ++n) {
        for (std::size_t c = 0; c < l.channels; ++c) {
            Welford& w = acc[mode == WTMode::Global ? 0 : c];
            const std::size_t base = (n * l.channels + c) * l.inner;
            for (std::size_t k = 0; k < l.inner; ++k) w.push(data[base + k]);
        }
    }

    WTParams p;
    p.eps = eps;
    p.mode = mode;
    for (std::size_t c = 0; c < l.channels; ++c) {
        const Welford& w = acc[mode == WTMode::Global ? 0 : c];
        const double var = w.variance();
        const double denom = std::sqrt(var + eps);
        if (!(denom > 0.0)) {
            throw InvalidArgument("fit_wt: zero variance with eps=0 in channel " + std::to_string(c));
        }
        p.mean.push_back(w.mean);
        p.stddev.push_back(std::sqrt(var));
        p.gamma.push_back(1.0 / denom);
        p.beta.push_back(-w.mean / denom);
    }
    return p;
}

Tensor apply_wt(const Tensor& x, const WTParams& params) {
    const Layout l = layout_of(x);
    if (l.channels != params.channels() || params.beta.size() != params.channels()) {
        throw InvalidArgument("apply_wt: tensor has " + std::to_string(l.channels) +
                              " channels, WT parameters have " + std::to_string(params.channels()));
    }
    Tensor out(x.shape());
    const auto src = x.data();
    auto dst = out.data();
    for (std::size_t n = 0; n < l.outer; ++n) {
        for (std::size_t c = 0; c < l.channels; ++c) {
            const double g = params.gamma[c];
            const double b = params.beta[c];
            const std::size_t base = (n * l.channels + c) * l.inner;
            for (std::size_t k = 0; k < l.inner; ++k) dst[base + k] = g * src[base + k] + b;
        }
    }
    return out;
}

} // namespace wtflow
