// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "wtflow/error.hpp"
#include "wtflow/grad_check.hpp"
#include "wtflow/model.hpp"

namespace wtflow {
namespace {

using testing::random_tensor;

ModelConfig small_config(std::size_t d = 3) {
    ModelConfig c;
    c.dim = d;
    c.hidden = {16, 12};
    c.time.dim = 8;
    return c;
}

// Plain loops, independent of the tape: y = act(...act(x W0 + b0)...) W_L + b_L.
Tensor reference_forward(const VectorFieldModel& m, const Tensor& x, double t) {
    const Tensor emb = embed_time(t, m.config().time);
    const auto& layers = m.layers();
    Tensor out(Shape{x.rows(), m.dim()});
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::vector<double> h(x.row(r).begin(), x.row(r).end());
        h.insert(h.end(), emb.data().begin(), emb.data().end());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const Tensor& w = layers[l].weight;
            std::vector<double> next(w.cols());
            for (std::size_t j = 0; j < w.cols(); ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < w.rows(); ++i) s += h[i] * w.at(i, j);
                s += layers[l].bias[j];
                if (l + 1 < layers.size()) {
                    s = m.config().activation == Activation::Silu ? s / (1.0 + std::exp(-s)) : std::tanh(s);
                }
                next[j] = s;
            }
            h = std::move(next);
        }
        for (std::size_t j = 0; j < m.dim(); ++j) out.at(r, j) = h[j];
    }
    return out;
}

TEST(TimeEmbedding, ZeroTime) {
    const Tensor e = embed_time(0.0, TimeEmbeddingConfig{});
    ASSERT_EQ(e.size(), 64u);
    for (std::size_t k = 0; k < 32; ++k) {
        EXPECT_EQ(e[2 * k], 0.0);
        EXPECT_EQ(e[2 * k + 1], 1.0);
    }
}

TEST(TimeEmbedding, SingleFrequencyAtPi) {
    const TimeEmbeddingConfig cfg{2, std::numbers::pi, std::numbers::pi};
    const Tensor e = embed_time(0.5, cfg);
    EXPECT_NEAR(e[0], 1.0, 1e-15);
    EXPECT_NEAR(e[1], 0.0, 1e-15);
}

TEST(TimeEmbedding, GeometricFrequencies) {
    const TimeEmbeddingConfig cfg{};
    EXPECT_DOUBLE_EQ(cfg.frequency(0), 1.0);
    EXPECT_NEAR(cfg.frequency(31), 1000.0, 1e-9);
    EXPECT_NEAR(cfg.frequency(1) / cfg.frequency(0), std::pow(1000.0, 1.0 / 31.0), 1e-12);
}

TEST(TimeEmbedding, EntriesBoundedAndInjectiveOnGrid) {
    const TimeEmbeddingConfig cfg{};
    std::vector<Tensor> grid;
    for (int i = 1; i < 1000; ++i) grid.push_back(embed_time(i / 1000.0, cfg));
    for (const Tensor& e : grid)
        for (double v : e.data()) EXPECT_LE(std::abs(v), 1.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        EXPECT_GT(testing::max_abs_diff(grid[i], grid[i + 1]), 1e-6);
    }
    EXPECT_THROW(embed_time(1.5, cfg), InvalidArgument);
}

TEST(Model, ZeroOutputLayerGivesZeroField) {
    RandomStream rs(1);
    const auto m = VectorFieldModel::initialize(small_config(), rs);
    const Tensor got = m.forward(random_tensor({5, 3}, 2), 0.3);
    for (double v : got.data()) EXPECT_EQ(v, 0.0);
}

TEST(Model, WidthsAndDefaults) {
    const ModelConfig c;
    EXPECT_EQ(c.widths(), (std::vector<std::size_t>{66, 256, 256, 2}));
    RandomStream rs(1);
    const auto m = VectorFieldModel::initialize(c, rs);
    EXPECT_EQ(m.parameter_count(), 66u * 256 + 256 + 256 * 256 + 256 + 256 * 2 + 2);
}

TEST(Model, ForwardMatchesLoopOracle) {
    for (Activation act : {Activation::Silu, Activation::Tanh}) {
        ModelConfig c = small_config();
        c.activation = act;
        RandomStream rs(3);
        const auto m = VectorFieldModel::initialize(c, rs, false);
        const Tensor x = random_tensor({7, 3}, 4);
        EXPECT_LT(testing::max_abs_diff(m.forward(x, 0.37), reference_forward(m, x, 0.37)), 1e-12);
    }
}

TEST(Model, OutputShapeFollowsInputDimension) {
    for (std::size_t d : {1u, 2u, 5u}) {
        for (auto hidden : {std::vector<std::size_t>{}, std::vector<std::size_t>{4}, std::vector<std::size_t>{8, 3, 5}}) {
            ModelConfig c = small_config(d);
            c.hidden = hidden;
            RandomStream rs(5);
            const auto m = VectorFieldModel::initialize(c, rs, false);
            EXPECT_EQ(m.forward(random_tensor({4, d}, 6), 0.5).shape(), (Shape{4, d}));
        }
    }
}

TEST(Model, DeterministicUnderSeed) {
    RandomStream a(9), b(9);
    const auto m1 = VectorFieldModel::initialize(small_config(), a, false);
    const auto m2 = VectorFieldModel::initialize(small_config(), b, false);
    const Tensor x = random_tensor({3, 3}, 1);
    EXPECT_TRUE(bit_equal(m1.forward(x, 0.2), m2.forward(x, 0.2)));
}

TEST(Model, PerRowTimesMatchSharedTime) {
    RandomStream rs(2);
    const auto m = VectorFieldModel::initialize(small_config(), rs, false);
    const Tensor x = random_tensor({4, 3}, 3);
    const std::vector<double> ts(4, 0.6);
    EXPECT_TRUE(bit_equal(m.forward(x, ts), m.forward(x, 0.6)));
}

TEST(Model, GradCheckOnSquaredOutputNorm) {
    RandomStream rs(4);
    const auto m = VectorFieldModel::initialize(small_config(), rs, false);
    const Tensor x = random_tensor({3, 3}, 5);
    const std::vector<double> ts{0.1, 0.5, 0.9};
    const Tensor temb = embed_times(ts, m.config().time);
    const ScalarFn fn = [&](ad::Tape& tape, std::span<const ad::Var> p) {
        return tape.sum(tape.square(m.forward(tape, p, tape.constant(x), tape.constant(temb))));
    };
    EXPECT_LT(grad_check(fn, m.parameters()).max_relative_error, 1e-4);
}

TEST(Model, SetParametersRoundTrip) {
    RandomStream rs(6);
    auto m = VectorFieldModel::initialize(small_config(), rs, false);
    auto p = m.parameters();
    p[0][0] += 1.0;
    m.set_parameters(p);
    EXPECT_EQ(m.parameters()[0][0], p[0][0]);
    p.pop_back();
    EXPECT_THROW(m.set_parameters(p), InvalidArgument);
}

TEST(Model, LipschitzEstimateIsFinite) {
    RandomStream rs(7);
    const auto m = VectorFieldModel::initialize(small_config(), rs, false);
    RandomStream probe(8);
    const double l = lipschitz_estimate(m, random_tensor({5, 3}, 9), 0.5, 1e-6, 8, probe);
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_GT(l, 0.0);
}

} // namespace
} // namespace wtflow
