// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "wtflow/checkpoint.hpp"
#include "wtflow/diag.hpp"
#include "wtflow/error.hpp"
#include "wtflow/train.hpp"

namespace wtflow {
namespace {

using testing::random_tensor;

ModelConfig tiny_model(std::size_t hidden = 32) {
    ModelConfig c;
    c.hidden = {hidden, hidden};
    c.time.dim = 16;
    return c;
}

Tensor eight_gaussians(std::size_t n, std::uint64_t seed, double radius = 4.0, double sd = 0.1) {
    RandomStream rs(seed);
    Tensor x(Shape{n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(rs.below(8)) / 8.0;
        x.at(i, 0) = radius * std::cos(a) + sd * rs.normal();
        x.at(i, 1) = radius * std::sin(a) + sd * rs.normal();
    }
    return x;
}

// Single linear layer y = [x, emb] W + b, with given blocks.
VectorFieldModel linear_model(std::size_t d, const Tensor& a, const std::vector<double>& bias) {
    ModelConfig c;
    c.dim = d;
    c.hidden = {};
    c.time.dim = 2;
    Tensor w(Shape{d + 2, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) w.at(i, j) = a.at(i, j);
    return VectorFieldModel(c, {Layer{w, Tensor::vector(bias)}});
}

TEST(MakeBatch, WithoutWtDataIsUntouched) {
    const Tensor x = random_tensor({8, 2}, 1);
    RandomStream rs(2, 3);
    const CouplingBatch b = make_batch(x, nullptr, PathSpec{}, rs);
    EXPECT_TRUE(bit_equal(b.data, x));
}

TEST(MakeBatch, SeededBatchesRepeat) {
    const Tensor x = random_tensor({8, 2}, 1);
    RandomStream a(5, 3), c(5, 3);
    const CouplingBatch b1 = make_batch(x, nullptr, PathSpec{}, a);
    const CouplingBatch b2 = make_batch(x, nullptr, PathSpec{}, c);
    EXPECT_TRUE(bit_equal(b1.xt, b2.xt));
    EXPECT_TRUE(bit_equal(b1.target, b2.target));
    EXPECT_EQ(b1.t, b2.t);
}

TEST(MakeBatch, TargetJoinsPathEndpoints) {
    const Tensor x = random_tensor({16, 3}, 1);
    for (PathKind kind : {PathKind::ReverseRF, PathKind::ForwardRF}) {
        RandomStream rs(4, 3);
        const CouplingBatch b = make_batch(x, nullptr, PathSpec{kind, 0.0, 1e-4, 1.0}, rs);
        const bool reverse = kind == PathKind::ReverseRF;
        const Tensor& start = reverse ? b.data : b.noise;
        const Tensor& end = reverse ? b.noise : b.data;
        for (std::size_t r = 0; r < 16; ++r) {
            EXPECT_GT(b.t[r], 0.0);
            EXPECT_LT(b.t[r], 1.0);
            for (std::size_t j = 0; j < 3; ++j) {
                EXPECT_NEAR(b.target.at(r, j) + start.at(r, j), end.at(r, j), 1e-14);
                EXPECT_NEAR(b.xt.at(r, j), (1.0 - b.t[r]) * start.at(r, j) + b.t[r] * end.at(r, j), 1e-14);
            }
        }
    }
}

TEST(MakeBatch, ForwardOtFollowsNoiseFloorPath) {
    const Tensor x = random_tensor({8, 2}, 1);
    RandomStream rs(4, 3);
    const double eps = 0.1;
    const CouplingBatch b = make_batch(x, nullptr, PathSpec{PathKind::ForwardOT, eps, 1e-4, 1.0}, rs);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t j = 0; j < 2; ++j) {
            const double t = b.t[r];
            EXPECT_DOUBLE_EQ(b.xt.at(r, j), t * x.at(r, j) + (1.0 - (1.0 - eps) * t) * b.noise.at(r, j));
            // The conditional field at (xt, t) is the regression target.
            const Tensor u = eval_forward_ot_field(Tensor::vector({b.xt.at(r, j)}), Tensor::vector({x.at(r, j)}), t, eps);
            EXPECT_NEAR(u.item(), b.target.at(r, j), 1e-9);
        }
}

TEST(MakeBatch, HorizonBoundsSampledTimes) {
    RandomStream rs(1, 3);
    PathSpec spec;
    spec.horizon = 0.3;
    const CouplingBatch b = make_batch(random_tensor({200, 2}, 1), nullptr, spec, rs);
    for (double t : b.t) EXPECT_LT(t, 0.3);
}

TEST(CfmLoss, ZeroModelGivesMeanSquaredTarget) {
    RandomStream init(1);
    const auto m = VectorFieldModel::initialize(tiny_model(), init);
    RandomStream rs(2, 3);
    const CouplingBatch b = make_batch(random_tensor({10, 2}, 3), nullptr, PathSpec{}, rs);
    double expected = 0.0;
    for (double v : b.target.data()) expected += v * v;
    EXPECT_NEAR(cfm_loss(m, b), expected / 10.0, 1e-12);
}

TEST(CfmLoss, SinglePairHandComputed) {
    const auto m = linear_model(1, Tensor::matrix(1, 1, {0.0}), {1.0});
    CouplingBatch b;
    b.xt = Tensor::matrix(1, 1, {1.0});
    b.t = {0.5};
    b.target = Tensor::matrix(1, 1, {2.0});
    EXPECT_DOUBLE_EQ(cfm_loss(m, b), 1.0);
}

TEST(CfmLoss, ExactModelGivesZero) {
    const Tensor a = Tensor::matrix(2, 2, {0.5, -1.0, 2.0, 0.25});
    const auto m = linear_model(2, a, {0.0, 0.0});
    CouplingBatch b;
    b.xt = random_tensor({6, 2}, 1);
    b.t = std::vector<double>(6, 0.0); // embedding [0, 1] only hits zero weight rows
    b.target = matmul(b.xt, a);
    EXPECT_NEAR(cfm_loss(m, b), 0.0, 1e-24);
}

TEST(CfmLoss, GradientMatchesFiniteDifferencesOfLoss) {
    RandomStream init(1);
    auto m = VectorFieldModel::initialize(tiny_model(8), init, false);
    RandomStream rs(2, 3);
    const CouplingBatch b = make_batch(random_tensor({5, 2}, 3), nullptr, PathSpec{}, rs);
    const LossAndGrad lg = cfm_loss_and_grad(m, b);
    EXPECT_NEAR(lg.loss, cfm_loss(m, b), 1e-12);
    auto params = m.parameters();
    const double h = 1e-5;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t i = 0; i < params[p].size(); i += 7) {
            auto probe = params;
            probe[p][i] += h;
            m.set_parameters(probe);
            const double up = cfm_loss(m, b);
            probe[p][i] -= 2 * h;
            m.set_parameters(probe);
            const double down = cfm_loss(m, b);
            const double fd = (up - down) / (2 * h);
            const double an = lg.grads[p][i];
            EXPECT_LT(std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}), 1e-5);
        }
    }
}

TEST(CfmLoss, NeverNegative) {
    RandomStream init(4);
    const auto m = VectorFieldModel::initialize(tiny_model(), init, false);
    for (std::uint64_t s = 0; s < 20; ++s) {
        RandomStream rs(s, 3);
        EXPECT_GE(cfm_loss(m, make_batch(random_tensor({4, 2}, s), nullptr, PathSpec{}, rs)), 0.0);
    }
}

TEST(IndexSampler, EachPassIsAPermutation) {
    IndexSampler s(10, RandomStream(1, 2));
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<int> seen(10, 0);
        for (int k = 0; k < 5; ++k)
            for (std::size_t i : s.next(2)) ++seen[i];
        for (int c : seen) EXPECT_EQ(c, 1);
    }
}

TrainConfig quick_config(std::size_t epochs) {
    TrainConfig c = TrainConfig::desk_toy();
    c.epochs = epochs;
    c.batch_size = 64;
    c.wt_enabled = false;
    return c;
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
    TrainConfig c = quick_config(5);
    c.lr = 0.0;
    const Tensor data = random_tensor({50, 2}, 1);
    const TrainResult r = train(data, c, tiny_model());
    RandomStream init(c.seed, 1);
    ModelConfig mc = tiny_model();
    const auto fresh = VectorFieldModel::initialize(mc, init);
    const auto p = r.checkpoint.model.parameters();
    const auto q = fresh.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_TRUE(bit_equal(p[i], q[i]));
    EXPECT_EQ(r.steps, 5u);
}

TEST(Train, SameSeedGivesIdenticalRuns) {
    const Tensor data = random_tensor({80, 2}, 2);
    TrainConfig c = quick_config(30);
    c.wt_enabled = true;
    const TrainResult a = train(data, c, tiny_model());
    const TrainResult b = train(data, c, tiny_model());
    EXPECT_EQ(a.epoch_loss, b.epoch_loss);
    EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
    c.seed = 1;
    EXPECT_NE(train(data, c, tiny_model()).epoch_loss, a.epoch_loss);
}

TEST(Train, ReportedRateFollowsStepDecay) {
    TrainConfig c = TrainConfig::image();
    c.epochs = 45;
    c.batch_size = 16;
    c.wt_enabled = false;
    std::vector<double> lrs;
    train(random_tensor({16, 2}, 3), c, tiny_model(8), [&](const EpochReport& r) { lrs.push_back(r.lr); });
    ASSERT_EQ(lrs.size(), 45u);
    for (std::size_t e = 0; e < 45; ++e) EXPECT_EQ(lrs[e], 2e-4 * std::pow(0.1, static_cast<double>(e / 20)));
}

TEST(Train, StepsPerEpochDefaultsToOnePass) {
    TrainConfig c = TrainConfig::image();
    c.epochs = 2;
    c.wt_enabled = false;
    EXPECT_EQ(train(random_tensor({20, 2}, 3), c, tiny_model(8)).steps, 2u * 3u); // ceil(20 / 8) = 3
}

TEST(Train, FitsWtOnTrainingRows) {
    TrainConfig c = quick_config(1);
    c.wt_enabled = true;
    const Tensor data = random_tensor({100, 2}, 4, 3.0);
    const TrainResult r = train(data, c, tiny_model(8));
    ASSERT_TRUE(r.checkpoint.wt.has_value());
    const WTParams direct = fit_wt(data, c.wt_eps);
    EXPECT_EQ(r.checkpoint.wt->gamma, direct.gamma);
    EXPECT_EQ(r.checkpoint.wt->beta, direct.beta);
}

TEST(Train, OverflowingLossRaisesDivergence) {
    const Tensor data = Tensor::full({8, 2}, 1e200);
    TrainConfig c = quick_config(3);
    try {
        train(data, c, tiny_model(8));
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.epoch(), 0u);
        EXPECT_EQ(e.last_good().model.parameter_count(), e.last_good().model.parameter_count());
    }
}

TEST(Train, RejectsNonFiniteData) {
    Tensor data = random_tensor({4, 2}, 1);
    data[3] = std::nan("");
    EXPECT_THROW(train(data, quick_config(1), tiny_model(8)), InvalidArgument);
}

TEST(Train, EightGaussiansLossHalves) {
    TrainConfig c = TrainConfig::desk_toy();
    c.epochs = 2000;
    c.wt_enabled = false;
    c.path.kind = PathKind::ForwardRF;
    const TrainResult r = train(eight_gaussians(2048, 7), c, tiny_model(64));
    double tail = 0.0;
    for (std::size_t e = 1900; e < 2000; ++e) tail += r.epoch_loss[e];
    tail /= 100.0;
    EXPECT_LT(tail, 0.5 * r.epoch_loss.front());
}

TEST(Train, ForwardFieldApproachesMarginalOracle) {
    // Finite dataset, so the exact marginal field is available in closed form.
    const Tensor data = eight_gaussians(8, 3, 2.0, 0.0);
    const PathSpec spec{PathKind::ForwardRF, 0.0, 1e-4, 1.0};
    RandomStream probe(99);
    std::vector<std::pair<Tensor, double>> held_out;
    for (int i = 0; i < 64; ++i) {
        const double t = 0.1 + 0.8 * probe.uniform();
        const std::size_t k = probe.below(8);
        Tensor x(Shape{1, 2});
        for (std::size_t j = 0; j < 2; ++j) x[j] = t * data.at(k, j) + (1.0 - t) * probe.normal();
        held_out.emplace_back(x, t);
    }
    auto deviation = [&](const VectorFieldModel& m) {
        double s = 0.0;
        for (const auto& [x, t] : held_out) {
            const Tensor u = marginal_field_oracle(x, t, data, spec);
            s += squared_norm(sub(m.forward(x, t), u).data());
        }
        return s / static_cast<double>(held_out.size());
    };

    TrainConfig c = TrainConfig::desk_toy();
    c.epochs = 1500;
    c.batch_size = 128;
    c.wt_enabled = false;
    c.path = spec;
    const std::vector<std::size_t> marks{0, 100, 400, 1499};
    std::vector<double> dev;
    train(data, c, tiny_model(64), [&](const EpochReport& r) {
        if (std::find(marks.begin(), marks.end(), r.epoch) != marks.end()) dev.push_back(deviation(r.model));
    });
    ASSERT_EQ(dev.size(), marks.size());
    for (std::size_t i = 0; i + 1 < dev.size(); ++i) EXPECT_LT(dev[i + 1], dev[i]) << "checkpoint " << i;
}

TEST(TrainConfig, PresetsAndValidation) {
    const TrainConfig p = TrainConfig::image();
    EXPECT_EQ(p.lr, 2e-4);
    EXPECT_EQ(p.weight_decay, 0.1);
    EXPECT_EQ(p.epochs, 100u);
    EXPECT_EQ(p.batch_size, 8u);
    EXPECT_EQ(p.lr_decay_every, 20u);
    const TrainConfig d = TrainConfig::desk_toy();
    EXPECT_EQ(d.batch_size, 256u);
    EXPECT_EQ(d.epochs * d.steps_per_epoch, 4000u);
    TrainConfig bad = p;
    bad.epochs = 0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

} // namespace
} // namespace wtflow
