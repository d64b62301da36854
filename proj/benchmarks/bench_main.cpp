// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "wtflow/flow.hpp"
#include "wtflow/model.hpp"
#include "wtflow/random.hpp"
#include "wtflow/score.hpp"
#include "wtflow/train.hpp"

namespace wtflow {
namespace {

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RandomStream rs(1);
    const Tensor a = sample_standard_normal(rs, {n, n});
    const Tensor b = sample_standard_normal(rs, {n, n});
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.counters["flops"] =
        benchmark::Counter(2.0 * static_cast<double>(n * n * n), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(512);

VectorFieldModel default_model() {
    RandomStream rs(2);
    return VectorFieldModel::initialize(ModelConfig{}, rs, false);
}

void BM_ModelForward(benchmark::State& state) {
    const auto model = default_model();
    RandomStream rs(3);
    const Tensor x = sample_standard_normal(rs, {static_cast<std::size_t>(state.range(0)), 2});
    for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, 0.5));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ModelForward)->Arg(1)->Arg(256)->Arg(4096);

void BM_TrainStep(benchmark::State& state) {
    const auto model = default_model();
    RandomStream rs(4);
    const Tensor data = sample_standard_normal(rs, {256, 2});
    const CouplingBatch batch = make_batch(data, nullptr, PathSpec{}, rs);
    for (auto _ : state) benchmark::DoNotOptimize(cfm_loss_and_grad(model, batch));
}
BENCHMARK(BM_TrainStep);

void BM_EulerBatch(benchmark::State& state) {
    const auto model = default_model();
    RandomStream rs(5);
    const Tensor x = sample_standard_normal(rs, {512, 2});
    const FlowOptions opts{static_cast<std::size_t>(state.range(1))};
    const auto steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_euler_batch(x, as_field(model), steps, false, opts));
}
BENCHMARK(BM_EulerBatch)->Args({1, 1})->Args({50, 1})->Args({50, 2})->Unit(benchmark::kMillisecond);

void BM_Auroc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RandomStream rs(6);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rs.normal();
        labels[i] = i % 2 == 0;
    }
    for (auto _ : state) benchmark::DoNotOptimize(auroc(scores, labels));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auroc)->Arg(1 << 10)->Arg(1 << 16);

} // namespace
} // namespace wtflow

BENCHMARK_MAIN();
