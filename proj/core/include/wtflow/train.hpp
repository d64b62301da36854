// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wtflow/checkpoint.hpp"
#include "wtflow/error.hpp"
#include "wtflow/model.hpp"
#include "wtflow/optimizer.hpp"
#include "wtflow/paths.hpp"
#include "wtflow/random.hpp"
#include "wtflow/wt_map.hpp"

namespace wtflow {

struct TrainConfig {
    double lr = 2e-4;
    double weight_decay = 0.1;
    std::size_t epochs = 100;
    std::size_t batch_size = 8;
    double lr_decay_factor = 0.1;
    /// Epochs between decays; 0 keeps the rate constant.
    std::size_t lr_decay_every = 20;
    /// Optimizer steps per epoch; 0 means ceil(N / batch_size), one pass over the data.
    std::size_t steps_per_epoch = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    /// Direction of the path: reverse_rf (data -> noise), forward_rf or forward_ot (noise -> data).
    PathSpec path;
    bool wt_enabled = true;
    double wt_eps = 1e-5;
    WTMode wt_mode = WTMode::PerChannel;

    void validate() const;

    /// Image-scale hyperparameters: AdamW lr 2e-4, wd 0.1, 100 epochs, batch 8, x0.1 every 20 epochs.
    static TrainConfig image();
    /// 2D toy scale: batch 256, 4000 steps at a constant lr of 1e-3.
    static TrainConfig desk_toy();
};

/// One coupled minibatch. `data` holds the (WT-mapped) data rows and `noise`
/// the Gaussian partners; start/end of the path depend on the direction.
struct CouplingBatch {
    Tensor data;
    Tensor noise;
    std::vector<double> t;
    Tensor xt;
    Tensor target;
};

/// Samples fresh noise and times for `data` rows ([B, d]) and fills the
/// interpolants and regression targets for `path`. `wt` is applied first when given.
CouplingBatch make_batch(const Tensor& data, const WTParams* wt, const PathSpec& path,
                         RandomStream& stream);

/// Mean over the batch of ||target - v(xt, t)||^2.
double cfm_loss(const VectorFieldModel& model, const CouplingBatch& batch);

struct LossAndGrad {
    double loss = 0.0;
    std::vector<Tensor> grads;
};

LossAndGrad cfm_loss_and_grad(const VectorFieldModel& model, const CouplingBatch& batch);

/// Cycles through seeded permutations of [0, n) to produce minibatch indices.
class IndexSampler {
public:
    IndexSampler(std::size_t n, RandomStream stream);
    std::vector<std::size_t> next(std::size_t batch_size);

private:
    std::size_t n_;
    RandomStream stream_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
};

struct EpochReport {
    std::size_t epoch;
    double mean_loss;
    double lr;
    const VectorFieldModel& model;
};

using EpochCallback = std::function<void(const EpochReport&)>;

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<double> epoch_loss;
    std::size_t steps = 0;
};

/// Raised when the loss or a gradient becomes non-finite.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, Checkpoint last_good, std::size_t epoch, std::size_t step)
        : NumericalError(what), last_good_(std::move(last_good)), epoch_(epoch), step_(step) {}

    const Checkpoint& last_good() const noexcept { return last_good_; }
    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t step() const noexcept { return step_; }

private:
    Checkpoint last_good_;
    std::size_t epoch_;
    std::size_t step_;
};

/// Conditional flow-matching regression on `data` ([N, d] rows, or
/// [N, C, H, W] features trained per location).
TrainResult train(const Tensor& data, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const EpochCallback& on_epoch = {});

} // namespace wtflow
