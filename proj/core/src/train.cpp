// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/train.hpp"

#include <cmath>

namespace wtflow {

void TrainConfig::validate() const {
    if (!(lr >= 0.0) || !(weight_decay >= 0.0)) throw InvalidArgument("train: rates must be non-negative");
    if (epochs == 0) throw InvalidArgument("train: epochs must be >= 1");
    if (batch_size == 0) throw InvalidArgument("train: batch_size must be >= 1");
    if (!(lr_decay_factor > 0.0)) throw InvalidArgument("train: lr_decay_factor must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw InvalidArgument("train: betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw InvalidArgument("train: adam_eps must be positive");
    if (!(wt_eps >= 0.0)) throw InvalidArgument("train: wt_eps must be non-negative");
    path.validate();
}

TrainConfig TrainConfig::image() { return TrainConfig{}; }

TrainConfig TrainConfig::desk_toy() {
    TrainConfig cfg;
    cfg.lr = 1e-3;
    cfg.batch_size = 256;
    cfg.epochs = 4000;
    cfg.steps_per_epoch = 1;
    cfg.lr_decay_every = 0;
    return cfg;
}

CouplingBatch make_batch(const Tensor& data, const WTParams* wt, const PathSpec& path,
                         RandomStream& stream) {
    if (data.rank() != 2 || data.rows() == 0) throw InvalidArgument("make_batch: expected non-empty [B, d] rows");
    CouplingBatch b;
    b.data = wt != nullptr ? apply_wt(data, *wt) : data;
    b.noise = sample_standard_normal(stream, data.shape());
    const std::size_t rows = data.rows();
    const std::size_t d = data.cols();
    b.t.resize(rows);
    for (double& t : b.t) t = path.horizon * stream.uniform_open();

    b.xt = Tensor(data.shape());
    b.target = Tensor(data.shape());
    const double one_minus_eps = 1.0 - path.epsilon;
    for (std::size_t r = 0; r < rows; ++r) {
        const double t = b.t[r];
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = r * d + j;
            const double x = b.data[k];
            const double z = b.noise[k];
            switch (path.kind) {
            case PathKind::ReverseRF:
                b.xt[k] = (1.0 - t) * x + t * z;
                b.target[k] = z - x;
                break;
            case PathKind::ForwardRF:
                b.xt[k] = (1.0 - t) * z + t * x;
                b.target[k] = x - z;
                break;
            case PathKind::ForwardOT:
                b.xt[k] = t * x + (1.0 - one_minus_eps * t) * z;
                b.target[k] = x - one_minus_eps * z;
                break;
            }
        }
    }
    return b;
}

namespace {

ad::Var record_loss(ad::Tape& tape, const VectorFieldModel& model, std::span<const ad::Var> params,
                    const CouplingBatch& batch) {
    const ad::Var x = tape.constant(batch.xt);
    const ad::Var temb = tape.constant(embed_times(batch.t, model.config().time));
    const ad::Var pred = model.forward(tape, params, x, temb);
    const ad::Var diff = tape.sub(tape.constant(batch.target), pred);
    return tape.scale(tape.sum(tape.square(diff)), 1.0 / static_cast<double>(batch.xt.rows()));
}

} // namespace

double cfm_loss(const VectorFieldModel& model, const CouplingBatch& batch) {
    ad::Tape tape;
    std::vector<ad::Var> params;
    for (const Tensor& p : model.parameters()) params.push_back(tape.constant(p));
    return record_loss(tape, model, params, batch).value().item();
}

LossAndGrad cfm_loss_and_grad(const VectorFieldModel& model, const CouplingBatch& batch) {
    ad::Tape tape;
    std::vector<ad::Var> params;
    for (const Tensor& p : model.parameters()) params.push_back(tape.leaf(p));
    const ad::Var loss = record_loss(tape, model, params, batch);
    ad::Gradients g = tape.backward(loss);
    return {loss.value().item(), g.all()};
}

IndexSampler::IndexSampler(std::size_t n, RandomStream stream) : n_(n), stream_(std::move(stream)) {
    if (n == 0) throw InvalidArgument("IndexSampler: empty dataset");
}

std::vector<std::size_t> IndexSampler::next(std::size_t batch_size) {
    std::vector<std::size_t> out;
    out.reserve(batch_size);
    while (out.size() < batch_size) {
        if (pos_ == order_.size()) {
            order_ = stream_.permutation(n_);
            pos_ = 0;
        }
        out.push_back(order_[pos_++]);
    }
    return out;
}

TrainResult train(const Tensor& data, const TrainConfig& cfg, const ModelConfig& model_cfg,
                  const EpochCallback& on_epoch) {
    cfg.validate();
    const Tensor rows = to_location_rows(data);
    if (rows.rows() == 0) throw InvalidArgument("train: empty dataset");
    if (!rows.all_finite()) throw InvalidArgument("train: dataset contains non-finite values");

    ModelConfig mc = model_cfg;
    mc.dim = rows.cols();

    RandomStream init_stream(cfg.seed, 1);
    RandomStream coupling_stream(cfg.seed, 3);
    IndexSampler sampler(rows.rows(), RandomStream(cfg.seed, 2));

    TrainResult result{Checkpoint{VectorFieldModel::initialize(mc, init_stream), std::nullopt, cfg.path},
                       {}, 0};
    if (cfg.wt_enabled) result.checkpoint.wt = fit_wt(rows, cfg.wt_eps, cfg.wt_mode);
    const WTParams* wt = result.checkpoint.wt ? &*result.checkpoint.wt : nullptr;

    const std::size_t steps_per_epoch =
        cfg.steps_per_epoch != 0 ? cfg.steps_per_epoch : (rows.rows() + cfg.batch_size - 1) / cfg.batch_size;
    const AdamWConfig adam{cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay};
    AdamWState state;
    std::vector<Tensor> params = result.checkpoint.model.parameters();
    VectorFieldModel& model = result.checkpoint.model;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = step_decay_lr(cfg.lr, cfg.lr_decay_factor, cfg.lr_decay_every, epoch);
        double loss_sum = 0.0;
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const auto idx = sampler.next(cfg.batch_size);
            const CouplingBatch batch = make_batch(gather_rows(rows, idx), wt, cfg.path, coupling_stream);
            LossAndGrad lg = cfm_loss_and_grad(model, batch);
            if (!std::isfinite(lg.loss)) {
                throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch),
                                      result.checkpoint, epoch, result.steps);
            }
            try {
                adamw_step(params, lg.grads, state, adam, lr);
            } catch (const NumericalError& e) {
                throw DivergenceError(std::string("training diverged: ") + e.what(), result.checkpoint, epoch,
                                      result.steps);
            }
            for (const Tensor& p : params) {
                if (!p.all_finite()) {
                    throw DivergenceError("training diverged: non-finite parameters at epoch " +
                                              std::to_string(epoch),
                                          result.checkpoint, epoch, result.steps);
                }
            }
            model.set_parameters(params);
            loss_sum += lg.loss;
            ++result.steps;
        }
        const double mean_loss = loss_sum / static_cast<double>(steps_per_epoch);
        result.epoch_loss.push_back(mean_loss);
        if (on_epoch) on_epoch(EpochReport{epoch, mean_loss, lr, model});
    }
    return result;
}

} // namespace wtflow
