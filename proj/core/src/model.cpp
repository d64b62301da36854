// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/model.hpp"

#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow {

void TimeEmbeddingConfig::validate() const {
    if (dim == 0 || dim % 2 != 0) throw InvalidArgument("time embedding dim must be positive and even");
    if (!(omega_min > 0.0) || !(omega_max >= omega_min)) {
        throw InvalidArgument("time embedding needs 0 < omega_min <= omega_max");
    }
}

double TimeEmbeddingConfig::frequency(std::size_t k) const {
    const std::size_t half = dim / 2;
    if (half == 1) return omega_min;
    const double frac = static_cast<double>(k) / static_cast<double>(half - 1);
    return omega_min * std::pow(omega_max / omega_min, frac);
}

Tensor embed_time(double t, const TimeEmbeddingConfig& cfg) {
    const double ts[1] = {t};
    return embed_times(ts, cfg).reshaped(Shape{cfg.dim});
}

Tensor embed_times(std::span<const double> ts, const TimeEmbeddingConfig& cfg) {
    cfg.validate();
    const std::size_t half = cfg.dim / 2;
    std::vector<double> freqs(half);
    for (std::size_t k = 0; k < half; ++k) freqs[k] = cfg.frequency(k);

    Tensor out(Shape{ts.size(), cfg.dim});
    for (std::size_t r = 0; r < ts.size(); ++r) {
        const double t = ts[r];
        if (!(t >= 0.0 && t <= 1.0)) {
            throw InvalidArgument("embed_time: t must lie in [0, 1], got " + std::to_string(t));
        }
        for (std::size_t k = 0; k < half; ++k) {
            out[r * cfg.dim + 2 * k] = std::sin(freqs[k] * t);
            out[r * cfg.dim + 2 * k + 1] = std::cos(freqs[k] * t);
        }
    }
    return out;
}

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "silu"; }

Activation parse_activation(std::string_view name) {
    if (name == "silu") return Activation::Silu;
    if (name == "tanh") return Activation::Tanh;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
    if (dim == 0) throw InvalidArgument("model dim must be positive");
    for (std::size_t h : hidden) {
        if (h == 0) throw InvalidArgument("hidden widths must be positive");
    }
    time.validate();
}

std::vector<std::size_t> ModelConfig::widths() const {
    std::vector<std::size_t> w;
    w.push_back(dim + time.dim);
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(dim);
    return w;
}

VectorFieldModel VectorFieldModel::initialize(const ModelConfig& cfg, RandomStream& stream,
                                              bool zero_output_layer) {
    cfg.validate();
    const auto widths = cfg.widths();
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t in = widths[l];
        const std::size_t out = widths[l + 1];
        Layer layer{Tensor(Shape{in, out}), Tensor(Shape{out})};
        const bool last = l + 2 == widths.size();
        if (!(last && zero_output_layer)) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            for (double& v : layer.weight.data()) v = stream.uniform(-bound, bound);
            for (double& v : layer.bias.data()) v = stream.uniform(-bound, bound);
        }
        layers.push_back(std::move(layer));
    }
    return VectorFieldModel(cfg, std::move(layers));
}

VectorFieldModel::VectorFieldModel(ModelConfig cfg, std::vector<Layer> layers)
    : cfg_(std::move(cfg)), layers_(std::move(layers)) {
    cfg_.validate();
    const auto widths = cfg_.widths();
    if (layers_.size() + 1 != widths.size()) throw InvalidArgument("model: layer count does not match widths");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].weight.shape() != Shape{widths[l], widths[l + 1]} ||
            layers_[l].bias.shape() != Shape{widths[l + 1]}) {
            throw InvalidArgument("model: layer " + std::to_string(l) + " has wrong shape");
        }
        if (!layers_[l].weight.all_finite() || !layers_[l].bias.all_finite()) {
            throw InvalidArgument("model: non-finite parameters");
        }
    }
}

std::vector<Tensor> VectorFieldModel::parameters() const {
    std::vector<Tensor> p;
    p.reserve(2 * layers_.size());
    for (const Layer& l : layers_) {
        p.push_back(l.weight);
        p.push_back(l.bias);
    }
    return p;
}

void VectorFieldModel::set_parameters(std::vector<Tensor> params) {
    if (params.size() != 2 * layers_.size()) throw InvalidArgument("set_parameters: wrong tensor count");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (params[2 * l].shape() != layers_[l].weight.shape() ||
            params[2 * l + 1].shape() != layers_[l].bias.shape()) {
            throw InvalidArgument("set_parameters: shape mismatch in layer " + std::to_string(l));
        }
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        layers_[l].weight = std::move(params[2 * l]);
        layers_[l].bias = std::move(params[2 * l + 1]);
    }
}

std::size_t VectorFieldModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
}

ad::Var VectorFieldModel::forward(ad::Tape& tape, std::span<const ad::Var> params, ad::Var x,
                                  ad::Var time_features) const {
    if (params.size() != 2 * layers_.size()) throw InvalidArgument("forward: wrong parameter count");
    const Tensor& xv = x.value();
    if (xv.rank() != 2 || xv.cols() != cfg_.dim) {
        throw InvalidArgument("forward: expected input [B, " + std::to_string(cfg_.dim) + "], got " +
                              shape_to_string(xv.shape()));
    }
    const Tensor& tv = time_features.value();
    if (tv.rank() != 2 || tv.rows() != xv.rows() || tv.cols() != cfg_.time.dim) {
        throw InvalidArgument("forward: time features do not match the batch");
    }

    ad::Var h = tape.concat_cols(x, time_features);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = tape.add_row_bias(tape.matmul(h, params[2 * l]), params[2 * l + 1]);
        if (l + 1 < layers_.size()) {
            h = cfg_.activation == Activation::Tanh ? tape.tanh(h) : tape.silu(h);
        }
    }
    return h;
}

Tensor VectorFieldModel::forward(const Tensor& x, std::span<const double> t) const {
    if (x.rank() != 2 || x.cols() != cfg_.dim) {
        throw InvalidArgument("forward: expected input [B, " + std::to_string(cfg_.dim) + "], got " +
                              shape_to_string(x.shape()));
    }
    if (t.size() != x.rows()) throw InvalidArgument("forward: one time per row required");
    // The no-grad path records on a scratch tape so inference and training share kernels bit-for-bit.
    ad::Tape tape;
    std::vector<ad::Var> params;
    params.reserve(2 * layers_.size());
    for (const Layer& l : layers_) {
        params.push_back(tape.constant(l.weight));
        params.push_back(tape.constant(l.bias));
    }
    const ad::Var out =
        forward(tape, params, tape.constant(x), tape.constant(embed_times(t, cfg_.time)));
    return out.value();
}

Tensor VectorFieldModel::forward(const Tensor& x, double t) const {
    std::vector<double> ts(x.rank() == 2 ? x.rows() : 0, t);
    return forward(x, ts);
}

double lipschitz_estimate(const VectorFieldModel& model, const Tensor& x, double t, double radius,
                          std::size_t probes, RandomStream& stream) {
    if (!(radius > 0.0)) throw InvalidArgument("lipschitz_estimate: radius must be positive");
    const Tensor base = model.forward(x, t);
    double worst = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        Tensor delta = sample_standard_normal(stream, x.shape());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            auto row = delta.row(r);
            const double n = norm2(row);
            for (double& v : row) v *= radius / n;
        }
        const Tensor moved = model.forward(add(x, delta), t);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double num = norm2(sub(Tensor::vector({moved.row(r).begin(), moved.row(r).end()}),
                                         Tensor::vector({base.row(r).begin(), base.row(r).end()}))
                                         .data());
            worst = std::max(worst, num / norm2(delta.row(r)));
        }
    }
    return worst;
}

} // namespace wtflow
