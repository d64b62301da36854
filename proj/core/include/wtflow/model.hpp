// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wtflow/random.hpp"
#include "wtflow/tape.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

/// Sinusoidal time features [sin(w_0 t), cos(w_0 t), ..., sin(w_{K/2-1} t), cos(w_{K/2-1} t)]
/// with w_k geometric between omega_min and omega_max.
struct TimeEmbeddingConfig {
    std::size_t dim = 64;
    double omega_min = 1.0;
    double omega_max = 1000.0;

    void validate() const;
    double frequency(std::size_t k) const;
};

/// [K] embedding of one time in [0, 1].
Tensor embed_time(double t, const TimeEmbeddingConfig& cfg);
/// [B, K] embedding, one row per time.
Tensor embed_times(std::span<const double> ts, const TimeEmbeddingConfig& cfg);

enum class Activation { Silu, Tanh };

std::string to_string(Activation a);
Activation parse_activation(std::string_view name);

struct ModelConfig {
    /// Sample dimension d (input and output).
    std::size_t dim = 2;
    std::vector<std::size_t> hidden = {256, 256};
    TimeEmbeddingConfig time;
    Activation activation = Activation::Silu;

    void validate() const;
    /// [d + K, hidden..., d]
    std::vector<std::size_t> widths() const;
};

/// Dense layer y = x W + b with W stored [in, out].
struct Layer {
    Tensor weight;
    Tensor bias;
};

/// v_theta(x, t): an MLP over concat(x, embed_time(t)) applied independently to every row.
class VectorFieldModel {
public:
    /// Hidden layers use U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
    /// The output layer starts at zero unless `zero_output_layer` is false.
    static VectorFieldModel initialize(const ModelConfig& cfg, RandomStream& stream,
                                       bool zero_output_layer = true);

    VectorFieldModel(ModelConfig cfg, std::vector<Layer> layers);

    const ModelConfig& config() const noexcept { return cfg_; }
    std::size_t dim() const noexcept { return cfg_.dim; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    /// Flattened [W0, b0, W1, b1, ...].
    std::vector<Tensor> parameters() const;
    void set_parameters(std::vector<Tensor> params);
    std::size_t parameter_count() const noexcept;

    /// x is [B, d]; one time per row.
    Tensor forward(const Tensor& x, std::span<const double> t) const;
    /// Same time for every row.
    Tensor forward(const Tensor& x, double t) const;

    /// Records the forward pass on `tape`. `params` are leaves (or constants)
    /// in parameters() order; `x` is [B, d] and `time_features` is [B, K].
    ad::Var forward(ad::Tape& tape, std::span<const ad::Var> params, ad::Var x,
                    ad::Var time_features) const;

private:
    ModelConfig cfg_;
    std::vector<Layer> layers_;
};

/// Largest ||v(x + delta, t) - v(x, t)|| / ||delta|| over `probes` random
/// perturbations of norm `radius` around each row of x.
double lipschitz_estimate(const VectorFieldModel& model, const Tensor& x, double t, double radius,
                          std::size_t probes, RandomStream& stream);

} // namespace wtflow
