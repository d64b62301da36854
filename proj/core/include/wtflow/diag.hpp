// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wtflow/flow.hpp"
#include "wtflow/paths.hpp"
#include "wtflow/random.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

// ---- Gaussian annulus -------------------------------------------------------

/// Monte Carlo fraction of n draws from N(0, I_d) whose norm lies in
/// [sqrt(d) - beta, sqrt(d) + beta]. Requires d, n >= 1 and 0 < beta <= sqrt(d).
double annulus_fraction(std::size_t d, std::size_t n, double beta, RandomStream& stream);

/// Exact probability of the same interval from the chi distribution with d degrees of freedom.
double chi_annulus_probability(std::size_t d, double beta);

// ---- KL under Gaussian perturbation ----------------------------------------

struct Gaussian1D {
    double mean = 0.0;
    double stddev = 1.0;
};

/// D_KL(p0 || q) with q = (p0 + eps N(0, 1)) / (1 + eps), by adaptive Simpson
/// quadrature on [mu - 10 s, mu + 10 s], s = max(stddev, 1). eps must lie in [0, 1].
/// Throws NumericalError if the quadrature does not reach `tol`.
double kl_perturbation(const Gaussian1D& p0, double eps, double tol = 1e-10);

struct KlCurve {
    std::vector<double> eps;
    std::vector<double> kl;
    /// Least-squares slope of log kl against log eps over points with kl > 0 (NaN if fewer than two).
    double slope = 0.0;
};

/// eps values must lie in [0, 0.1].
KlCurve kl_perturbation_curve(const Gaussian1D& p0, std::span<const double> eps_list, double tol = 1e-10);

/// Nine log-spaced values 10^-3 ... 10^-1.
std::vector<double> default_kl_eps();

// ---- Marginal field of a finite dataset ------------------------------------

/// Posterior weights w_i(x) proportional to N(x; mu_t(x^i), sigma_t^2 I), via log-sum-exp.
/// `x` is [d]; `dataset` is [M, d].
std::vector<double> marginal_weights(const Tensor& x, double t, const Tensor& dataset, const PathSpec& spec);

/// sum_i w_i(x) u_t(x | x^i) for each row of `x` ([B, d] or [d]).
/// Throws SingularityError where sigma_t < t_min and NumericalError if every weight underflows.
Tensor marginal_field_oracle(const Tensor& x, double t, const Tensor& dataset, const PathSpec& spec);

// ---- Trajectory statistics ---------------------------------------------------

struct NormTable {
    /// Grid indices of the columns.
    std::vector<std::size_t> steps;
    std::vector<std::string> classes;
    /// means[row][col]: mean ||x_t|| of the class at steps[col].
    std::vector<std::vector<double>> means;
    /// Column of the smallest mean in each row (first on ties).
    std::vector<std::size_t> argmin;

    void add_row(std::string name, std::vector<double> row);
};

/// Mean trajectory norm of `samples` ([N, d]) at steps 0, stride, ..., n_steps.
std::vector<double> trajectory_norm_row(const VectorField& field, const Tensor& samples, std::size_t n_steps = 50,
                                        std::size_t stride = 5, const FlowOptions& opts = {});

std::vector<std::size_t> norm_table_steps(std::size_t n_steps = 50, std::size_t stride = 5);

/// class,step_0,...,step_n,argmin
void write_norm_table_csv(const std::filesystem::path& path, const NormTable& table);

struct RadialStats {
    double mean_radial = 0.0;
    double fraction_inward = 0.0;
    std::size_t counted = 0;
    /// Samples at the exact origin, where the direction is undefined.
    std::size_t skipped = 0;
};

/// r = <v(x, t), x / ||x||> at t = t_eval for every row of `samples`.
RadialStats initial_radial_stats(const VectorField& field, const Tensor& samples, double t_eval = 1e-4);

struct RadiusBound {
    double max_norm = 0.0;
    double sqrt_d = 0.0;
    bool violation = false;
};

/// Largest channel-vector norm over all locations of [N, C, H, W] (or [N, d]) features vs sqrt(C).
RadiusBound radius_bound_check(const Tensor& features);

} // namespace wtflow
