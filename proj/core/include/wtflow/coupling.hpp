// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "wtflow/random.hpp"
#include "wtflow/tensor.hpp"

namespace wtflow {

/// Transport plan between two discrete measures.
struct DiscreteCoupling {
    /// [n_source, n_target], nonnegative.
    Tensor weights;
    std::vector<double> source;
    std::vector<double> target;
    /// Optional atom locations, [n_source, d] and [n_target, d].
    Tensor source_atoms;
    Tensor target_atoms;

    /// Throws InvalidArgument unless rows sum to `source`, columns to `target`
    /// and total mass is one, all within `tol`.
    void validate(double tol = 1e-9) const;
};

/// Normalized positive weights of length n.
std::vector<double> random_marginal(std::size_t n, RandomStream& stream);

/// Product plan source ⊗ target.
DiscreteCoupling independent_coupling(const std::vector<double>& source,
                                      const std::vector<double>& target);

/// North-west corner plan after permuting rows and columns at random; a vertex
/// of the transport polytope.
DiscreteCoupling random_vertex_coupling(const std::vector<double>& source,
                                        const std::vector<double>& target, RandomStream& stream);

/// Random convex mixture of `vertices` vertex plans; admissible by construction.
DiscreteCoupling random_admissible_coupling(const std::vector<double>& source,
                                            const std::vector<double>& target,
                                            RandomStream& stream, std::size_t vertices = 4);

/// sum_ij pi_ij * cost_ij for a [n_source, n_target] cost matrix.
double transport_cost(const DiscreteCoupling& coupling, const Tensor& cost);

/// Total cost under the constant cost c(x, y) = c0: sum_ij pi_ij * c0.
/// Equals c0 for every admissible plan.
double constant_cost_total(const DiscreteCoupling& coupling, double c0);

} // namespace wtflow
