// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow {

void DiscreteCoupling::validate(double tol) const {
    if (weights.rank() != 2 || weights.rows() != source.size() || weights.cols() != target.size()) {
        throw InvalidArgument("coupling: weight matrix does not match marginal sizes");
    }
    const std::size_t n = source.size();
    const std::size_t m = target.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = weights[i * m + j];
            if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("coupling: negative or non-finite weight");
            row += w;
        }
        if (std::abs(row - source[i]) > tol) throw InvalidArgument("coupling: row sums differ from source marginal");
        total += row;
    }
    for (std::size_t j = 0; j < m; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += weights[i * m + j];
        if (std::abs(col - target[j]) > tol) throw InvalidArgument("coupling: column sums differ from target marginal");
    }
    if (std::abs(total - 1.0) > tol) throw InvalidArgument("coupling: total mass is not one");
}

std::vector<double> random_marginal(std::size_t n, RandomStream& stream) {
    if (n == 0) throw InvalidArgument("random_marginal: n must be positive");
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) {
        v = stream.uniform_open();
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

DiscreteCoupling independent_coupling(const std::vector<double>& source,
                                      const std::vector<double>& target) {
    DiscreteCoupling c;
    c.source = source;
    c.target = target;
    c.weights = Tensor(Shape{source.size(), target.size()});
    for (std::size_t i = 0; i < source.size(); ++i) {
        for (std::size_t j = 0; j < target.size(); ++j) {
            c.weights[i * target.size() + j] = source[i] * target[j];
        }
    }
    return c;
}

DiscreteCoupling random_vertex_coupling(const std::vector<double>& source,
                                        const std::vector<double>& target, RandomStream& stream) {
    const std::size_t n = source.size();
    const std::size_t m = target.size();
    if (n == 0 || m == 0) throw InvalidArgument("coupling: empty marginal");
    const auto rows = stream.permutation(n);
    const auto cols = stream.permutation(m);

    DiscreteCoupling c;
    c.source = source;
    c.target = target;
    c.weights = Tensor(Shape{n, m});
    std::vector<double> supply(n), demand(m);
    for (std::size_t k = 0; k < n; ++k) supply[k] = source[rows[k]];
    for (std::size_t k = 0; k < m; ++k) demand[k] = target[cols[k]];

    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double mass = std::min(supply[i], demand[j]);
        c.weights[rows[i] * m + cols[j]] += mass;
        supply[i] -= mass;
        demand[j] -= mass;
        if (i + 1 == n) {
            ++j;
        } else if (j + 1 == m || supply[i] <= demand[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    // Residual rounding mass stays on the last row/column pair visited.
    return c;
}

DiscreteCoupling random_admissible_coupling(const std::vector<double>& source,
                                            const std::vector<double>& target,
                                            RandomStream& stream, std::size_t vertices) {
    if (vertices == 0) throw InvalidArgument("random_admissible_coupling: need at least one vertex");
    const std::vector<double> mix = random_marginal(vertices, stream);
    DiscreteCoupling out;
    out.source = source;
    out.target = target;
    out.weights = Tensor(Shape{source.size(), target.size()});
    for (std::size_t v = 0; v < vertices; ++v) {
        const DiscreteCoupling vertex = random_vertex_coupling(source, target, stream);
        for (std::size_t k = 0; k < out.weights.size(); ++k) out.weights[k] += mix[v] * vertex.weights[k];
    }
    return out;
}

double transport_cost(const DiscreteCoupling& coupling, const Tensor& cost) {
    coupling.validate();
    if (cost.shape() != coupling.weights.shape()) throw InvalidArgument("transport_cost: cost shape mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < cost.size(); ++k) total += coupling.weights[k] * cost[k];
    return total;
}

double constant_cost_total(const DiscreteCoupling& coupling, double c0) {
    if (!(c0 >= 0.0)) throw InvalidArgument("constant_cost_total: c0 must be non-negative");
    coupling.validate();
    double total = 0.0;
    for (double w : coupling.weights.data()) total += w * c0;
    return total;
}

} // namespace wtflow
