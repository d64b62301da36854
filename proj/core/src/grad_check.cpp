// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "wtflow/error.hpp"
#include "wtflow/random.hpp"

namespace wtflow {

double evaluate_scalar(const ScalarFn& fn, const std::vector<Tensor>& params) {
    ad::Tape tape;
    std::vector<ad::Var> leaves;
    leaves.reserve(params.size());
    for (const Tensor& p : params) leaves.push_back(tape.leaf(p));
    return fn(tape, leaves).value().item();
}

GradCheckReport grad_check(const ScalarFn& fn, const std::vector<Tensor>& params,
                           const GradCheckOptions& options) {
    if (!(options.step > 0.0)) throw InvalidArgument("grad_check: step must be positive");

    ad::Tape tape;
    std::vector<ad::Var> leaves;
    for (const Tensor& p : params) {
        if (!p.all_finite()) throw InvalidArgument("grad_check: non-finite parameter");
        leaves.push_back(tape.leaf(p));
    }
    const ad::Var out = fn(tape, leaves);
    const ad::Gradients grads = tape.backward(out);

    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t i = 0; i < params[p].size(); ++i) entries.emplace_back(p, i);
    }
    if (options.max_entries != 0 && entries.size() > options.max_entries) {
        RandomStream stream(options.seed);
        const auto order = stream.permutation(entries.size());
        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        chosen.reserve(options.max_entries);
        for (std::size_t k = 0; k < options.max_entries; ++k) chosen.push_back(entries[order[k]]);
        std::sort(chosen.begin(), chosen.end());
        entries = std::move(chosen);
    }

    GradCheckReport report;
    std::vector<Tensor> probe = params;
    const double h = options.step;
    for (const auto& [p, i] : entries) {
        const double original = probe[p][i];
        probe[p][i] = original + h;
        const double up = evaluate_scalar(fn, probe);
        probe[p][i] = original - h;
        const double down = evaluate_scalar(fn, probe);
        probe[p][i] = original;

        const double fd = (up - down) / (2.0 * h);
        const double an = grads.all()[p][i];
        const double denom = std::max({std::abs(an), std::abs(fd), 1e-12});
        const double rel = std::abs(an - fd) / denom;
        ++report.entries_checked;
        if (rel > report.max_relative_error) {
            report.max_relative_error = rel;
            report.worst_param = p;
            report.worst_entry = i;
            report.worst_analytic = an;
            report.worst_numeric = fd;
        }
    }
    return report;
}

} // namespace wtflow
