// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "wtflow/error.hpp"

namespace wtflow {

VectorField as_field(const VectorFieldModel& model) {
    return [&model](const Tensor& x, double t) { return model.forward(x, t); };
}

Tensor evaluate_field(const VectorField& field, const Tensor& x, double t, const FlowOptions& opts) {
    if (x.rank() != 2) throw InvalidArgument("evaluate_field: expected [B, d] input");
    const std::size_t rows = x.rows();
    if (rows <= kFlowChunkRows) {
        Tensor v = field(x, t);
        if (v.shape() != x.shape()) throw InvalidArgument("vector field changed the sample shape");
        return v;
    }

    const std::size_t chunks = (rows + kFlowChunkRows - 1) / kFlowChunkRows;
    std::vector<Tensor> parts(chunks);
    std::vector<std::exception_ptr> errors(chunks);
    auto work = [&](std::size_t c) {
        try {
            const std::size_t begin = c * kFlowChunkRows;
            const std::size_t end = std::min(rows, begin + kFlowChunkRows);
            parts[c] = field(slice_rows(x, begin, end), t);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.threads, chunks));
    if (workers == 1) {
        for (std::size_t c = 0; c < chunks; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < chunks; c += workers) work(c);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Tensor out(x.shape());
    const std::size_t d = x.cols();
    for (std::size_t c = 0; c < chunks; ++c) {
        if (parts[c].rank() != 2 || parts[c].cols() != d) throw InvalidArgument("vector field changed the sample shape");
        std::copy(parts[c].data().begin(), parts[c].data().end(),
                  out.data().begin() + static_cast<std::ptrdiff_t>(c * kFlowChunkRows * d));
    }
    return out;
}

Trajectory BatchTrajectory::sample(std::size_t b) const {
    Trajectory tr;
    tr.n_steps = n_steps;
    tr.steps = steps;
    tr.times = times;
    for (std::size_t k = 0; k < states.size(); ++k) {
        auto row = states[k].row(b);
        tr.states.push_back(Tensor::vector({row.begin(), row.end()}));
        tr.norms.push_back(norms[k][b]);
    }
    return tr;
}

BatchTrajectory integrate_euler_batch(const Tensor& x_init, const VectorField& field, std::size_t n_steps,
                                      bool record, const FlowOptions& opts) {
    if (n_steps == 0) throw InvalidArgument("integrate_euler: n_steps must be >= 1");
    if (x_init.rank() != 2) throw InvalidArgument("integrate_euler_batch: expected [B, d] input");

    BatchTrajectory tr;
    tr.n_steps = n_steps;
    auto keep = [&](std::size_t j, const Tensor& x) {
        tr.steps.push_back(j);
        tr.times.push_back(static_cast<double>(j) / static_cast<double>(n_steps));
        tr.norms.push_back(row_norms(x));
        tr.states.push_back(x);
    };

    const double h = 1.0 / static_cast<double>(n_steps);
    Tensor x = x_init;
    keep(0, x);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n_steps);
        const Tensor v = evaluate_field(field, x, t, opts);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] + h * v[i];
        if (!x.all_finite()) {
            throw IntegrationError("integrate_euler: non-finite state after step " + std::to_string(j + 1),
                                   j + 1);
        }
        if (record || j + 1 == n_steps) keep(j + 1, x);
    }
    return tr;
}

Trajectory integrate_euler(const Tensor& x_init, const VectorField& field, std::size_t n_steps, bool record) {
    if (x_init.rank() != 1) throw InvalidArgument("integrate_euler: expected a [d] vector");
    const Tensor batch = x_init.reshaped(Shape{1, x_init.size()});
    return integrate_euler_batch(batch, field, n_steps, record).sample(0);
}

Tensor one_step_endpoint(const Tensor& x_init, const VectorField& field, const FlowOptions& opts) {
    if (x_init.rank() == 1) {
        const Tensor batch = x_init.reshaped(Shape{1, x_init.size()});
        return one_step_endpoint(batch, field, opts).reshaped(x_init.shape());
    }
    const Tensor v = evaluate_field(field, x_init, 0.0, opts);
    Tensor out = x_init;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] + 1.0 * v[i];
    if (!out.all_finite()) throw IntegrationError("one_step_endpoint: non-finite state", 1);
    return out;
}

} // namespace wtflow
