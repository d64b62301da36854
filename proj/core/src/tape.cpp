// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/tape.hpp"

#include <algorithm>
#include <cmath>

#include "wtflow/error.hpp"

namespace wtflow::ad {

namespace {

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void accumulate(Tensor& into, const Tensor& g) {
    if (into.empty() && !g.empty()) {
        into = g;
        return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) into[i] += g[i];
}

} // namespace

const Tensor& Var::value() const {
    if (tape_ == nullptr) throw InvalidArgument("Var is not attached to a tape");
    return tape_->value(*this);
}

const Tensor& Gradients::operator[](const Var& leaf) const {
    const auto it = std::find(leaf_nodes_.begin(), leaf_nodes_.end(), leaf.id());
    if (it == leaf_nodes_.end()) throw InvalidArgument("gradient requested for a non-leaf node");
    return grads_[static_cast<std::size_t>(it - leaf_nodes_.begin())];
}

void Tape::check(Var v) const {
    if (v.tape() != this || v.id() >= nodes_.size()) {
        throw InvalidArgument("Var belongs to a different tape");
    }
}

const Tensor& Tape::value(Var v) const {
    check(v);
    return nodes_[v.id()].value;
}

Var Tape::leaf(Tensor value) {
    leaves_.push_back(nodes_.size());
    nodes_.push_back(Node{Op::Leaf, {}, std::move(value), 0.0, true});
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{Op::Constant, {}, std::move(value), 0.0, false});
    return Var(this, nodes_.size() - 1);
}

Var Tape::push(Op op, std::vector<std::size_t> inputs, double arg) {
    Node node{op, std::move(inputs), Tensor{}, arg, false};
    for (std::size_t in : node.inputs) node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
    node.value = compute(node);
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Tensor Tape::compute(const Node& node) const {
    auto in = [&](std::size_t k) -> const Tensor& { return nodes_[node.inputs[k]].value; };
    switch (node.op) {
    case Op::Leaf:
    case Op::Constant:
        return node.value;
    case Op::MatMul:
        return wtflow::matmul(in(0), in(1));
    case Op::AddRowBias: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        if (a.rank() != 2 || b.size() != a.cols()) {
            throw InvalidArgument("add_row_bias: bias length does not match columns");
        }
        Tensor out = a;
        const std::size_t c = a.cols();
        for (std::size_t r = 0; r < a.rows(); ++r) {
            for (std::size_t j = 0; j < c; ++j) out[r * c + j] += b[j];
        }
        return out;
    }
    case Op::Add:
        return wtflow::add(in(0), in(1));
    case Op::Sub:
        return wtflow::sub(in(0), in(1));
    case Op::Mul:
        return wtflow::hadamard(in(0), in(1));
    case Op::Scale:
        return wtflow::scale(in(0), node.arg);
    case Op::Square: {
        Tensor out = in(0);
        for (double& v : out.data()) v = v * v;
        return out;
    }
    case Op::Silu: {
        Tensor out = in(0);
        for (double& v : out.data()) v = v * sigmoid(v);
        return out;
    }
    case Op::Tanh: {
        Tensor out = in(0);
        for (double& v : out.data()) v = std::tanh(v);
        return out;
    }
    case Op::ConcatCols:
        return wtflow::concat_cols(in(0), in(1));
    case Op::Sum:
        return Tensor::scalar(wtflow::sum(in(0)));
    case Op::Mean:
        return Tensor::scalar(wtflow::mean(in(0)));
    }
    throw InvalidArgument("unknown tape op");
}

Var Tape::matmul(Var a, Var b) { check(a); check(b); return push(Op::MatMul, {a.id(), b.id()}); }
Var Tape::add_row_bias(Var a, Var bias) { check(a); check(bias); return push(Op::AddRowBias, {a.id(), bias.id()}); }
Var Tape::add(Var a, Var b) { check(a); check(b); return push(Op::Add, {a.id(), b.id()}); }
Var Tape::sub(Var a, Var b) { check(a); check(b); return push(Op::Sub, {a.id(), b.id()}); }
Var Tape::mul(Var a, Var b) { check(a); check(b); return push(Op::Mul, {a.id(), b.id()}); }
Var Tape::scale(Var a, double s) { check(a); return push(Op::Scale, {a.id()}, s); }
Var Tape::square(Var a) { check(a); return push(Op::Square, {a.id()}); }
Var Tape::silu(Var a) { check(a); return push(Op::Silu, {a.id()}); }
Var Tape::tanh(Var a) { check(a); return push(Op::Tanh, {a.id()}); }
Var Tape::concat_cols(Var a, Var b) { check(a); check(b); return push(Op::ConcatCols, {a.id(), b.id()}); }
Var Tape::sum(Var a) { check(a); return push(Op::Sum, {a.id()}); }
Var Tape::mean(Var a) { check(a); return push(Op::Mean, {a.id()}); }

Gradients Tape::backward(Var output) {
    check(output);
    if (nodes_[output.id()].value.size() != 1) {
        throw InvalidArgument("backward: output must be scalar, got shape " +
                              shape_to_string(nodes_[output.id()].value.shape()));
    }

    std::vector<Tensor> adjoint(output.id() + 1);
    adjoint[output.id()] = Tensor::full(nodes_[output.id()].value.shape(), 1.0);
    last_visits_ = 0;

    for (std::size_t k = output.id() + 1; k-- > 0;) {
        const Node& node = nodes_[k];
        if (!node.requires_grad || adjoint[k].empty()) continue;
        ++last_visits_;
        const Tensor& g = adjoint[k];
        auto in = [&](std::size_t i) -> const Tensor& { return nodes_[node.inputs[i]].value; };
        auto needs = [&](std::size_t i) { return nodes_[node.inputs[i]].requires_grad; };
        auto send = [&](std::size_t i, const Tensor& contribution) {
            accumulate(adjoint[node.inputs[i]], contribution);
        };

        switch (node.op) {
        case Op::Leaf:
        case Op::Constant:
            break;
        case Op::MatMul:
            if (needs(0)) send(0, matmul_nt(g, in(1)));
            if (needs(1)) send(1, matmul_tn(in(0), g));
            break;
        case Op::AddRowBias:
            if (needs(0)) send(0, g);
            if (needs(1)) {
                const std::size_t c = g.cols();
                Tensor db(in(1).shape());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t j = 0; j < c; ++j) db[j] += g[r * c + j];
                }
                send(1, db);
            }
            break;
        case Op::Add:
            if (needs(0)) send(0, g);
            if (needs(1)) send(1, g);
            break;
        case Op::Sub:
            if (needs(0)) send(0, g);
            if (needs(1)) send(1, wtflow::scale(g, -1.0));
            break;
        case Op::Mul:
            if (needs(0)) send(0, hadamard(g, in(1)));
            if (needs(1)) send(1, hadamard(g, in(0)));
            break;
        case Op::Scale:
            send(0, wtflow::scale(g, node.arg));
            break;
        case Op::Square: {
            Tensor d = in(0);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * d[i] * g[i];
            send(0, d);
            break;
        }
        case Op::Silu: {
            Tensor d = in(0);
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double x = d[i];
                const double s = sigmoid(x);
                d[i] = g[i] * s * (1.0 + x * (1.0 - s));
            }
            send(0, d);
            break;
        }
        case Op::Tanh: {
            Tensor d = node.value;
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * (1.0 - d[i] * d[i]);
            send(0, d);
            break;
        }
        case Op::ConcatCols: {
            const std::size_t ca = in(0).cols();
            const std::size_t cb = in(1).cols();
            const std::size_t rows = g.rows();
            Tensor da(Shape{rows, ca});
            Tensor dbt(Shape{rows, cb});
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < ca; ++j) da[r * ca + j] = g[r * (ca + cb) + j];
                for (std::size_t j = 0; j < cb; ++j) dbt[r * cb + j] = g[r * (ca + cb) + ca + j];
            }
            if (needs(0)) send(0, da);
            if (needs(1)) send(1, dbt);
            break;
        }
        case Op::Sum:
            send(0, Tensor::full(in(0).shape(), g.item()));
            break;
        case Op::Mean:
            send(0, Tensor::full(in(0).shape(), g.item() / static_cast<double>(in(0).size())));
            break;
        }
    }

    Gradients result;
    result.leaf_nodes_ = leaves_;
    result.grads_.reserve(leaves_.size());
    for (std::size_t id : leaves_) {
        if (id < adjoint.size() && !adjoint[id].empty()) {
            result.grads_.push_back(std::move(adjoint[id]));
        } else {
            result.grads_.push_back(Tensor::zeros(nodes_[id].value.shape()));
        }
    }
    return result;
}

bool Tape::replay_matches() const {
    for (const Node& node : nodes_) {
        if (node.op == Op::Leaf || node.op == Op::Constant) continue;
        if (!bit_equal(compute(node), node.value)) return false;
    }
    return true;
}

} // namespace wtflow::ad
