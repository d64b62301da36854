// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wtflow/tensor.hpp"

namespace wtflow::ad {

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
public:
    Var() = default;

    Tape* tape() const noexcept { return tape_; }
    std::size_t id() const noexcept { return id_; }
    const Tensor& value() const;

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

enum class Op : std::uint8_t {
    Leaf,
    Constant,
    MatMul,
    AddRowBias,
    Add,
    Sub,
    Mul,
    Scale,
    Square,
    Silu,
    Tanh,
    ConcatCols,
    Sum,
    Mean,
};

/// Gradients of one scalar output, one tensor per leaf in creation order.
class Gradients {
public:
    const Tensor& operator[](const Var& leaf) const;
    const std::vector<Tensor>& all() const noexcept { return grads_; }

private:
    friend class Tape;
    std::vector<std::size_t> leaf_nodes_;
    std::vector<Tensor> grads_;
};

/// Ordered record of primitive operations.
///
/// Nodes are appended in evaluation order, so the record is already a
/// topological order and the backward sweep walks it in reverse. A tape is
/// used by one thread at a time.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable input (a parameter).
    Var leaf(Tensor value);
    /// Non-differentiable input.
    Var constant(Tensor value);

    Var matmul(Var a, Var b);
    /// a[n,m] + bias[m] broadcast over rows.
    Var add_row_bias(Var a, Var bias);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var square(Var a);
    Var silu(Var a);
    Var tanh(Var a);
    Var concat_cols(Var a, Var b);
    /// Scalar sum of all entries (sequential order).
    Var sum(Var a);
    Var mean(Var a);

    const Tensor& value(Var v) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept { return leaves_.size(); }
    Op op(std::size_t id) const { return nodes_.at(id).op; }

    /// Reverse sweep from a one-element output. Leaves the output does not
    /// depend on receive zero gradients. Throws InvalidArgument for non-scalar outputs.
    Gradients backward(Var output);

    /// Number of nodes whose adjoint was propagated by the last backward call.
    std::size_t last_backward_visits() const noexcept { return last_visits_; }

    /// Recomputes every non-input node from its recorded inputs and reports
    /// whether all recomputed values are bit-identical to the recorded ones.
    bool replay_matches() const;

private:
    struct Node {
        Op op;
        std::vector<std::size_t> inputs;
        Tensor value;
        double arg = 0.0;
        bool requires_grad = false;
    };

    Var push(Op op, std::vector<std::size_t> inputs, double arg = 0.0);
    Tensor compute(const Node& node) const;
    void check(Var v) const;

    std::vector<Node> nodes_;
    std::vector<std::size_t> leaves_;
    std::size_t last_visits_ = 0;
};

} // namespace wtflow::ad
