// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace wtflow {

using Shape = std::vector<std::size_t>;

/// Allocator with a fixed 64-byte alignment. Vectorised kernels choose their
/// loop split from the buffer address, so a fixed alignment keeps results
/// independent of where the allocator happened to place a tensor.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t kAlignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using TensorBuffer = std::vector<double, AlignedAllocator<double>>;

/// Number of elements described by `shape` (1 for the rank-0 scalar shape).
/// Throws InvalidArgument if the product overflows size_t.
std::size_t shape_product(const Shape& shape);

std::string shape_to_string(const Shape& shape);

/// Dense row-major tensor of 64-bit floats.
///
/// Tensors are plain values. Code that hands a tensor to other threads treats
/// it as read-only; the mutable accessors exist for builders that own the value.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim(std::size_t axis) const;
    bool empty() const noexcept { return data_.empty(); }

    /// Rows/cols of a rank-2 tensor.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    /// Copy of the elements as a plain vector.
    std::vector<double> values() const { return {data_.begin(), data_.end()}; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_.back() + c]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * shape_.back() + c]; }

    /// The single value of a one-element tensor.
    double item() const;

    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);

    Tensor reshaped(Shape shape) const;
    bool all_finite() const noexcept;

private:
    Shape shape_;
    TensorBuffer data_;
};

/// Same shape and bit-identical buffers (distinguishes -0.0 from 0.0, NaN payloads).
bool bit_equal(const Tensor& a, const Tensor& b) noexcept;

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
/// alpha * a + beta * b, elementwise.
Tensor axpby(double alpha, const Tensor& a, double beta, const Tensor& b);

/// Sequential-order reductions.
double sum(const Tensor& a) noexcept;
double mean(const Tensor& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a) noexcept;
double squared_norm(std::span<const double> a) noexcept;

/// Euclidean norm of each row of a rank-2 tensor.
std::vector<double> row_norms(const Tensor& m);

/// Matrix products on rank-2 tensors: a*b, a^T*b and a*b^T.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_tn(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);

/// Horizontal concatenation of two rank-2 tensors with equal row counts.
Tensor concat_cols(const Tensor& a, const Tensor& b);
/// Rows [begin, end) of a rank-2 tensor.
Tensor slice_rows(const Tensor& m, std::size_t begin, std::size_t end);
/// Gathers rows of a rank-2 tensor by index.
Tensor gather_rows(const Tensor& m, std::span<const std::size_t> indices);

/// [N, C, H, W] -> [N*H*W, C] (one row per spatial location); rank-2 input passes through.
Tensor to_location_rows(const Tensor& features);
/// Inverse of to_location_rows for a target feature shape.
Tensor from_location_rows(const Tensor& rows, const Shape& feature_shape);

} // namespace wtflow
