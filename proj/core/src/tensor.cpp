// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include <Eigen/Core>

#include "wtflow/error.hpp"

namespace wtflow {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap as_matrix(const Tensor& t) {
    return ConstMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                    static_cast<Eigen::Index>(t.cols()));
}

MutMap as_matrix(Tensor& t) {
    return MutMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

void require_rank2(const Tensor& t, const char* what) {
    if (t.rank() != 2) {
        throw InvalidArgument(std::string(what) + ": expected a rank-2 tensor, got shape " +
                              shape_to_string(t.shape()));
    }
}

} // namespace

std::size_t shape_product(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) {
        if (extent != 0 && n > std::numeric_limits<std::size_t>::max() / extent) {
            throw InvalidArgument("shape product overflows: " + shape_to_string(shape));
        }
        n *= extent;
    }
    return n;
}

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    if (shape_product(shape_) != data_.size()) {
        throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                              " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::full(Shape shape, double value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw InvalidArgument("axis " + std::to_string(axis) + " out of range for shape " +
                              shape_to_string(shape_));
    }
    return shape_[axis];
}

std::size_t Tensor::rows() const {
    require_rank2(*this, "rows");
    return shape_[0];
}

std::size_t Tensor::cols() const {
    require_rank2(*this, "cols");
    return shape_[1];
}

double Tensor::item() const {
    if (data_.size() != 1) {
        throw InvalidArgument("item() on tensor of shape " + shape_to_string(shape_));
    }
    return data_[0];
}

std::span<const double> Tensor::row(std::size_t r) const {
    const std::size_t c = cols();
    return std::span<const double>(data_).subspan(r * c, c);
}

std::span<double> Tensor::row(std::size_t r) {
    const std::size_t c = cols();
    return std::span<double>(data_).subspan(r * c, c);
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape_product(shape) != data_.size()) {
        throw InvalidArgument("reshape of " + shape_to_string(shape_) + " to " + shape_to_string(shape) +
                              " changes the element count");
    }
    Tensor out;
    out.shape_ = std::move(shape);
    out.data_ = data_;
    return out;
}

bool Tensor::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool bit_equal(const Tensor& a, const Tensor& b) noexcept {
    return a.shape() == b.shape() &&
           (a.size() == 0 ||
            std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw InvalidArgument(std::string(what) + ": shape mismatch " + shape_to_string(a.shape()) +
                              " vs " + shape_to_string(b.shape()));
    }
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

Tensor axpby(double alpha, const Tensor& a, double beta, const Tensor& b) {
    require_same_shape(a, b, "axpby");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
    return out;
}

double sum(const Tensor& a) noexcept {
    double s = 0.0;
    for (double v : a.data()) s += v;
    return s;
}

double mean(const Tensor& a) {
    if (a.empty()) throw InvalidArgument("mean of empty tensor");
    return sum(a) / static_cast<double>(a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> a) noexcept {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(squared_norm(a)); }

std::vector<double> row_norms(const Tensor& m) {
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = norm2(m.row(r));
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul");
    require_rank2(b, "matmul");
    if (a.cols() != b.rows()) {
        throw InvalidArgument("matmul: inner extents differ " + shape_to_string(a.shape()) + " x " +
                              shape_to_string(b.shape()));
    }
    Tensor out(Shape{a.rows(), b.cols()});
    as_matrix(out).noalias() = as_matrix(a) * as_matrix(b);
    return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul_tn");
    require_rank2(b, "matmul_tn");
    if (a.rows() != b.rows()) {
        throw InvalidArgument("matmul_tn: row extents differ " + shape_to_string(a.shape()) + " vs " +
                              shape_to_string(b.shape()));
    }
    Tensor out(Shape{a.cols(), b.cols()});
    as_matrix(out).noalias() = as_matrix(a).transpose() * as_matrix(b);
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul_nt");
    require_rank2(b, "matmul_nt");
    if (a.cols() != b.cols()) {
        throw InvalidArgument("matmul_nt: column extents differ " + shape_to_string(a.shape()) +
                              " vs " + shape_to_string(b.shape()));
    }
    Tensor out(Shape{a.rows(), b.rows()});
    as_matrix(out).noalias() = as_matrix(a) * as_matrix(b).transpose();
    return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    require_rank2(a, "concat_cols");
    require_rank2(b, "concat_cols");
    if (a.rows() != b.rows()) throw InvalidArgument("concat_cols: row counts differ");
    const std::size_t ca = a.cols();
    const std::size_t cb = b.cols();
    Tensor out(Shape{a.rows(), ca + cb});
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row(r);
        auto ra = a.row(r);
        auto rb = b.row(r);
        std::copy(ra.begin(), ra.end(), dst.begin());
        std::copy(rb.begin(), rb.end(), dst.begin() + static_cast<std::ptrdiff_t>(ca));
    }
    return out;
}

Tensor slice_rows(const Tensor& m, std::size_t begin, std::size_t end) {
    require_rank2(m, "slice_rows");
    if (begin > end || end > m.rows()) throw InvalidArgument("slice_rows: range out of bounds");
    const std::size_t c = m.cols();
    std::vector<double> data(m.data().begin() + static_cast<std::ptrdiff_t>(begin * c),
                             m.data().begin() + static_cast<std::ptrdiff_t>(end * c));
    return Tensor(Shape{end - begin, c}, std::move(data));
}

Tensor gather_rows(const Tensor& m, std::span<const std::size_t> indices) {
    require_rank2(m, "gather_rows");
    const std::size_t c = m.cols();
    Tensor out(Shape{indices.size(), c});
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= m.rows()) throw InvalidArgument("gather_rows: index out of range");
        auto src = m.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Tensor to_location_rows(const Tensor& features) {
    if (features.rank() == 2) return features;
    if (features.rank() != 4) {
        throw InvalidArgument("expected [N,C] or [N,C,H,W] features, got " +
                              shape_to_string(features.shape()));
    }
    const auto& s = features.shape();
    const std::size_t n = s[0], c = s[1], hw = s[2] * s[3];
    Tensor out(Shape{n * hw, c});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double* src = features.data().data() + (i * c + ch) * hw;
            for (std::size_t p = 0; p < hw; ++p) out[(i * hw + p) * c + ch] = src[p];
        }
    }
    return out;
}

Tensor from_location_rows(const Tensor& rows, const Shape& feature_shape) {
    if (feature_shape.size() == 2) return rows.reshaped(feature_shape);
    if (feature_shape.size() != 4) throw InvalidArgument("from_location_rows: unsupported rank");
    const std::size_t n = feature_shape[0], c = feature_shape[1],
                      hw = feature_shape[2] * feature_shape[3];
    if (rows.rank() != 2 || rows.rows() != n * hw || rows.cols() != c) {
        throw InvalidArgument("from_location_rows: " + shape_to_string(rows.shape()) +
                              " does not match " + shape_to_string(feature_shape));
    }
    Tensor out(feature_shape);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            double* dst = out.data().data() + (i * c + ch) * hw;
            for (std::size_t p = 0; p < hw; ++p) dst[p] = rows[(i * hw + p) * c + ch];
        }
    }
    return out;
}

} // namespace wtflow
