// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "wtflow/error.hpp"
#include "wtflow/random.hpp"

namespace wtflow {
namespace {

// Stream sequences used by the generators.
constexpr std::uint64_t kTrainSeq = 11;
constexpr std::uint64_t kTestSeq = 12;
constexpr std::uint64_t kBasisSeq = 13;

Tensor gaussian_rows(RandomStream& rs, std::size_t n, double cx, double cy, double sd) {
    Tensor out(Shape{n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        out.at(i, 0) = cx + sd * rs.normal();
        out.at(i, 1) = cy + sd * rs.normal();
    }
    return out;
}

Tensor ring_rows(RandomStream& rs, std::size_t n, double radius) {
    Tensor out(Shape{n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * rs.uniform();
        out.at(i, 0) = radius * std::cos(a);
        out.at(i, 1) = radius * std::sin(a);
    }
    return out;
}

Tensor stack_rows(const Tensor& a, const Tensor& b) {
    Tensor out(Shape{a.rows() + b.rows(), a.cols()});
    std::copy(a.data().begin(), a.data().end(), out.data().begin());
    std::copy(b.data().begin(), b.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

void require_counts(std::size_t n_train, std::size_t n_test, std::size_t min_test) {
    if (n_train == 0) throw InvalidArgument("scenario: n_train must be >= 1");
    if (n_test < min_test) throw InvalidArgument("scenario: n_test must be >= " + std::to_string(min_test));
}

Dataset mixed(std::string name, std::size_t n_train, std::size_t n_test, std::uint64_t seed, double normal_sd,
              const std::function<Tensor(RandomStream&, std::size_t)>& anomalies) {
    require_counts(n_train, n_test, 2);
    RandomStream train_rs(seed, kTrainSeq);
    RandomStream test_rs(seed, kTestSeq);
    const std::size_t n_norm = (n_test + 1) / 2;
    const std::size_t n_anom = n_test - n_norm;
    Dataset ds{std::move(name), gaussian_rows(train_rs, n_train, 0.0, 0.0, normal_sd), {}, {}};
    const Tensor normals = gaussian_rows(test_rs, n_norm, 0.0, 0.0, normal_sd);
    ds.test = stack_rows(normals, anomalies(test_rs, n_anom));
    ds.test_labels.assign(n_norm, 0);
    ds.test_labels.resize(n_test, 1);
    return ds;
}

} // namespace

Tensor disc_grid(std::size_t n, double radius) {
    if (n < 2 || !(radius > 0.0)) throw InvalidArgument("disc_grid: need n >= 2 and radius > 0");
    std::vector<double> pts;
    const double h = 2.0 * radius / static_cast<double>(n - 1);
    // Points on the circle (the axis ends) are excluded despite rounding.
    const double limit = radius * (1.0 - 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -radius + h * static_cast<double>(i);
            const double y = -radius + h * static_cast<double>(j);
            if (std::hypot(x, y) < limit) {
                pts.push_back(x);
                pts.push_back(y);
            }
        }
    }
    const std::size_t rows = pts.size() / 2;
    return Tensor(Shape{rows, 2}, std::move(pts));
}

std::vector<std::string> scenario_names() {
    return {"disc_grid", "origin_blob", "intersecting", "disjoint", "synthetic_features"};
}

Dataset gen_scenario(std::string_view name, std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    if (name == "disc_grid") {
        Tensor grid = disc_grid();
        return Dataset{"disc_grid", grid, grid, std::vector<int>(grid.rows(), 0)};
    }
    if (name == "origin_blob") {
        require_counts(n_train, n_test, 1);
        RandomStream train_rs(seed, kTrainSeq);
        RandomStream test_rs(seed, kTestSeq);
        return Dataset{"origin_blob", gaussian_rows(train_rs, n_train, 0.0, 0.0, 1.0),
                       gaussian_rows(test_rs, n_test, 0.0, 0.0, 0.1), std::vector<int>(n_test, 0)};
    }
    if (name == "intersecting") {
        return mixed("intersecting", n_train, n_test, seed, 1.0, [](RandomStream& rs, std::size_t n) {
            return gaussian_rows(rs, n, -1.0, -1.0, std::sqrt(0.3));
        });
    }
    if (name == "disjoint") {
        return mixed("disjoint", n_train, n_test, seed, 0.5,
                     [](RandomStream& rs, std::size_t n) { return ring_rows(rs, n, 4.0); });
    }
    if (name == "synthetic_features") return synthetic_features(FeatureSpec{}, n_train, n_test, seed);
    throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
}

Dataset synthetic_features(const FeatureSpec& spec, std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    require_counts(n_train, n_test, 2);
    const std::size_t c = spec.channels, h = spec.height, w = spec.width, k = spec.latent;
    if (c == 0 || h == 0 || w == 0 || k == 0) throw InvalidArgument("synthetic_features: empty dimensions");
    if (spec.patch == 0 || spec.patch > std::min(h, w)) throw InvalidArgument("synthetic_features: bad patch size");

    RandomStream basis_rs(seed, kBasisSeq);
    std::vector<double> basis(c * k);
    std::vector<double> offset(c);
    for (double& v : basis) v = basis_rs.normal() / std::sqrt(static_cast<double>(k));
    for (double& v : offset) v = 0.5 * basis_rs.normal();

    // Location feature relu(A z + b + noise); anomalies shift z along the first latent axis.
    auto fill = [&](RandomStream& rs, Tensor& t, std::size_t img, bool anomalous) {
        const std::size_t py = anomalous ? rs.below(h - spec.patch + 1) : 0;
        const std::size_t px = anomalous ? rs.below(w - spec.patch + 1) : 0;
        std::vector<double> z(k);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                for (double& v : z) v = rs.normal();
                if (anomalous && y >= py && y < py + spec.patch && x >= px && x < px + spec.patch) z[0] += spec.shift;
                for (std::size_t ch = 0; ch < c; ++ch) {
                    double a = offset[ch] + spec.noise * rs.normal();
                    for (std::size_t j = 0; j < k; ++j) a += basis[ch * k + j] * z[j];
                    t[((img * c + ch) * h + y) * w + x] = std::max(a, 0.0);
                }
            }
        }
    };

    Dataset ds{"synthetic_features", Tensor(Shape{n_train, c, h, w}), Tensor(Shape{n_test, c, h, w}), {}};
    RandomStream train_rs(seed, kTrainSeq);
    RandomStream test_rs(seed, kTestSeq);
    for (std::size_t i = 0; i < n_train; ++i) fill(train_rs, ds.train, i, false);
    for (std::size_t i = 0; i < n_test; ++i) {
        const bool anomalous = i % 2 == 1;
        fill(test_rs, ds.test, i, anomalous);
        ds.test_labels.push_back(anomalous ? 1 : 0);
    }
    return ds;
}

} // namespace wtflow
