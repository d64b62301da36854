// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "wtflow/csv.hpp"
#include "wtflow/diag.hpp"
#include "wtflow/error.hpp"

namespace wtflow {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

const VectorField kZero = [](const Tensor& x, double) { return Tensor(x.shape()); };

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Composite trapezoid on a fine grid; independent of the adaptive quadrature.
double kl_trapezoid(double sd0, double eps) {
    const double a = -10.0 * std::max(sd0, 1.0), b = -a;
    const int n = 400000;
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + h * i;
        const double p = std::exp(-0.5 * x * x / (sd0 * sd0)) / (sd0 * std::sqrt(2.0 * std::numbers::pi));
        const double g = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        const double q = (p + eps * g) / (1.0 + eps);
        const double f = p > 0.0 ? p * std::log(p / q) : 0.0;
        s += (i == 0 || i == n ? 0.5 : 1.0) * f;
    }
    return s * h;
}

TEST(Annulus, OneDimensionalCase) {
    RandomStream rs(1);
    const double frac = annulus_fraction(1, 100000, 1.0, rs);
    const double exact = 2.0 * normal_cdf(2.0) - 1.0; // P(|x| <= 2)
    EXPECT_NEAR(exact, 0.9545, 1e-4);
    EXPECT_NEAR(frac, exact, 0.01);
    EXPECT_NEAR(chi_annulus_probability(1, 1.0), exact, 1e-12);
}

TEST(Annulus, ChiOracleMatchesNormalCdfInTwoDimensions) {
    // ||x||^2 ~ Exp(1/2) in 2D, so P(r <= R) = 1 - exp(-R^2 / 2).
    const double beta = 0.6, root = std::sqrt(2.0);
    const double lo = root - beta, hi = root + beta;
    EXPECT_NEAR(chi_annulus_probability(2, beta), std::exp(-lo * lo / 2) - std::exp(-hi * hi / 2), 1e-14);
}

TEST(Annulus, WiderBandNeverHoldsLess) {
    RandomStream a(2), b(2);
    const double narrow = annulus_fraction(16, 5000, 1.0, a);
    const double full = annulus_fraction(16, 5000, 4.0, b);
    EXPECT_GE(full, narrow);
    EXPECT_THROW(annulus_fraction(4, 10, 3.0, a), InvalidArgument);
    EXPECT_THROW(annulus_fraction(0, 10, 1.0, a), InvalidArgument);
}

TEST(Annulus, MonteCarloWithinThreeSigmaOfOracleForMostSeeds) {
    const std::size_t d = 8, n = 4000;
    const double beta = 1.0;
    const double p = chi_annulus_probability(d, beta);
    const double band = 3.0 * std::sqrt(p * (1.0 - p) / n);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomStream rs(seed);
        inside += std::abs(annulus_fraction(d, n, beta, rs) - p) < band;
    }
    EXPECT_GE(inside, 38);
}

TEST(Kl, IdenticalDistributionsGiveZero) {
    for (double e : {0.0, 1e-3, 0.05, 0.1}) EXPECT_NEAR(kl_perturbation({0.0, 1.0}, e), 0.0, 1e-15);
}

TEST(Kl, MatchesTrapezoidOracle) {
    for (double e : {1e-3, 1e-2, 1e-1}) {
        const double ref = kl_trapezoid(2.0, e);
        EXPECT_NEAR(kl_perturbation({0.0, 2.0}, e), ref, 1e-9 + 1e-6 * ref) << e;
    }
}

TEST(Kl, LeadingCoefficient) {
    // D ~ eps^2 / 2 * (integral N^2 / p0 - 1) = eps^2 / 2 * (4 / sqrt(7) - 1) for p0 = N(0, 4).
    const double c = 0.5 * (4.0 / std::sqrt(7.0) - 1.0);
    // The next term is O(eps^3), so the ratio is within ~1e-3 relative at eps = 1e-4.
    const double e = 1e-4;
    EXPECT_NEAR(kl_perturbation({0.0, 2.0}, e, 1e-16) / (e * e), c, 1e-3 * c);
}

TEST(Kl, CurveIsNonNegativeWithQuadraticSlope) {
    const auto eps = default_kl_eps();
    ASSERT_EQ(eps.size(), 9u);
    EXPECT_DOUBLE_EQ(eps.front(), 1e-3);
    EXPECT_DOUBLE_EQ(eps.back(), 1e-1);
    std::vector<double> with_zero{0.0};
    with_zero.insert(with_zero.end(), eps.begin(), eps.end());
    const KlCurve c = kl_perturbation_curve({0.0, 2.0}, with_zero);
    EXPECT_EQ(c.kl.front(), 0.0);
    for (double v : c.kl) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(c.slope, 2.0, 0.1);
    EXPECT_THROW(kl_perturbation_curve({0.0, 2.0}, std::vector<double>{0.5}), InvalidArgument);
}

TEST(Kl, NonConvergenceRaises) {
    EXPECT_THROW(kl_perturbation({0.0, 2.0}, 0.05, 1e-300), NumericalError);
}

// Direct sum of Gaussian densities, no stabilisation.
Tensor naive_marginal(const Tensor& x, double t, const Tensor& data, const PathSpec& spec) {
    const PathSchedule s = schedule(spec, t);
    const std::size_t d = data.cols();
    std::vector<double> num(d, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double q = 0.0;
        for (std::size_t j = 0; j < d; ++j) q += std::pow(x[j] - s.mean_coeff * data.at(i, j), 2);
        const double w = std::exp(-q / (2 * s.sigma * s.sigma)) / std::pow(2 * std::numbers::pi * s.sigma * s.sigma, d / 2.0);
        den += w;
        for (std::size_t j = 0; j < d; ++j) {
            const double u = s.d_mean_coeff * data.at(i, j) + s.d_sigma / s.sigma * (x[j] - s.mean_coeff * data.at(i, j));
            num[j] += w * u;
        }
    }
    Tensor out(Shape{d});
    for (std::size_t j = 0; j < d; ++j) out[j] = num[j] / den;
    return out;
}

TEST(Marginal, SinglePointIsTheConditionalField) {
    const Tensor data = Tensor::matrix(1, 2, {1.0, -2.0});
    const Tensor x = Tensor::vector({0.3, 0.4});
    for (PathKind k : {PathKind::ForwardRF, PathKind::ReverseRF}) {
        const PathSpec spec{k, 0.0, 1e-4, 1.0};
        const Tensor u = marginal_field_oracle(x, 0.4, data, spec);
        const Tensor cond = conditional_field(spec, x, Tensor::vector({1.0, -2.0}), 0.4);
        EXPECT_LT(max_abs_diff(u, cond), 1e-14);
    }
}

TEST(Marginal, SymmetricPairCancelsAlongTheAxis) {
    const Tensor data = Tensor::matrix(2, 2, {1.5, 0.0, -1.5, 0.0});
    const Tensor u = marginal_field_oracle(Tensor::vector({0.0, 0.0}), 0.6, data, PathSpec{PathKind::ForwardRF, 0, 1e-4, 1});
    EXPECT_NEAR(u[0], 0.0, 1e-15);
}

TEST(Marginal, MatchesNaiveSummation) {
    RandomStream rs(5);
    const Tensor data = sample_standard_normal(rs, {8, 2});
    for (PathKind k : {PathKind::ForwardRF, PathKind::ForwardOT, PathKind::ReverseRF}) {
        const PathSpec spec{k, 0.05, 1e-4, 1.0};
        for (int i = 0; i < 20; ++i) {
            const Tensor x = sample_standard_normal(rs, {2});
            const double t = 0.05 + 0.9 * rs.uniform();
            EXPECT_LT(max_abs_diff(marginal_field_oracle(x, t, data, spec), naive_marginal(x, t, data, spec)), 1e-8);
        }
    }
}

TEST(Marginal, WeightsSumToOneEvenWhenDensitiesUnderflow) {
    const Tensor data = Tensor::matrix(3, 1, {100.0, 101.0, 103.0});
    const PathSpec spec{PathKind::ForwardRF, 0.0, 1e-4, 1.0};
    const auto w = marginal_weights(Tensor::vector({-50.0}), 0.99, data, spec);
    double s = 0.0;
    for (double v : w) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_TRUE(marginal_field_oracle(Tensor::vector({-50.0}), 0.99, data, spec).all_finite());
}

TEST(Marginal, SingularTimesRaise) {
    const Tensor data = Tensor::matrix(1, 1, {1.0});
    EXPECT_THROW(marginal_field_oracle(Tensor::vector({0.0}), 0.0, data, PathSpec{}), SingularityError);
    EXPECT_THROW(marginal_field_oracle(Tensor::vector({0.0}), 1.0, data, PathSpec{PathKind::ForwardRF, 0, 1e-4, 1}),
                 SingularityError);
}

TEST(NormTable, ZeroFieldHasFlatRows) {
    const Tensor x = random_tensor({10, 3}, 1);
    const auto row = trajectory_norm_row(kZero, x);
    ASSERT_EQ(row.size(), 11u);
    for (double v : row) EXPECT_EQ(v, row[0]);
    NormTable t;
    t.steps = norm_table_steps();
    t.add_row("flat", row);
    EXPECT_EQ(t.argmin[0], 0u);
}

TEST(NormTable, OriginSampleGivesZeroRow) {
    const VectorField f = [](const Tensor& x, double) { return scale(x, 2.0); };
    for (double v : trajectory_norm_row(f, Tensor(Shape{1, 2}))) EXPECT_EQ(v, 0.0);
}

TEST(NormTable, InteriorMinimumAndCsv) {
    // v = (2t - 1) x pulls inward first, then outward.
    const VectorField f = [](const Tensor& x, double t) { return scale(x, 2.0 * t - 1.0); };
    NormTable table;
    table.steps = norm_table_steps(50, 5);
    table.add_row("normal", trajectory_norm_row(f, random_tensor({20, 2}, 2)));
    EXPECT_GT(table.argmin[0], 0u);
    EXPECT_LT(table.argmin[0], 10u);
    testing::TempDir dir("normtable");
    write_norm_table_csv(dir / "t.csv", table);
    const CsvTable csv = read_csv(dir / "t.csv");
    EXPECT_EQ(csv.header.size(), 13u);
    EXPECT_EQ(csv.header[1], "step_0");
    EXPECT_EQ(csv.rows[0][12], std::to_string(table.steps[table.argmin[0]]));
    EXPECT_THROW(norm_table_steps(50, 7), InvalidArgument);
}

TEST(Radial, SignOfTheField) {
    const Tensor x = random_tensor({30, 2}, 3);
    const VectorField in = [](const Tensor& y, double) { return scale(y, -1.0); };
    const VectorField out = [](const Tensor& y, double) { return y; };
    const RadialStats s = initial_radial_stats(in, x);
    EXPECT_EQ(s.fraction_inward, 1.0);
    double mean_norm = 0.0;
    for (double r : row_norms(x)) mean_norm += r;
    EXPECT_NEAR(s.mean_radial, -mean_norm / 30.0, 1e-12);
    EXPECT_EQ(initial_radial_stats(out, x).fraction_inward, 0.0);
}

TEST(Radial, OriginIsSkipped) {
    const Tensor x = Tensor::matrix(2, 2, {0.0, 0.0, 1.0, 0.0});
    const VectorField in = [](const Tensor& y, double) { return scale(y, -1.0); };
    const RadialStats s = initial_radial_stats(in, x);
    EXPECT_EQ(s.skipped, 1u);
    EXPECT_EQ(s.counted, 1u);
}

TEST(RadiusBound, Cases) {
    const RadiusBound zero = radius_bound_check(Tensor(Shape{2, 4, 3, 3}));
    EXPECT_EQ(zero.max_norm, 0.0);
    EXPECT_EQ(zero.sqrt_d, 2.0);
    EXPECT_FALSE(zero.violation);
    Tensor f(Shape{2, 4, 3, 3});
    f[(1 * 4 + 2) * 9 + 4] = 3.0; // one location with a single entry sqrt(4) + 1
    const RadiusBound one = radius_bound_check(f);
    EXPECT_EQ(one.max_norm, 3.0);
    EXPECT_TRUE(one.violation);
}

} // namespace
} // namespace wtflow
