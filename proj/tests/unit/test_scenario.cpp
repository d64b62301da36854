// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wtflow/error.hpp"
#include "wtflow/scenario.hpp"

namespace wtflow {
namespace {

struct Moments {
    double mx = 0, my = 0, sx = 0, sy = 0;
};

Moments moments(const Tensor& m, std::size_t begin, std::size_t end) {
    Moments r;
    const double n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        r.mx += m.at(i, 0) / n;
        r.my += m.at(i, 1) / n;
    }
    for (std::size_t i = begin; i < end; ++i) {
        r.sx += std::pow(m.at(i, 0) - r.mx, 2) / n;
        r.sy += std::pow(m.at(i, 1) - r.my, 2) / n;
    }
    r.sx = std::sqrt(r.sx);
    r.sy = std::sqrt(r.sy);
    return r;
}

TEST(Scenario, DiscGridStaysStrictlyInsideTheRadius) {
    const Tensor g = disc_grid();
    EXPECT_EQ(g.cols(), 2u);
    EXPECT_GT(g.rows(), 50u);
    for (double r : row_norms(g)) EXPECT_LT(r, std::sqrt(2.0));
    // Integer lattice count: (i - 5)^2 + (j - 5)^2 < 25 over an 11 x 11 grid.
    std::size_t inside = 0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) inside += (i - 5) * (i - 5) + (j - 5) * (j - 5) < 25;
    EXPECT_EQ(g.rows(), inside);
    const auto norms = row_norms(g);
    EXPECT_LT(*std::min_element(norms.begin(), norms.end()), 1e-12);
    const Dataset ds = gen_scenario("disc_grid", 1, 1, 0);
    EXPECT_TRUE(bit_equal(ds.test, g));
}

TEST(Scenario, OriginBlobSpread) {
    const Dataset ds = gen_scenario("origin_blob", 10000, 10000, 7);
    const Moments m = moments(ds.test, 0, 10000);
    EXPECT_NEAR(m.sx, 0.1, 0.01);
    EXPECT_NEAR(m.sy, 0.1, 0.01);
    const Moments t = moments(ds.train, 0, 10000);
    EXPECT_NEAR(t.sx, 1.0, 0.05);
}

TEST(Scenario, IntersectingStatisticsWithinThreeSigma) {
    const std::size_t n = 20000;
    const Dataset ds = gen_scenario("intersecting", n, n, 3);
    const std::size_t half = n / 2;
    const Moments norm = moments(ds.test, 0, half);
    const Moments anom = moments(ds.test, half, n);
    const double se_norm = 1.0 / std::sqrt(half), se_anom = std::sqrt(0.3 / half);
    EXPECT_NEAR(norm.mx, 0.0, 3 * se_norm);
    EXPECT_NEAR(norm.my, 0.0, 3 * se_norm);
    EXPECT_NEAR(anom.mx, -1.0, 3 * se_anom);
    EXPECT_NEAR(anom.my, -1.0, 3 * se_anom);
    EXPECT_NEAR(anom.sx * anom.sx, 0.3, 0.02);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(ds.test_labels[i], i < half ? 0 : 1);
}

TEST(Scenario, DisjointAnomaliesSitOnTheRing) {
    const Dataset ds = gen_scenario("disjoint", 1000, 101, 4);
    EXPECT_EQ(ds.test.rows(), 101u);
    std::size_t anomalies = 0;
    const auto r = row_norms(ds.test);
    for (std::size_t i = 0; i < 101; ++i) {
        if (ds.test_labels[i] == 1) {
            ++anomalies;
            EXPECT_NEAR(r[i], 4.0, 1e-12);
        }
    }
    EXPECT_EQ(anomalies, 50u);
    EXPECT_NEAR(moments(ds.train, 0, 1000).sx, 0.5, 0.05);
}

TEST(Scenario, SeedsAreDeterministicAndDistinct) {
    for (const std::string& name : scenario_names()) {
        const Dataset a = gen_scenario(name, 12, 10, 9);
        const Dataset b = gen_scenario(name, 12, 10, 9);
        EXPECT_TRUE(bit_equal(a.train, b.train)) << name;
        EXPECT_TRUE(bit_equal(a.test, b.test)) << name;
        EXPECT_EQ(a.test_labels, b.test_labels);
        EXPECT_EQ(a.test_labels.size(), a.test.shape()[0]);
        if (name != "disc_grid") EXPECT_FALSE(bit_equal(a.train, gen_scenario(name, 12, 10, 10).train)) << name;
    }
}

TEST(Scenario, RejectsUnknownNamesAndEmptySets) {
    EXPECT_THROW(gen_scenario("moons", 10, 10, 0), InvalidArgument);
    EXPECT_THROW(gen_scenario("disjoint", 0, 10, 0), InvalidArgument);
    EXPECT_THROW(gen_scenario("disjoint", 10, 1, 0), InvalidArgument);
}

TEST(Scenario, SyntheticFeaturesLayout) {
    FeatureSpec spec;
    const Dataset ds = synthetic_features(spec, 4, 6, 1);
    EXPECT_EQ(ds.train.shape(), (Shape{4, spec.channels, spec.height, spec.width}));
    EXPECT_EQ(ds.test_labels, (std::vector<int>{0, 1, 0, 1, 0, 1}));
    for (double v : ds.test.data()) EXPECT_GE(v, 0.0);
    spec.patch = 9;
    EXPECT_THROW(synthetic_features(spec, 4, 6, 1), InvalidArgument);
}

} // namespace
} // namespace wtflow
