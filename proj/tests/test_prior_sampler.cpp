// SPDX-License-Identifier: Apache-2.0
//
// rfsense: diffraction body model, generative surrogate and passive RF localization
// Copyright (C) 2026 The rfsense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <rfsense/prior_sampler.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace rfsense;

namespace {

const TargetState nominal_body{2.0, 0.5, 0.3, 1.80, 0.55, 0.25};

LinkGeometry link_f(std::size_t f) {
    LinkGeometry g;
    g.d = 4.0;
    g.h = 0.99;
    g.freq_grid = band_grid(2.4e9, 2.5e9, f);
    return g;
}

} // namespace

TEST(ConditionVector, RoundTrip) {
    const auto c = condition_vector(nominal_body);
    EXPECT_EQ(c, (ConditionVector{2.0, 0.5, 0.3, 1.80, 0.55, 0.25}));
    EXPECT_EQ(target_from_condition(c), nominal_body);
}

TEST(SampleState, StaysInsideBox) {
    Rng rng(3);
    const UncertaintyConfig unc;
    for (int i = 0; i < 5000; ++i) {
        const TargetState s = sample_state({nominal_body}, unc, 4.0, rng);
        EXPECT_GE(s.x, 1.95);
        EXPECT_LE(s.x, 2.05);
        EXPECT_GE(s.y, 0.45);
        EXPECT_LE(s.y, 0.55);
        EXPECT_GE(s.phi, -std::numbers::pi / 2.0);
        EXPECT_LE(s.phi, std::numbers::pi / 2.0);
        EXPECT_EQ(s.h_s, 1.80);
    }
}

TEST(SampleState, MomentsMatchUniform) {
    Rng rng(17);
    const UncertaintyConfig unc;
    const int n = 40000;
    double mx = 0.0, my = 0.0, vx = 0.0, mphi = 0.0, vphi = 0.0;
    for (int i = 0; i < n; ++i) {
        const TargetState s = sample_state({nominal_body}, unc, 4.0, rng);
        mx += s.x;
        my += s.y;
        vx += (s.x - 2.0) * (s.x - 2.0);
        mphi += s.phi;
        vphi += s.phi * s.phi;
    }
    mx /= n;
    my /= n;
    vx /= n;
    mphi /= n;
    vphi /= n;
    // Uniform on a width-w interval: variance w^2 / 12; the mean's standard error is sqrt(var / n).
    EXPECT_NEAR(mx, 2.0, 5.0 * std::sqrt(0.01 / 12.0 / n));
    EXPECT_NEAR(my, 0.5, 5.0 * std::sqrt(0.01 / 12.0 / n));
    EXPECT_NEAR(vx, 0.01 / 12.0, 0.05 * 0.01 / 12.0);
    const double var_phi = std::numbers::pi * std::numbers::pi / 12.0;
    EXPECT_NEAR(mphi, 0.0, 5.0 * std::sqrt(var_phi / n));
    EXPECT_NEAR(vphi, var_phi, 0.05 * var_phi);
}

TEST(SampleState, OrientationChiSquare) {
    Rng rng(99);
    const UncertaintyConfig unc;
    constexpr int bins = 10, n = 20000;
    std::array<int, bins> counts{};
    for (int i = 0; i < n; ++i) {
        const double phi = sample_state({nominal_body}, unc, 4.0, rng).phi;
        const int b = std::min(bins - 1, static_cast<int>((phi + std::numbers::pi / 2.0) / std::numbers::pi * bins));
        ++counts[b];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 9 degrees of freedom, upper 0.1% point.
    EXPECT_LT(chi2, 27.877);
}

TEST(SampleState, NoUncertaintyIsNominal) {
    Rng rng(1);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_state({nominal_body}, UncertaintyConfig::none(), 4.0, rng), nominal_body);
}

TEST(SampleState, SizeJitterKeepsWidthOrder) {
    Rng rng(8);
    UncertaintyConfig unc;
    unc.size_jitter = 0.5;
    TargetState near_square = nominal_body;
    near_square.w_s2 = 0.54;
    for (int i = 0; i < 2000; ++i) {
        const TargetState s = sample_state({near_square}, unc, 4.0, rng);
        EXPECT_GE(s.w_s1, s.w_s2);
        EXPECT_GE(s.h_s, 0.9);
        EXPECT_LE(s.h_s, 2.7);
    }
}

TEST(SampleState, RedrawsNearAntenna) {
    Rng rng(4);
    UncertaintyConfig unc;
    unc.dx = 0.4;
    TargetState edge = nominal_body;
    edge.x = 0.1;
    for (int i = 0; i < 1000; ++i) EXPECT_GT(sample_state({edge}, unc, 4.0, rng).x, 0.0);
    edge.x = -1.0;
    EXPECT_THROW(sample_state({edge}, unc, 4.0, rng), DomainError);
}

TEST(UncertaintyConfig, Validation) {
    UncertaintyConfig u;
    EXPECT_NO_THROW(u.validate());
    u.dx = -0.1;
    EXPECT_THROW(u.validate(), DomainError);
    u = {};
    u.phi_range = Interval{-2.0, 0.0};
    EXPECT_THROW(u.validate(), DomainError);
    u.phi_range = Interval{1.0, 0.0};
    EXPECT_THROW(u.validate(), DomainError);
    u = {};
    u.size_jitter = 1.0;
    EXPECT_THROW(u.validate(), DomainError);
}

TEST(SamplePrior, CountAndConditionalMean) {
    const LinkGeometry g = link_f(2);
    Rng rng(12);
    EXPECT_THROW(sample_prior({nominal_body}, {}, g, {}, 0, rng), DomainError);
    TargetState on_los = nominal_body;
    on_los.y = 0.0;
    const auto samples = sample_prior({on_los}, UncertaintyConfig::none(), g, {}, 3, rng);
    ASSERT_EQ(samples.size(), 3u);
    const auto direct = attenuation_profile(g, on_los, {});
    for (const auto& s : samples) EXPECT_EQ(s.values, direct.values);
}

TEST(TrainingSet, LayoutAndDeterminism) {
    const LinkGeometry g = link_f(3);
    std::vector<NominalCondition> grid;
    for (double x : {1.0, 2.0, 3.0}) grid.push_back({{x, 0.0, 0.0, 1.80, 0.55, 0.25}});
    const auto ranges = ConditionRanges::for_link(4.0);
    const auto a = build_training_set(grid, {}, g, {}, 4, 77, ranges, 1);
    const auto b = build_training_set(grid, {}, g, {}, 4, 77, ranges, 3);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.records.size(), 12u);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].condition, condition_vector(grid[i / 4].theta_k));
        EXPECT_EQ(a.records[i].profile.size(), 3u);
    }
    const auto c = build_training_set(grid, {}, g, {}, 4, 78, ranges, 1);
    EXPECT_NE(a.records, c.records);
    EXPECT_EQ(a.normalization.cond_center, c.normalization.cond_center);
    EXPECT_THROW(build_training_set({}, {}, g, {}, 4, 1, ranges, 1), DomainError);
    EXPECT_THROW(build_training_set(grid, {}, g, {}, 0, 1, ranges, 1), DomainError);
}

TEST(Normalization, ProfileStatistics) {
    std::vector<TrainingRecord> recs{
        {condition_vector(nominal_body), {1.0, 10.0}},
        {condition_vector(nominal_body), {3.0, 10.0}},
        {condition_vector(nominal_body), {5.0, 10.0}},
    };
    const auto n = compute_normalization(recs, ConditionRanges::for_link(4.0));
    EXPECT_DOUBLE_EQ(n.profile_mean[0], 3.0);
    EXPECT_DOUBLE_EQ(n.profile_scale[0], std::sqrt(8.0 / 3.0));
    EXPECT_DOUBLE_EQ(n.profile_mean[1], 10.0);
    EXPECT_DOUBLE_EQ(n.profile_scale[1], 1.0);
    const std::vector<double> u = n.normalize_profile({5.0, 11.0});
    EXPECT_DOUBLE_EQ(u[0], 2.0 / std::sqrt(8.0 / 3.0));
    EXPECT_DOUBLE_EQ(u[1], 1.0);
    const auto back = n.denormalize_profile(u);
    EXPECT_NEAR(back[0], 5.0, 1e-12);
    EXPECT_NEAR(back[1], 11.0, 1e-12);
    EXPECT_THROW(n.normalize_profile({1.0}), ShapeError);
}

TEST(Normalization, ConditionRangeMapsToUnitBox) {
    std::vector<TrainingRecord> recs{{condition_vector(nominal_body), {1.0}}};
    const auto n = compute_normalization(recs, ConditionRanges::for_link(4.0));
    const auto lo = n.normalize_condition({0.0, -3.0, -std::numbers::pi / 2.0, 1.5, 0.2, 0.2});
    const auto hi = n.normalize_condition({4.0, 3.0, std::numbers::pi / 2.0, 2.0, 0.7, 0.7});
    for (std::size_t i = 0; i < condition_dim; ++i) {
        EXPECT_NEAR(lo[i], -1.0, 1e-12);
        EXPECT_NEAR(hi[i], 1.0, 1e-12);
    }
}

TEST(Normalization, SingleRecordIsRecoverable) {
    std::vector<TrainingRecord> recs{{condition_vector(nominal_body), {4.0, -2.0}}};
    const auto n = compute_normalization(recs, ConditionRanges::for_link(4.0));
    EXPECT_EQ(n.denormalize_profile(n.normalize_profile({4.0, -2.0})), (std::vector<double>{4.0, -2.0}));
    EXPECT_THROW(compute_normalization({}, ConditionRanges::for_link(4.0)), DomainError);
    ConditionRanges bad;
    bad.bounds[3] = {2.0, 2.0};
    EXPECT_THROW(compute_normalization(recs, bad), DomainError);
}

TEST(Normalization, TrainingConditionsWithinSlack) {
    const LinkGeometry g = link_f(1);
    std::vector<NominalCondition> grid;
    for (double x : {0.25, 3.75})
        for (double y : {0.0, 1.0}) grid.push_back({{x, y, 0.0, 1.80, 0.55, 0.25}});
    const auto set = build_training_set(grid, {}, g, {}, 2, 5, ConditionRanges::for_link(4.0), 1);
    for (const auto& r : set.records)
        for (double v : set.normalization.normalize_condition(r.condition)) EXPECT_LE(std::abs(v), 1.5);
}
