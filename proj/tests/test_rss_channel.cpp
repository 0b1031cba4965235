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

#include <rfsense/rss_channel.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace rfsense;

namespace {

LinkGeometry link2() {
    LinkGeometry g;
    g.d = 4.0;
    g.h = 0.99;
    g.freq_grid = {2.4e9, 2.5e9};
    return g;
}

struct FixedGenerator {
    std::vector<double> profile;
    std::vector<AttenuationProfile> generate(const TargetState& t, std::size_t n, Rng&) const {
        return std::vector<AttenuationProfile>(n, AttenuationProfile{profile, t});
    }
};

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

} // namespace

TEST(FreeSpace, Friis) {
    const LinkGeometry g = link2();
    const double lambda = speed_of_light / 2.4e9;
    const double expected = 3.0 + 20.0 * std::log10(lambda / (16.0 * std::numbers::pi));
    EXPECT_NEAR(free_space_power(g, 2.4e9, 1.0, 1.0, 1.0), expected, 1e-12);
    LinkGeometry far = g;
    far.d = 8.0;
    EXPECT_NEAR(free_space_power(g, 2.4e9, 0, 0, 0) - free_space_power(far, 2.4e9, 0, 0, 0), 20.0 * std::log10(2.0), 1e-12);
    LinkGeometry dir = g;
    dir.tx_pattern = dir.rx_pattern = AntennaPattern::directional(4.0, 8.0);
    const auto p0 = free_space_profile(dir, {5.0});
    ASSERT_EQ(p0.size(), 2u);
    EXPECT_NEAR(p0[0], free_space_power(g, 2.4e9, 5.0, 8.0, 8.0), 1e-12);
    EXPECT_LT(p0[1], p0[0]);
}

TEST(SynthRss, FreeSpaceSpread) {
    const LinkGeometry g = link2();
    const NoiseModel noise{1.5, 2.0, 2.5};
    Rng rng(1);
    std::vector<double> s;
    for (int i = 0; i < 20000; ++i) {
        const auto obs = synth_rss(g, std::nullopt, noise, {}, {}, rng);
        EXPECT_FALSE(obs.truth.has_value());
        s.push_back(obs.values[0]);
    }
    const auto [m, sd] = mean_sd(s);
    EXPECT_NEAR(sd, 1.5, 0.03 * 1.5);
    EXPECT_NEAR(m, free_space_power(g, 2.4e9, 0.0, 0.0, 0.0), 5.0 * 1.5 / std::sqrt(20000.0));
}

TEST(SynthRss, TargetMeanIdentity) {
    const std::vector<double> p0{-40.0, -41.0, -42.0};
    const std::vector<double> a{6.0, 0.5, -1.0};
    const NoiseModel noise{1.0, 2.0, 2.0};
    Rng rng(2);
    std::vector<std::vector<double>> cols(3);
    for (int i = 0; i < 20000; ++i) {
        const auto obs = synth_rss_from_profile(p0, &a, noise, rng);
        for (std::size_t f = 0; f < 3; ++f) cols[f].push_back(obs.values[f]);
    }
    for (std::size_t f = 0; f < 3; ++f) {
        const auto [m, sd] = mean_sd(cols[f]);
        EXPECT_NEAR(m, p0[f] - a[f] + 2.0, 5.0 * 2.0 / std::sqrt(20000.0));
        EXPECT_NEAR(sd, 2.0, 0.03 * 2.0);
    }
}

TEST(SynthRss, NoiselessIsExact) {
    const std::vector<double> p0{-40.0, -41.0};
    const std::vector<double> a{3.0, 4.0};
    Rng rng(3);
    const auto obs = synth_rss_from_profile(p0, &a, NoiseModel{0.0, 2.0, 0.0}, rng);
    EXPECT_EQ(obs.values, (std::vector<double>{-41.0, -43.0}));
    const std::vector<double> bad{1.0};
    EXPECT_THROW(synth_rss_from_profile(p0, &bad, {}, rng), ShapeError);
}

TEST(SynthRss, WithTargetCarriesTruth) {
    const LinkGeometry g = link2();
    Rng rng(4);
    const TargetState t{2.0, 0.0, 0.0, 1.8, 0.55, 0.25};
    const auto obs = synth_rss(g, t, {}, {}, {}, rng);
    ASSERT_TRUE(obs.truth.has_value());
    EXPECT_EQ(*obs.truth, t);
}

TEST(Likelihood, GaussianLogDensity) {
    const std::vector<double> p0{-40.0, -45.0}, a{5.0, 1.0}, s{-44.0, -43.5};
    const NoiseModel noise{1.0, 2.0, 1.7};
    double expected = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double mean = p0[i] - a[i] + 2.0;
        expected += std::log(std::exp(-0.5 * std::pow((s[i] - mean) / 1.7, 2)) / (1.7 * std::sqrt(2.0 * std::numbers::pi)));
    }
    EXPECT_NEAR(likelihood(s, a, noise, p0), expected, 1e-12);
    EXPECT_THROW(likelihood(s, std::vector<double>{1.0}, noise, p0), ShapeError);
    EXPECT_THROW(likelihood(s, a, NoiseModel{0.0, 0.0, 0.0}, p0), DomainError);
}

TEST(Likelihood, PeaksAtTrueAttenuation) {
    const std::vector<double> p0{-40.0}, s{-44.0};
    const NoiseModel noise;
    const double at_truth = likelihood(s, std::vector<double>{6.0}, noise, p0);
    for (double a : {4.0, 5.5, 6.5, 9.0}) EXPECT_LT(likelihood(s, std::vector<double>{a}, noise, p0), at_truth);
}

TEST(NoiseModel, Validation) {
    EXPECT_NO_THROW(NoiseModel{}.validate());
    EXPECT_NO_THROW((NoiseModel{0.0, 0.0, 0.0}.validate()));
    EXPECT_THROW((NoiseModel{-1.0, 2.0, 2.0}.validate()), DomainError);
    EXPECT_THROW((NoiseModel{2.0, 2.0, 1.0}.validate()), DomainError);
    EXPECT_THROW((NoiseModel{1.0, std::nan(""), 2.0}.validate()), DomainError);
}

TEST(MassFunction, BinsAndMass) {
    const std::vector<double> s{-0.1, 0.0, 0.2, 0.49, 0.5, 1.74};
    const auto bins = mass_function(s, 0.5);
    ASSERT_EQ(bins.size(), 5u);
    EXPECT_DOUBLE_EQ(bins[0].low, -0.5);
    EXPECT_DOUBLE_EQ(bins[0].mass, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(bins[1].mass, 3.0 / 6.0);
    EXPECT_DOUBLE_EQ(bins[2].mass, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(bins[3].mass, 0.0);
    EXPECT_DOUBLE_EQ(bins[4].high, 2.0);
    double total = 0.0;
    for (const auto& b : bins) total += b.mass;
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_TRUE(mass_function(std::vector<double>{}).empty());
}

TEST(MarginalRss, FixedGeneratorReducesToChannel) {
    const std::vector<double> p0{-40.0, -42.0};
    const FixedGenerator gen{{7.0, 3.0}};
    Rng rng(5);
    const auto m = marginal_rss(gen, {}, NoiseModel{1.0, 2.0, 2.0}, p0, 5000, 1, rng);
    ASSERT_EQ(m.samples.size(), 5000u);
    std::vector<double> col;
    for (const auto& s : m.samples) col.push_back(s[1]);
    const auto [mean, sd] = mean_sd(col);
    EXPECT_NEAR(mean, -42.0 - 3.0 + 2.0, 5.0 * 2.0 / std::sqrt(5000.0));
    EXPECT_NEAR(sd, 2.0, 0.05 * 2.0);
    double total = 0.0;
    for (const auto& b : m.histogram) {
        total += b.mass;
        EXPECT_DOUBLE_EQ(b.high - b.low, 0.5);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_THROW(marginal_rss(gen, {}, {}, p0, 10, 2, rng), ShapeError);
}

TEST(MarginalRss, Seeded) {
    const std::vector<double> p0{-40.0};
    const FixedGenerator gen{{2.0}};
    Rng a(9), b(9);
    EXPECT_EQ(marginal_rss(gen, {}, {}, p0, 50, 0, a).samples, marginal_rss(gen, {}, {}, p0, 50, 0, b).samples);
}
