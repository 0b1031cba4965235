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

#include <rfsense/localization.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace rfsense;

namespace {

const TargetState body{0.0, 0.0, 0.0, 1.80, 0.55, 0.25};

LinkGeometry link_f(std::size_t f) {
    LinkGeometry g;
    g.d = 4.0;
    g.h = 0.99;
    g.freq_grid = band_grid(2.4e9, 2.5e9, f);
    return g;
}

// Profile depends on the condition; one fresh normal draw per sample.
struct NoisyGenerator {
    std::vector<AttenuationProfile> generate(const TargetState& t, std::size_t n, Rng& rng) const {
        std::vector<AttenuationProfile> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back({{3.0 * t.x + standard_normal(rng), 2.0 * t.y}, t});
        return out;
    }
};

struct LinearGenerator {
    std::vector<AttenuationProfile> generate(const TargetState& t, std::size_t n, Rng&) const {
        return std::vector<AttenuationProfile>(n, AttenuationProfile{{3.0 * t.x, 2.0 * t.y}, t});
    }
};

struct ConstantGenerator {
    std::vector<AttenuationProfile> generate(const TargetState& t, std::size_t n, Rng&) const {
        return std::vector<AttenuationProfile>(n, AttenuationProfile{{1.0, 1.0}, t});
    }
};

std::vector<TargetState> states(const CandidateGrid& g) {
    std::vector<TargetState> s;
    for (const auto& c : g.conditions) s.push_back(c.theta_k);
    return s;
}

} // namespace

TEST(Grid, RowMajorLayout) {
    const auto g = make_grid(GridSpec{}, body);
    ASSERT_EQ(g.size(), 75u);
    EXPECT_DOUBLE_EQ(g.state(0).x, 0.25);
    EXPECT_DOUBLE_EQ(g.state(14).x, 3.75);
    EXPECT_DOUBLE_EQ(g.state(15).x, 0.25);
    EXPECT_DOUBLE_EQ(g.state(15).y, 0.25);
    EXPECT_DOUBLE_EQ(g.state(74).y, 1.0);
    EXPECT_EQ(g.state(40).h_s, 1.80);
    EXPECT_NO_THROW(g.validate(link_f(1)));
    GridSpec bad;
    bad.x_start = 0.0;
    EXPECT_THROW(make_grid(bad, body).validate(link_f(1)), DomainError);
}

TEST(MapEffects, BestOfSamples) {
    const std::vector<double> p0{-40.0, -40.0};
    const NoiseModel noise;
    const TargetState t{1.0, 0.5, 0.0, 1.8, 0.55, 0.25};
    const std::vector<double> obs{-40.0 - 3.0 + 2.0, -40.0 - 1.0 + 2.0};
    Rng a(4), b(4);
    const MapEffects e = map_effects(obs, t, NoisyGenerator{}, noise, p0, 64, a);
    double best = -1e300;
    for (const auto& p : NoisyGenerator{}.generate(t, 64, b)) best = std::max(best, likelihood(obs, p.values, noise, p0));
    EXPECT_EQ(e.score, best);
    EXPECT_EQ(e.score, likelihood(obs, e.profile, noise, p0));
    EXPECT_THROW(map_effects(obs, t, NoisyGenerator{}, noise, p0, 0, a), DomainError);
}

TEST(MapEffects, NonDecreasingInSampleCount) {
    const std::vector<double> p0{-40.0, -40.0};
    const std::vector<double> obs{-43.0, -41.5};
    const TargetState t{1.2, 0.25, 0.0, 1.8, 0.55, 0.25};
    double prev = -1e300;
    for (std::size_t m : {1u, 2u, 8u, 32u, 128u}) {
        Rng rng(77);
        const double s = map_effects(obs, t, NoisyGenerator{}, NoiseModel{}, p0, m, rng).score;
        EXPECT_GE(s, prev) << m;
        prev = s;
    }
}

TEST(EstimatePosition, TiesGoToLowestIndex) {
    const auto g = make_grid(GridSpec{}, body);
    const std::vector<double> p0{-40.0, -40.0};
    Rng rng(1);
    const auto r = estimate_position(std::vector<double>{-39.0, -39.0}, g, ConstantGenerator{}, NoiseModel{}, p0, 4, rng);
    EXPECT_EQ(r.best_index, 0u);
    EXPECT_EQ(r.scores.size(), 75u);
    EXPECT_DOUBLE_EQ(r.x, 0.25);
    EXPECT_DOUBLE_EQ(r.y, 0.0);
}

TEST(EstimatePosition, ArgmaxInvariantToScoreScale) {
    const auto g = make_grid(GridSpec{}, body);
    const std::vector<double> p0{-40.0, -40.0};
    const std::vector<double> obs{-40.0 - 6.2 + 2.0, -40.0 - 1.1 + 2.0};
    Rng a(8), b(8);
    const auto r1 = estimate_position(obs, g, NoisyGenerator{}, NoiseModel{1.0, 2.0, 2.0}, p0, 16, a);
    const auto r2 = estimate_position(obs, g, NoisyGenerator{}, NoiseModel{1.0, 2.0, 5.0}, p0, 16, b);
    EXPECT_EQ(r1.best_index, r2.best_index);
    // Deterministic profiles: nearest cell to x = 6.2 / 3, y = 1.1 / 2.
    const auto r3 = estimate_position(obs, g, LinearGenerator{}, NoiseModel{}, p0, 1, a);
    EXPECT_DOUBLE_EQ(r3.x, 2.0);
    EXPECT_DOUBLE_EQ(r3.y, 0.5);
}

TEST(EstimatePosition, NoiselessOracleRecoversCell) {
    const LinkGeometry geom = link_f(4);
    GridSpec spec;
    // One side of the midpoint only; mirrored cells have equal profiles.
    spec.nx = 5;
    spec.x_step = 0.4;
    spec.ny = 2;
    spec.y_step = 0.5;
    const auto g = make_grid(spec, body);
    const OracleGenerator oracle(geom, {}, states(g));
    const auto p0 = free_space_profile(geom, {});
    const NoiseModel exact{0.0, 2.0, 0.0};
    for (std::size_t k = 0; k < g.size(); ++k) {
        Rng rng(k);
        const auto a = attenuation_profile(geom, g.state(k), {});
        const auto obs = synth_rss_from_profile(p0, &a.values, exact, rng);
        const auto r = estimate_position(obs.values, g, oracle, NoiseModel{1.0, 2.0, 2.0}, p0, 1, rng);
        EXPECT_EQ(r.best_index, k);
    }
}

TEST(Detection, OracleStubIsPerfect) {
    const LinkGeometry geom = link_f(2);
    const auto g = make_grid(GridSpec{}, body);
    const OracleGenerator oracle(geom, {}, states(g));
    DetectionConfig cfg;
    cfg.trials = 25;
    cfg.m_samples = 1;
    cfg.d_t = {0.5, 1.0};
    cfg.truth_uncertainty = UncertaintyConfig::none();
    cfg.synth_noise = NoiseModel{0.0, 2.0, 0.0};
    cfg.score_noise = NoiseModel{1.0, 2.0, 2.0};
    cfg.threads = 1;
    const auto r = detection_experiment(g, oracle, geom, {}, cfg, 5);
    EXPECT_EQ(r.l0.hits, 25u);
    EXPECT_EQ(r.p_l0(), 1.0);
    ASSERT_EQ(r.l1.size(), 2u);
    EXPECT_EQ(r.l1[0].d_t, 0.5);
    EXPECT_EQ(r.l1[0].probability(), 1.0);
    EXPECT_EQ(r.l1[1].probability(), 1.0);
}

TEST(Detection, ThreadCountDoesNotChangeResults) {
    const LinkGeometry geom = link_f(2);
    const auto g = make_grid(GridSpec{}, body);
    const OracleGenerator oracle(geom, {}, states(g));
    DetectionConfig cfg;
    cfg.trials = 12;
    cfg.m_samples = 1;
    cfg.threads = 1;
    const auto a = detection_experiment(g, oracle, geom, {}, cfg, 9);
    cfg.threads = 3;
    const auto b = detection_experiment(g, oracle, geom, {}, cfg, 9);
    EXPECT_EQ(a.l0.hits, b.l0.hits);
    EXPECT_EQ(a.l1[0].hits, b.l1[0].hits);
}

TEST(Detection, RejectsEmptyClasses) {
    const LinkGeometry geom = link_f(1);
    const auto g = make_grid(GridSpec{}, body);
    const ConstantGenerator gen;
    DetectionConfig cfg;
    cfg.d_t = {0.1};
    EXPECT_THROW(detection_experiment(g, gen, geom, {}, cfg, 1), DomainError);
    cfg.d_t = {1.0};
    cfg.trials = 0;
    EXPECT_THROW(detection_experiment(g, gen, geom, {}, cfg, 1), DomainError);
    cfg.trials = 1;
    cfg.d_t.clear();
    EXPECT_THROW(detection_experiment(g, gen, geom, {}, cfg, 1), DomainError);
}
