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

#ifndef RFSENSE_LOCALIZATION_HPP
#define RFSENSE_LOCALIZATION_HPP

#include "diffraction.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "prior_sampler.hpp"
#include "rng.hpp"
#include "rss_channel.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rfsense {

struct GridSpec {
    double x_start = 0.25;
    double x_step = 0.25;
    std::size_t nx = 15;
    double y_start = 0.0;
    double y_step = 0.25;
    std::size_t ny = 5;
};

struct CandidateGrid {
    std::vector<NominalCondition> conditions; ///< index k = row * nx + column
    double spacing_x = 0.0;
    double spacing_y = 0.0;

    std::size_t size() const { return conditions.size(); }
    const TargetState& state(std::size_t k) const { return conditions.at(k).theta_k; }

    void validate(const LinkGeometry& geom) const {
        if (conditions.size() < 2) throw DomainError("candidate grid needs at least two positions");
        for (const auto& c : conditions)
            if (!(c.theta_k.x > 0.0 && c.theta_k.x < geom.d)) throw DomainError("grid position outside the link slab");
    }
};

/// Rows of constant y, x varying fastest; every cell carries the given body.
inline CandidateGrid make_grid(const GridSpec& spec, const TargetState& body) {
    CandidateGrid g;
    g.spacing_x = spec.x_step;
    g.spacing_y = spec.y_step;
    for (std::size_t j = 0; j < spec.ny; ++j)
        for (std::size_t i = 0; i < spec.nx; ++i) {
            TargetState t = body;
            t.x = spec.x_start + spec.x_step * static_cast<double>(i);
            t.y = spec.y_start + spec.y_step * static_cast<double>(j);
            g.conditions.push_back({t});
        }
    return g;
}

struct MapEffects {
    double score = -std::numeric_limits<double>::infinity();
    std::vector<double> profile;
};

/// Sample-max approximation of the most likely body effects under one
/// condition: the best log-likelihood among m generator draws.
template <ProfileGenerator G>
MapEffects map_effects(std::span<const double> observed, const TargetState& condition, const G& gen,
                       const NoiseModel& noise, std::span<const double> p0, std::size_t m_samples, Rng& rng) {
    if (m_samples == 0) throw DomainError("map_effects needs m_samples >= 1");
    MapEffects best;
    for (auto& a : gen.generate(condition, m_samples, rng)) {
        const double s = likelihood(observed, a.values, noise, p0);
        if (s > best.score || best.profile.empty()) {
            best.score = s;
            best.profile = std::move(a.values);
        }
    }
    return best;
}

struct MapResult {
    std::vector<double> scores;
    std::vector<std::vector<double>> best_profiles;
    std::size_t best_index = 0;
    double x = 0.0;
    double y = 0.0;
};

/// MAP position over the grid. One seed is drawn from `rng` and every
/// candidate is scored on a generator stream started from it (common random
/// numbers); ties go to the lowest index.
template <ProfileGenerator G>
MapResult estimate_position(std::span<const double> observed, const CandidateGrid& grid, const G& gen,
                            const NoiseModel& noise, std::span<const double> p0, std::size_t m_samples, Rng& rng) {
    if (grid.size() == 0) throw DomainError("candidate grid is empty");
    const std::uint64_t seed = rng();
    MapResult r;
    r.scores.reserve(grid.size());
    r.best_profiles.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Rng candidate_rng(seed);
        MapEffects e = map_effects(observed, grid.state(k), gen, noise, p0, m_samples, candidate_rng);
        if (k == 0 || e.score > r.scores[r.best_index]) r.best_index = k;
        r.scores.push_back(e.score);
        r.best_profiles.push_back(std::move(e.profile));
    }
    r.x = grid.state(r.best_index).x;
    r.y = grid.state(r.best_index).y;
    return r;
}

struct DetectionConfig {
    std::vector<double> d_t{1.0};
    std::size_t trials = 200; ///< per class
    std::size_t m_samples = 256;
    UncertaintyConfig truth_uncertainty;
    NoiseModel synth_noise;
    NoiseModel score_noise;
    LinkBudget budget;
    double fresnel_freq_hz = 2.45e9;
    std::size_t latent_dim = 16; ///< reported only
    double beta = 0.05;          ///< reported only
    std::size_t threads = default_thread_count();
};

struct ClassTally {
    double d_t = 0.0; ///< 0 for the L0 class
    std::size_t hits = 0;
    std::size_t trials = 0;
    double probability() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
};

struct DetectionReport {
    ClassTally l0;
    std::vector<ClassTally> l1; ///< one per d_T, in config order
    std::size_t latent_dim = 0;
    double beta = 0.0;

    double p_l0() const { return l0.probability(); }
};

namespace detail {

inline std::vector<std::size_t> cells_where(const CandidateGrid& grid, const LinkGeometry& geom, double freq,
                                            double d_t, RegionLabel::Kind kind) {
    std::vector<std::size_t> cells;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (classify_region(geom, freq, grid.state(k).x, grid.state(k).y, d_t).kind == kind) cells.push_back(k);
    return cells;
}

} // namespace detail

/// Region detection experiment: per class, draw a true grid cell uniformly,
/// perturb it with the truth uncertainty, synthesize S_t from the diffraction
/// model, localize with the generator and check the region of the estimate.
/// Trial t of class c uses substream derive_seed(derive_seed(seed, c), t);
/// class 0 is L0, class i >= 1 is L1(d_t[i-1]).
template <ProfileGenerator G>
DetectionReport detection_experiment(const CandidateGrid& grid, const G& gen, const LinkGeometry& geom,
                                     const QuadratureConfig& quad, const DetectionConfig& cfg, std::uint64_t seed) {
    grid.validate(geom);
    if (cfg.trials == 0) throw DomainError("detection experiment needs trials > 0");
    if (cfg.d_t.empty()) throw DomainError("detection experiment needs at least one d_T");
    const std::vector<double> p0 = free_space_profile(geom, cfg.budget);

    // L0 membership does not depend on d_T.
    const double any_dt = cfg.d_t.front();
    const auto l0_cells = detail::cells_where(grid, geom, cfg.fresnel_freq_hz, any_dt, RegionLabel::Kind::outside_fresnel);
    std::vector<std::vector<std::size_t>> class_cells{l0_cells};
    std::string empty;
    if (l0_cells.empty()) empty += " L0";
    for (double d_t : cfg.d_t) {
        class_cells.push_back(detail::cells_where(grid, geom, cfg.fresnel_freq_hz, d_t, RegionLabel::Kind::near_antenna));
        if (class_cells.back().empty()) empty += " L1(d_T=" + std::to_string(d_t) + ")";
    }
    if (!empty.empty()) throw DomainError("empty region classes:" + empty);

    DetectionReport report;
    report.latent_dim = cfg.latent_dim;
    report.beta = cfg.beta;
    for (std::size_t c = 0; c < class_cells.size(); ++c) {
        const auto& cells = class_cells[c];
        const double d_t = c == 0 ? any_dt : cfg.d_t[c - 1];
        std::vector<char> hit(cfg.trials, 0);
        const std::uint64_t class_seed = derive_seed(seed, c);
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
            Rng rng = make_rng(class_seed, t);
            const std::size_t cell = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
            const TargetState truth = sample_state(grid.conditions[cell], cfg.truth_uncertainty, geom.d, rng);
            const AttenuationProfile a = attenuation_profile(geom, truth, quad);
            const RssObservation obs = synth_rss_from_profile(p0, &a.values, cfg.synth_noise, rng);
            const MapResult est = estimate_position(obs.values, grid, gen, cfg.score_noise, p0, cfg.m_samples, rng);
            const RegionLabel label = classify_region(geom, cfg.fresnel_freq_hz, est.x, est.y, d_t);
            hit[t] = c == 0 ? label.is_l0() : label.is_l1();
        });
        ClassTally tally{c == 0 ? 0.0 : d_t, 0, cfg.trials};
        for (char h : hit) tally.hits += h ? 1 : 0;
        if (c == 0) report.l0 = tally;
        else report.l1.push_back(tally);
    }
    return report;
}

} // namespace rfsense

#endif
