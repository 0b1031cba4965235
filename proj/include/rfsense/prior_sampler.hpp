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

#ifndef RFSENSE_PRIOR_SAMPLER_HPP
#define RFSENSE_PRIOR_SAMPLER_HPP

#include "diffraction.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace rfsense {

inline constexpr std::size_t condition_dim = 6;
using ConditionVector = std::array<double, condition_dim>;

/// (x, y, phi, h_S, w_S1, w_S2)
inline ConditionVector condition_vector(const TargetState& t) {
    return {t.x, t.y, t.phi, t.h_s, t.w_s1, t.w_s2};
}

inline TargetState target_from_condition(const ConditionVector& c) {
    return {c[0], c[1], c[2], c[3], c[4], c[5]};
}

struct NominalCondition {
    TargetState theta_k;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct UncertaintyConfig {
    double dx = 0.1;
    double dy = 0.1;
    /// Absolute orientation range; when absent the nominal orientation is kept.
    std::optional<Interval> phi_range = Interval{-std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    double size_jitter = 0.0; ///< relative, uniform in [-j, j]

    static UncertaintyConfig none() { return {0.0, 0.0, std::nullopt, 0.0}; }

    void validate() const {
        if (!(dx >= 0.0) || !(dy >= 0.0)) throw DomainError("uncertainty box sides must be >= 0");
        if (phi_range) {
            constexpr double half_pi = std::numbers::pi / 2.0;
            if (!(phi_range->lo <= phi_range->hi)) throw DomainError("orientation range is not well-ordered");
            if (phi_range->lo < -half_pi || phi_range->hi > half_pi)
                throw DomainError("orientation range must lie within [-pi/2, pi/2]");
        }
        if (!(size_jitter >= 0.0 && size_jitter < 1.0)) throw DomainError("size jitter must lie in [0, 1)");
    }
};

/// Physical ranges mapped affinely onto [-1, 1] for the network inputs.
struct ConditionRanges {
    std::array<Interval, condition_dim> bounds{{
        {0.0, 4.0},
        {-3.0, 3.0},
        {-std::numbers::pi / 2.0, std::numbers::pi / 2.0},
        {1.5, 2.0},
        {0.2, 0.7},
        {0.2, 0.7},
    }};

    static ConditionRanges for_link(double d) {
        ConditionRanges r;
        r.bounds[0] = {0.0, d};
        return r;
    }
};

/// Affine statistics: conditions from configured ranges, profiles per
/// frequency from the records (zero mean, unit scale).
struct Normalization {
    ConditionVector cond_center{};
    ConditionVector cond_half_range{};
    std::vector<double> profile_mean;
    std::vector<double> profile_scale;

    std::size_t profile_length() const { return profile_mean.size(); }

    ConditionVector normalize_condition(const ConditionVector& c) const {
        ConditionVector out{};
        for (std::size_t i = 0; i < condition_dim; ++i) out[i] = (c[i] - cond_center[i]) / cond_half_range[i];
        return out;
    }

    std::vector<double> normalize_profile(const std::vector<double>& db) const {
        check_length(db.size());
        std::vector<double> out(db.size());
        for (std::size_t i = 0; i < db.size(); ++i) out[i] = (db[i] - profile_mean[i]) / profile_scale[i];
        return out;
    }

    std::vector<double> denormalize_profile(const std::vector<double>& u) const {
        check_length(u.size());
        std::vector<double> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * profile_scale[i] + profile_mean[i];
        return out;
    }

    friend bool operator==(const Normalization&, const Normalization&) = default;

private:
    void check_length(std::size_t n) const {
        if (n != profile_mean.size()) throw ShapeError("profile length does not match the normalization");
    }
};

struct TrainingRecord {
    ConditionVector condition{}; ///< nominal theta_k in physical units
    std::vector<double> profile; ///< dB

    friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

struct TrainingSet {
    std::vector<TrainingRecord> records;
    Normalization normalization;

    std::size_t profile_length() const { return normalization.profile_length(); }
    friend bool operator==(const TrainingSet&, const TrainingSet&) = default;
};

inline Normalization compute_normalization(const std::vector<TrainingRecord>& records, const ConditionRanges& ranges) {
    if (records.empty()) throw DomainError("cannot normalize an empty record set");
    const std::size_t f = records.front().profile.size();
    Normalization n;
    for (std::size_t i = 0; i < condition_dim; ++i) {
        const Interval b = ranges.bounds[i];
        if (!(b.hi > b.lo)) throw DomainError("condition range must have positive width");
        n.cond_center[i] = 0.5 * (b.lo + b.hi);
        n.cond_half_range[i] = 0.5 * (b.hi - b.lo);
    }
    n.profile_mean.assign(f, 0.0);
    n.profile_scale.assign(f, 0.0);
    for (const auto& r : records) {
        if (r.profile.size() != f) throw ShapeError("training profiles must share one length");
        for (std::size_t i = 0; i < f; ++i) n.profile_mean[i] += r.profile[i];
    }
    const double count = static_cast<double>(records.size());
    for (double& m : n.profile_mean) m /= count;
    for (const auto& r : records)
        for (std::size_t i = 0; i < f; ++i) {
            const double dev = r.profile[i] - n.profile_mean[i];
            n.profile_scale[i] += dev * dev;
        }
    for (double& s : n.profile_scale) {
        s = std::sqrt(s / count);
        if (!(s > 1e-9)) s = 1.0;
    }
    return n;
}

namespace detail {

inline double jitter_positive(Rng& rng, double value, double rel) {
    if (rel <= 0.0) return value;
    return value * (1.0 + uniform(rng, -rel, rel));
}

} // namespace detail

/// Draws a state from the uniform uncertainty model around the nominal one,
/// redrawing (up to 100 times) when the position leaves the open slab 0 < x < d.
inline TargetState sample_state(const NominalCondition& nominal, const UncertaintyConfig& unc, double link_length,
                                Rng& rng) {
    constexpr int max_tries = 100;
    const TargetState& k = nominal.theta_k;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        TargetState s = k;
        s.x = uniform(rng, k.x - unc.dx / 2.0, k.x + unc.dx / 2.0);
        s.y = uniform(rng, k.y - unc.dy / 2.0, k.y + unc.dy / 2.0);
        if (unc.phi_range) s.phi = uniform(rng, unc.phi_range->lo, unc.phi_range->hi);
        s.h_s = detail::jitter_positive(rng, k.h_s, unc.size_jitter);
        s.w_s1 = detail::jitter_positive(rng, k.w_s1, unc.size_jitter);
        s.w_s2 = detail::jitter_positive(rng, k.w_s2, unc.size_jitter);
        if (s.w_s2 > s.w_s1) std::swap(s.w_s1, s.w_s2);
        if (s.x > 0.0 && s.x < link_length) return s;
    }
    throw DomainError("nominal position too close to an antenna: 100 consecutive draws left the link slab");
}

inline std::vector<AttenuationProfile> sample_prior(const NominalCondition& nominal, const UncertaintyConfig& unc,
                                                    const LinkGeometry& geom, const QuadratureConfig& quad,
                                                    std::size_t n, Rng& rng) {
    if (n == 0) throw DomainError("sample_prior needs n >= 1");
    std::vector<AttenuationProfile> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(attenuation_profile(geom, sample_state(nominal, unc, geom.d, rng), quad));
    return out;
}

/// Condition k draws from substream derive_seed(seed, k); records are stored
/// condition-major regardless of how the conditions are scheduled.
inline TrainingSet build_training_set(const std::vector<NominalCondition>& grid, const UncertaintyConfig& unc,
                                      const LinkGeometry& geom, const QuadratureConfig& quad,
                                      std::size_t per_condition, std::uint64_t seed, const ConditionRanges& ranges,
                                      std::size_t threads = default_thread_count()) {
    if (grid.empty()) throw DomainError("training grid is empty");
    if (per_condition == 0) throw DomainError("per_condition must be >= 1");
    std::vector<std::vector<AttenuationProfile>> per_grid(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        Rng rng = make_rng(seed, k);
        per_grid[k] = sample_prior(grid[k], unc, geom, quad, per_condition, rng);
    });
    TrainingSet set;
    set.records.reserve(grid.size() * per_condition);
    for (std::size_t k = 0; k < grid.size(); ++k)
        for (auto& p : per_grid[k]) set.records.push_back({condition_vector(grid[k].theta_k), std::move(p.values)});
    set.normalization = compute_normalization(set.records, ranges);
    return set;
}

} // namespace rfsense

#endif
