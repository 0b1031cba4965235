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

#ifndef RFSENSE_RSS_CHANNEL_HPP
#define RFSENSE_RSS_CHANNEL_HPP

#include "diffraction.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace rfsense {

/// Log-normal fading terms: w0 ~ N(0, sigma0^2) without target,
/// wT ~ N(mu_T, sigma_T^2) with target, sigma_T^2 = sigma0^2 + delta.
///
/// Zero deviations are accepted for noiseless synthesis; likelihood()
/// requires sigma_T > 0.
struct NoiseModel {
    double sigma0 = 1.0;
    double mu_t = 2.0;
    double sigma_t = 2.0;

    void validate() const {
        if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) throw DomainError("sigma0 must be >= 0");
        if (!(sigma_t >= sigma0) || !std::isfinite(sigma_t)) throw DomainError("sigma_T must be >= sigma0");
        if (!std::isfinite(mu_t)) throw DomainError("mu_T must be finite");
    }
};

/// Noise model used for scoring. A noiseless channel scores with unit sigma_T,
/// which leaves every likelihood argmax unchanged.
inline NoiseModel scoring_noise(const NoiseModel& n) {
    NoiseModel s = n;
    if (s.sigma_t == 0.0) s.sigma_t = 1.0;
    return s;
}

struct LinkBudget {
    double tx_power_dbm = 0.0;
};

struct RssObservation {
    std::vector<double> values; ///< dBm per grid frequency
    std::size_t index = 0;
    std::optional<TargetState> truth; ///< empty: free space
};

/// Friis free-space received power with boresight antenna gains.
inline double free_space_power(const LinkGeometry& geom, double freq_hz, double tx_power_dbm, double tx_gain_dbi,
                               double rx_gain_dbi) {
    if (!(geom.d > 0.0)) throw DomainError("link length must be positive");
    const double lambda = wavelength(freq_hz);
    return tx_power_dbm + tx_gain_dbi + rx_gain_dbi + 20.0 * std::log10(lambda / (4.0 * std::numbers::pi * geom.d));
}

inline std::vector<double> free_space_profile(const LinkGeometry& geom, const LinkBudget& budget) {
    std::vector<double> p0;
    p0.reserve(geom.freq_grid.size());
    for (double f : geom.freq_grid)
        p0.push_back(free_space_power(geom, f, budget.tx_power_dbm, geom.tx_pattern.max_gain_dbi, geom.rx_pattern.max_gain_dbi));
    return p0;
}

/// One observation given the attenuation profile (empty: free space). Noise
/// is drawn independently per frequency, in grid order.
inline RssObservation synth_rss_from_profile(std::span<const double> p0, const std::vector<double>* attenuation,
                                             const NoiseModel& noise, Rng& rng) {
    RssObservation obs;
    obs.values.resize(p0.size());
    if (attenuation && attenuation->size() != p0.size()) throw ShapeError("attenuation length differs from P0");
    for (std::size_t i = 0; i < p0.size(); ++i) {
        const double w = standard_normal(rng);
        obs.values[i] = attenuation ? p0[i] - (*attenuation)[i] + noise.mu_t + noise.sigma_t * w : p0[i] + noise.sigma0 * w;
    }
    return obs;
}

inline RssObservation synth_rss(const LinkGeometry& geom, const std::optional<TargetState>& target,
                                const NoiseModel& noise, const QuadratureConfig& quad, const LinkBudget& budget, Rng& rng) {
    const std::vector<double> p0 = free_space_profile(geom, budget);
    if (!target) return synth_rss_from_profile(p0, nullptr, noise, rng);
    const AttenuationProfile a = attenuation_profile(geom, *target, quad);
    RssObservation obs = synth_rss_from_profile(p0, &a.values, noise, rng);
    obs.truth = target;
    return obs;
}

/// log p(S_t | A) = sum_f log N(S_f; P0_f - A_f + mu_T, sigma_T^2).
inline double likelihood(std::span<const double> observed, std::span<const double> attenuation, const NoiseModel& noise,
                         std::span<const double> p0) {
    if (observed.size() != attenuation.size() || observed.size() != p0.size())
        throw ShapeError("likelihood: observation, attenuation and P0 lengths differ");
    if (!(noise.sigma_t > 0.0)) throw DomainError("likelihood needs sigma_T > 0");
    const double inv = 1.0 / noise.sigma_t;
    double sq = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double r = (observed[i] - (p0[i] - attenuation[i] + noise.mu_t)) * inv;
        sq += r * r;
    }
    const double log_norm = std::log(noise.sigma_t * std::sqrt(2.0 * std::numbers::pi));
    return -0.5 * sq - static_cast<double>(observed.size()) * log_norm;
}

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    double mass = 0.0;
};

/// Probability mass over fixed-width bins aligned to multiples of `width`.
inline std::vector<HistogramBin> mass_function(std::span<const double> samples, double width = 0.5) {
    std::vector<HistogramBin> bins;
    if (samples.empty()) return bins;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const long first = static_cast<long>(std::floor(*lo_it / width));
    const long last = static_cast<long>(std::floor(*hi_it / width));
    std::vector<std::size_t> counts(static_cast<std::size_t>(last - first + 1), 0);
    for (double s : samples) ++counts[static_cast<std::size_t>(static_cast<long>(std::floor(s / width)) - first)];
    bins.reserve(counts.size());
    const double total = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double low = static_cast<double>(first + static_cast<long>(i)) * width;
        bins.push_back({low, low + width, static_cast<double>(counts[i]) / total});
    }
    return bins;
}

struct MarginalRss {
    std::vector<std::vector<double>> samples; ///< n draws of S_t (dBm per frequency)
    std::size_t frequency_index = 0;
    std::vector<HistogramBin> histogram;      ///< at frequency_index, 0.5 dB bins
};

/// Generator-marginalized RSS: A ~ generator(condition), then S_t ~ p(S_t | A).
/// Any type with generate(condition, n, rng) -> profiles works as generator.
template <class Generator>
MarginalRss marginal_rss(const Generator& gen, const TargetState& condition, const NoiseModel& noise,
                         std::span<const double> p0, std::size_t n, std::size_t frequency_index, Rng& rng) {
    if (frequency_index >= p0.size()) throw ShapeError("marginal_rss: frequency index out of range");
    MarginalRss out;
    out.frequency_index = frequency_index;
    const auto profiles = gen.generate(condition, n, rng);
    out.samples.reserve(n);
    std::vector<double> at_freq;
    at_freq.reserve(n);
    for (const auto& a : profiles) {
        out.samples.push_back(synth_rss_from_profile(p0, &a.values, noise, rng).values);
        at_freq.push_back(out.samples.back()[frequency_index]);
    }
    out.histogram = mass_function(at_freq);
    return out;
}

} // namespace rfsense

#endif
