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

#ifndef RFSENSE_BENCH_HPP
#define RFSENSE_BENCH_HPP

#include "cvae.hpp"
#include "diffraction.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace rfsense {

struct BenchEntry {
    std::string config; ///< e.g. "cvae_Z16", "em_omni_tol1e-03"
    bool generative = false;
    std::size_t latent_dim = 0;
    double abs_tol = 0.0;
    bool directional = false;
    std::size_t samples = 0;
    double mean_sec = 0.0;   ///< per sample
    double median_sec = 0.0; ///< per sample, median over batches
    double ratio_vs_em = 0.0;
    std::optional<double> reference_sec; ///< published embedded-board figure, when one exists
};

struct BenchReport {
    std::vector<BenchEntry> entries;
    double timer_granularity_sec = 0.0;

    const BenchEntry& find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.config == name) return e;
        throw std::out_of_range("no bench entry " + name);
    }
};

struct BenchOptions {
    std::size_t cvae_samples = 1000;
    std::size_t quad_samples = 10;
    std::size_t warmup = 10;
    std::size_t batches = 10;
    std::vector<double> tolerances{1e-3, 1e-6};
    std::uint64_t seed = 1;
};

inline std::string bench_name_cvae(std::size_t z) { return "cvae_Z" + std::to_string(z); }

inline std::string bench_name_em(bool directional, double tol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "em_%s_tol%.0e", directional ? "directional" : "omni", tol);
    return buf;
}

/// Published per-sample times measured on an embedded board.
inline std::optional<double> reference_time(const BenchEntry& e) {
    if (e.generative) {
        if (e.latent_dim == 16) return 3.5e-5;
        if (e.latent_dim == 32) return 5.2e-5;
        return std::nullopt;
    }
    const bool loose = e.abs_tol == 1e-3, tight = e.abs_tol == 1e-6;
    if (!e.directional && loose) return 5.4e-3;
    if (!e.directional && tight) return 3.81e-2;
    if (e.directional && loose) return 0.64;
    if (e.directional && tight) return 1.56;
    return std::nullopt;
}

/// Smallest observable positive step of the monotonic clock.
inline double timer_granularity() {
    using clock = std::chrono::steady_clock;
    double best = 1.0;
    for (int i = 0; i < 200; ++i) {
        const auto t0 = clock::now();
        auto t1 = clock::now();
        while (t1 == t0) t1 = clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

namespace detail {

struct Timing {
    double mean = 0.0;
    double median = 0.0;
};

// Times `n` calls of `fn(i)` split into batches after `warmup` discarded calls.
template <class Fn>
Timing time_batched(std::size_t n, std::size_t batches, std::size_t warmup, Fn&& fn) {
    using clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < warmup; ++i) fn(i);
    batches = std::clamp<std::size_t>(batches, 1, n);
    std::vector<double> per_sample;
    double total = 0.0;
    std::size_t done = 0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t count = n / batches + (b < n % batches ? 1 : 0);
        const auto t0 = clock::now();
        for (std::size_t i = 0; i < count; ++i) fn(warmup + done + i);
        const double sec = std::chrono::duration<double>(clock::now() - t0).count();
        done += count;
        total += sec;
        per_sample.push_back(sec / static_cast<double>(count));
    }
    std::sort(per_sample.begin(), per_sample.end());
    const std::size_t m = per_sample.size();
    return {total / static_cast<double>(n), m % 2 ? per_sample[m / 2] : 0.5 * (per_sample[m / 2 - 1] + per_sample[m / 2])};
}

} // namespace detail

/// Per-sample generation time of each C-VAE (one profile per call) and of
/// the diffraction model (one full profile per call) for every tolerance and
/// antenna kind. Conditions cycle over the grid. Runs serially.
///
/// ratio_vs_em: for a C-VAE row, omni tol 1e-3 time / row time; for a
/// diffraction row, row time / time of the first C-VAE.
inline BenchReport bench_generation(const std::vector<const CvaeModel*>& models, const LinkGeometry& omni_geom,
                                    const LinkGeometry& directional_geom, const CandidateGrid& grid,
                                    const QuadratureConfig& base_quad, const BenchOptions& opt) {
    if (models.empty()) throw ConfigError("bench needs at least one model");
    if (opt.cvae_samples < 100 || opt.quad_samples < 10) throw ConfigError("bench needs >= 100 generator and >= 10 quadrature samples");
    if (grid.size() == 0) throw DomainError("bench grid is empty");

    BenchReport report;
    report.timer_granularity_sec = timer_granularity();
    auto check_resolution = [&](const BenchEntry& e) {
        if (e.mean_sec < 10.0 * report.timer_granularity_sec)
            throw std::runtime_error("timer resolution insufficient for " + e.config);
    };

    for (const CvaeModel* m : models) {
        Rng rng = make_rng(opt.seed, m->latent_dim);
        double sink = 0.0;
        const detail::Timing t = detail::time_batched(opt.cvae_samples, opt.batches, opt.warmup, [&](std::size_t i) {
            sink += generate(*m, grid.state(i % grid.size()), 1, rng).front().values.front();
        });
        BenchEntry e;
        e.config = bench_name_cvae(m->latent_dim);
        e.generative = true;
        e.latent_dim = m->latent_dim;
        e.samples = opt.cvae_samples;
        e.mean_sec = t.mean;
        e.median_sec = t.median;
        e.reference_sec = reference_time(e);
        if (!std::isfinite(sink)) throw TrainingError("bench model produced non-finite output", 0);
        check_resolution(e);
        report.entries.push_back(e);
    }

    for (bool directional : {false, true}) {
        const LinkGeometry& geom = directional ? directional_geom : omni_geom;
        for (double tol : opt.tolerances) {
            QuadratureConfig q = base_quad;
            q.abs_tol = tol;
            const detail::Timing t = detail::time_batched(opt.quad_samples, opt.quad_samples, opt.warmup,
                                                          [&](std::size_t i) {
                                                              (void)attenuation_profile(geom, grid.state(i % grid.size()), q);
                                                          });
            BenchEntry e;
            e.config = bench_name_em(directional, tol);
            e.abs_tol = tol;
            e.directional = directional;
            e.samples = opt.quad_samples;
            e.mean_sec = t.mean;
            e.median_sec = t.median;
            e.reference_sec = reference_time(e);
            check_resolution(e);
            report.entries.push_back(e);
        }
    }

    const double first_cvae = report.entries.front().mean_sec;
    const auto em_ref = std::find_if(report.entries.begin(), report.entries.end(),
                                     [](const BenchEntry& e) { return !e.generative && !e.directional; });
    for (auto& e : report.entries) {
        if (e.generative) e.ratio_vs_em = em_ref != report.entries.end() ? em_ref->mean_sec / e.mean_sec : 0.0;
        else e.ratio_vs_em = e.mean_sec / first_cvae;
    }
    return report;
}

} // namespace rfsense

#endif
