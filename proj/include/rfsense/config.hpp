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

#ifndef RFSENSE_CONFIG_HPP
#define RFSENSE_CONFIG_HPP

#include "cvae.hpp"
#include "diffraction.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "prior_sampler.hpp"
#include "rss_channel.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rfsense {

struct GeometryBlock {
    double d = 4.0;
    double h = 0.99;
    double freq_start_hz = 2.4e9;
    double freq_stop_hz = 2.5e9;
    std::size_t freq_count = 16;
    std::string antenna = "omni"; ///< "omni" or "directional"
    double gain_exponent = 4.0;    ///< directional only
    double max_gain_dbi = 8.0;     ///< directional only
};

struct BodyBlock {
    double h_s = 1.80;
    double w_s1 = 0.55;
    double w_s2 = 0.25;
};

struct DatasetBlock {
    std::size_t per_condition = 200;
    std::string path = "dataset.bin";
};

struct CvaeBlock {
    std::size_t latent_dim = 16;
    double beta = 0.05;
    double recon_sigma = 10.0;
    std::string activation = "tanh";
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::size_t patience = 20;
    std::string model_path = "model.bin";
};

struct ExperimentBlock {
    GridSpec grid;
    std::vector<double> d_t{1.0};
    std::size_t trials = 200;
    std::size_t m_samples = 256;
    double fresnel_freq_hz = 2.45e9;
    std::vector<double> sweep_x{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75};
    double sweep_y = 0.0;
    std::size_t samples_per_position = 1;
    std::size_t rss_samples = 1000;
    std::size_t rss_frequency_index = 0;
    std::vector<std::array<double, 2>> rss_positions{{1.0, 0.0}, {2.0, 0.0}, {1.0, 0.5}};
    std::size_t generate_samples = 100;
    std::size_t localize_trials = 20;
};

struct BenchBlock {
    std::size_t cvae_samples = 1000;
    std::size_t quad_samples = 10;
    std::size_t warmup = 10;
    std::vector<std::size_t> latent_dims{16, 32};
    std::vector<double> tolerances{1e-3, 1e-6};
};

struct ExperimentConfig {
    GeometryBlock geometry;
    BodyBlock body;
    UncertaintyConfig uncertainty;
    QuadratureConfig quadrature;
    NoiseModel noise;
    LinkBudget budget;
    DatasetBlock dataset;
    CvaeBlock cvae;
    ExperimentBlock experiment;
    BenchBlock bench;
    std::uint64_t seed = 1;
    std::size_t threads = 0; ///< 0: hardware concurrency

    LinkGeometry link() const {
        LinkGeometry g;
        g.d = geometry.d;
        g.h = geometry.h;
        g.freq_grid = band_grid(geometry.freq_start_hz, geometry.freq_stop_hz, geometry.freq_count);
        const AntennaPattern p = geometry.antenna == "directional"
                                     ? AntennaPattern::directional(geometry.gain_exponent, geometry.max_gain_dbi)
                                     : AntennaPattern::omni();
        g.tx_pattern = p;
        g.rx_pattern = p;
        return g;
    }

    TargetState body_state() const { return {0.0, 0.0, 0.0, body.h_s, body.w_s1, body.w_s2}; }

    CandidateGrid grid() const { return make_grid(experiment.grid, body_state()); }

    TrainConfig train_config() const {
        TrainConfig t;
        t.epochs = cvae.epochs;
        t.batch_size = cvae.batch_size;
        t.learning_rate = cvae.learning_rate;
        t.seed = derive_seed(seed, 2);
        t.beta = cvae.beta;
        t.latent_dim = cvae.latent_dim;
        t.patience = cvae.patience;
        t.recon_sigma = cvae.recon_sigma;
        t.activation = nn::activation_from_string(cvae.activation);
        return t;
    }

    std::size_t thread_count() const { return threads ? threads : default_thread_count(); }

    /// Checks every block; raises ConfigError naming the first offending field.
    void validate() const {
        auto wrap = [](const char* block, auto&& fn) {
            try {
                fn();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string(block) + ": " + e.what());
            } catch (const std::domain_error& e) {
                throw ConfigError(std::string(block) + ": " + e.what());
            }
        };
        if (geometry.antenna != "omni" && geometry.antenna != "directional")
            throw ConfigError("geometry.antenna must be \"omni\" or \"directional\"");
        wrap("geometry", [&] { link().validate(); });
        wrap("body", [&] {
            TargetState t = body_state();
            t.x = geometry.d / 2.0;
            t.validate();
        });
        wrap("uncertainty", [&] { uncertainty.validate(); });
        wrap("quadrature", [&] { quadrature.validate(); });
        wrap("noise", [&] { noise.validate(); });
        wrap("cvae", [&] {
            train_config().validate();
            if (!(cvae.latent_dim >= 1)) throw ConfigError("latent_dim must be >= 1");
        });
        if (dataset.per_condition == 0) throw ConfigError("dataset.per_condition must be >= 1");
        const auto& e = experiment;
        if (e.grid.nx * e.grid.ny < 2) throw ConfigError("experiment.grid needs at least two positions");
        wrap("experiment.grid", [&] { grid().validate(link()); });
        for (double dt : e.d_t)
            if (!(dt > 0.0 && dt < geometry.d)) throw ConfigError("experiment.d_t entries must lie in (0, d)");
        if (e.d_t.empty()) throw ConfigError("experiment.d_t is empty");
        if (e.trials == 0 || e.m_samples == 0) throw ConfigError("experiment.trials and m_samples must be >= 1");
        if (!(e.fresnel_freq_hz > 0.0)) throw ConfigError("experiment.fresnel_freq_hz must be positive");
        for (double x : e.sweep_x)
            if (!(x > 0.0 && x < geometry.d)) throw ConfigError("experiment.sweep_x entries must lie in (0, d)");
        if (e.samples_per_position == 0) throw ConfigError("experiment.samples_per_position must be >= 1");
        if (e.rss_samples == 0) throw ConfigError("experiment.rss_samples must be >= 1");
        if (e.rss_frequency_index >= geometry.freq_count)
            throw ConfigError("experiment.rss_frequency_index exceeds the frequency grid");
        for (const auto& p : e.rss_positions)
            if (!(p[0] > 0.0 && p[0] < geometry.d)) throw ConfigError("experiment.rss_positions x must lie in (0, d)");
        if (e.generate_samples == 0 || e.localize_trials == 0)
            throw ConfigError("experiment.generate_samples and localize_trials must be >= 1");
        if (bench.cvae_samples < 100) throw ConfigError("bench.cvae_samples must be >= 100");
        if (bench.quad_samples < 10) throw ConfigError("bench.quad_samples must be >= 10");
        if (bench.latent_dims.empty() || bench.tolerances.empty()) throw ConfigError("bench lists must not be empty");
        for (double t : bench.tolerances)
            if (!(t > 0.0)) throw ConfigError("bench.tolerances must be positive");
    }
};

namespace detail {

// Reads known keys of one block and rejects the rest, so typos surface.
class BlockReader {
public:
    BlockReader(const nlohmann::json& root, std::string name) : name_(std::move(name)) {
        if (!root.contains(name_)) return;
        node_ = &root.at(name_);
        if (!node_->is_object()) throw ConfigError(name_ + " must be an object");
    }

    template <class T>
    void read(const char* key, T& target) {
        seen_.insert(key);
        if (!node_ || !node_->contains(key)) return;
        try {
            target = node_->at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    template <class T>
    void read(const char* key, std::optional<T>& target) {
        seen_.insert(key);
        if (!node_ || !node_->contains(key)) return;
        if (node_->at(key).is_null()) {
            target.reset();
            return;
        }
        T value{};
        read(key, value);
        target = value;
    }

    void finish() const {
        if (!node_) return;
        for (const auto& [k, v] : node_->items())
            if (!seen_.contains(k)) throw ConfigError("unknown key " + name_ + "." + k);
    }

private:
    std::string name_;
    const nlohmann::json* node_ = nullptr;
    std::set<std::string, std::less<>> seen_;
};

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    static const std::set<std::string, std::less<>> blocks{"geometry", "body",    "uncertainty", "quadrature",
                                                           "noise",    "budget",  "dataset",     "cvae",
                                                           "experiment", "bench", "seed",        "threads"};
    for (const auto& [k, v] : j.items())
        if (!blocks.contains(k)) throw ConfigError("unknown configuration block " + k);

    ExperimentConfig c;
    {
        detail::BlockReader r(j, "geometry");
        r.read("d", c.geometry.d);
        r.read("h", c.geometry.h);
        r.read("freq_start_hz", c.geometry.freq_start_hz);
        r.read("freq_stop_hz", c.geometry.freq_stop_hz);
        r.read("freq_count", c.geometry.freq_count);
        r.read("antenna", c.geometry.antenna);
        r.read("gain_exponent", c.geometry.gain_exponent);
        r.read("max_gain_dbi", c.geometry.max_gain_dbi);
        r.finish();
    }
    {
        detail::BlockReader r(j, "body");
        r.read("h_s", c.body.h_s);
        r.read("w_s1", c.body.w_s1);
        r.read("w_s2", c.body.w_s2);
        r.finish();
    }
    {
        detail::BlockReader r(j, "uncertainty");
        r.read("dx", c.uncertainty.dx);
        r.read("dy", c.uncertainty.dy);
        std::optional<std::array<double, 2>> phi;
        if (c.uncertainty.phi_range) phi = std::array<double, 2>{c.uncertainty.phi_range->lo, c.uncertainty.phi_range->hi};
        r.read("phi_range", phi);
        c.uncertainty.phi_range = phi ? std::optional<Interval>(Interval{(*phi)[0], (*phi)[1]}) : std::nullopt;
        r.read("size_jitter", c.uncertainty.size_jitter);
        r.finish();
    }
    {
        detail::BlockReader r(j, "quadrature");
        r.read("abs_tol", c.quadrature.abs_tol);
        r.read("max_depth", c.quadrature.max_depth);
        r.read("init_tiles_x", c.quadrature.init_tiles_x);
        r.read("init_tiles_y", c.quadrature.init_tiles_y);
        r.finish();
    }
    {
        detail::BlockReader r(j, "noise");
        r.read("sigma0", c.noise.sigma0);
        r.read("mu_t", c.noise.mu_t);
        r.read("sigma_t", c.noise.sigma_t);
        r.finish();
    }
    {
        detail::BlockReader r(j, "budget");
        r.read("tx_power_dbm", c.budget.tx_power_dbm);
        r.finish();
    }
    {
        detail::BlockReader r(j, "dataset");
        r.read("per_condition", c.dataset.per_condition);
        r.read("path", c.dataset.path);
        r.finish();
    }
    {
        detail::BlockReader r(j, "cvae");
        r.read("latent_dim", c.cvae.latent_dim);
        r.read("beta", c.cvae.beta);
        r.read("recon_sigma", c.cvae.recon_sigma);
        r.read("activation", c.cvae.activation);
        r.read("epochs", c.cvae.epochs);
        r.read("batch_size", c.cvae.batch_size);
        r.read("learning_rate", c.cvae.learning_rate);
        r.read("patience", c.cvae.patience);
        r.read("model_path", c.cvae.model_path);
        r.finish();
    }
    {
        detail::BlockReader r(j, "experiment");
        auto& e = c.experiment;
        r.read("grid_x_start", e.grid.x_start);
        r.read("grid_x_step", e.grid.x_step);
        r.read("grid_nx", e.grid.nx);
        r.read("grid_y_start", e.grid.y_start);
        r.read("grid_y_step", e.grid.y_step);
        r.read("grid_ny", e.grid.ny);
        r.read("d_t", e.d_t);
        r.read("trials", e.trials);
        r.read("m_samples", e.m_samples);
        r.read("fresnel_freq_hz", e.fresnel_freq_hz);
        r.read("sweep_x", e.sweep_x);
        r.read("sweep_y", e.sweep_y);
        r.read("samples_per_position", e.samples_per_position);
        r.read("rss_samples", e.rss_samples);
        r.read("rss_frequency_index", e.rss_frequency_index);
        r.read("rss_positions", e.rss_positions);
        r.read("generate_samples", e.generate_samples);
        r.read("localize_trials", e.localize_trials);
        r.finish();
    }
    {
        detail::BlockReader r(j, "bench");
        r.read("cvae_samples", c.bench.cvae_samples);
        r.read("quad_samples", c.bench.quad_samples);
        r.read("warmup", c.bench.warmup);
        r.read("latent_dims", c.bench.latent_dims);
        r.read("tolerances", c.bench.tolerances);
        r.finish();
    }
    try {
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("seed/threads: ") + e.what());
    }
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json phi = nullptr;
    if (c.uncertainty.phi_range) phi = {c.uncertainty.phi_range->lo, c.uncertainty.phi_range->hi};
    const auto& e = c.experiment;
    return {
        {"geometry",
         {{"d", c.geometry.d},
          {"h", c.geometry.h},
          {"freq_start_hz", c.geometry.freq_start_hz},
          {"freq_stop_hz", c.geometry.freq_stop_hz},
          {"freq_count", c.geometry.freq_count},
          {"antenna", c.geometry.antenna},
          {"gain_exponent", c.geometry.gain_exponent},
          {"max_gain_dbi", c.geometry.max_gain_dbi}}},
        {"body", {{"h_s", c.body.h_s}, {"w_s1", c.body.w_s1}, {"w_s2", c.body.w_s2}}},
        {"uncertainty",
         {{"dx", c.uncertainty.dx}, {"dy", c.uncertainty.dy}, {"phi_range", phi}, {"size_jitter", c.uncertainty.size_jitter}}},
        {"quadrature",
         {{"abs_tol", c.quadrature.abs_tol},
          {"max_depth", c.quadrature.max_depth},
          {"init_tiles_x", c.quadrature.init_tiles_x},
          {"init_tiles_y", c.quadrature.init_tiles_y}}},
        {"noise", {{"sigma0", c.noise.sigma0}, {"mu_t", c.noise.mu_t}, {"sigma_t", c.noise.sigma_t}}},
        {"budget", {{"tx_power_dbm", c.budget.tx_power_dbm}}},
        {"dataset", {{"per_condition", c.dataset.per_condition}, {"path", c.dataset.path}}},
        {"cvae",
         {{"latent_dim", c.cvae.latent_dim},
          {"beta", c.cvae.beta},
          {"recon_sigma", c.cvae.recon_sigma},
          {"activation", c.cvae.activation},
          {"epochs", c.cvae.epochs},
          {"batch_size", c.cvae.batch_size},
          {"learning_rate", c.cvae.learning_rate},
          {"patience", c.cvae.patience},
          {"model_path", c.cvae.model_path}}},
        {"experiment",
         {{"grid_x_start", e.grid.x_start},
          {"grid_x_step", e.grid.x_step},
          {"grid_nx", e.grid.nx},
          {"grid_y_start", e.grid.y_start},
          {"grid_y_step", e.grid.y_step},
          {"grid_ny", e.grid.ny},
          {"d_t", e.d_t},
          {"trials", e.trials},
          {"m_samples", e.m_samples},
          {"fresnel_freq_hz", e.fresnel_freq_hz},
          {"sweep_x", e.sweep_x},
          {"sweep_y", e.sweep_y},
          {"samples_per_position", e.samples_per_position},
          {"rss_samples", e.rss_samples},
          {"rss_frequency_index", e.rss_frequency_index},
          {"rss_positions", e.rss_positions},
          {"generate_samples", e.generate_samples},
          {"localize_trials", e.localize_trials}}},
        {"bench",
         {{"cvae_samples", c.bench.cvae_samples},
          {"quad_samples", c.bench.quad_samples},
          {"warmup", c.bench.warmup},
          {"latent_dims", c.bench.latent_dims},
          {"tolerances", c.bench.tolerances}}},
        {"seed", c.seed},
        {"threads", c.threads},
    };
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash of the canonical JSON form (sorted keys, compact). Thread count is
/// excluded since results do not depend on it.
inline std::string config_hash(const ExperimentConfig& c) {
    nlohmann::json j = to_json(c);
    j.erase("threads");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

} // namespace rfsense

#endif
