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

#ifndef RFSENSE_CLI_HPP
#define RFSENSE_CLI_HPP

#include "bench.hpp"
#include "config.hpp"
#include "cvae.hpp"
#include "diffraction.hpp"
#include "generators.hpp"
#include "localization.hpp"
#include "persistence.hpp"
#include "prior_sampler.hpp"
#include "rss_channel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rfsense {

// Substreams of the master seed, one per subcommand.
namespace seed_stream {
inline constexpr std::uint64_t dataset = 1;
inline constexpr std::uint64_t train = 2;
inline constexpr std::uint64_t simulate = 3;
inline constexpr std::uint64_t generate = 4;
inline constexpr std::uint64_t rss = 5;
inline constexpr std::uint64_t localize = 6;
inline constexpr std::uint64_t detect = 7;
inline constexpr std::uint64_t bench = 8;
} // namespace seed_stream

/// CSV file with a "# config_hash=... seed=..." line and a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& hash, std::uint64_t seed,
              const std::vector<std::string>& header)
        : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out_ << "# config_hash=" << hash << " seed=" << seed << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << "\n";
    }

    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("CSV write failed");
    }

    static std::string cell(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

private:
    std::ofstream out_;
};

namespace detail {

struct RunContext {
    std::string command;
    ExperimentConfig cfg;
    std::filesystem::path out;
    std::string hash;
    std::string generator = "cvae";

    LinkGeometry geom() const { return cfg.link(); }
    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : out / path;
    }
    std::filesystem::path file(const std::string& name) const { return out / name; }
    CsvWriter csv(const std::string& name, const std::vector<std::string>& header) const {
        return CsvWriter(file(name), hash, cfg.seed, header);
    }
    std::uint64_t stream(std::uint64_t s) const { return derive_seed(cfg.seed, s); }
};

inline void write_resolved(const RunContext& ctx) {
    write_json(ctx.file(ctx.command + ".resolved.json"), {{"command", ctx.command},
                                                          {"seed", ctx.cfg.seed},
                                                          {"config_hash", ctx.hash},
                                                          {"generator", ctx.generator},
                                                          {"config", to_json(ctx.cfg)}});
    std::cerr << ctx.command << ": seed=" << ctx.cfg.seed << " config_hash=" << ctx.hash << "\n";
}

inline CvaeModel load_trained_model(const RunContext& ctx) {
    const auto path = ctx.resolve(ctx.cfg.cvae.model_path);
    if (!std::filesystem::exists(path)) throw ConfigError("no model at " + path.string() + "; run `train` first");
    return load_model(path, ctx.cfg.geometry.freq_count);
}

// Calls fn with the generator selected on the command line.
template <class Fn>
void with_generator(const RunContext& ctx, Fn&& fn) {
    if (ctx.generator == "oracle") {
        const CandidateGrid grid = ctx.cfg.grid();
        std::vector<TargetState> states;
        for (const auto& c : grid.conditions) states.push_back(c.theta_k);
        fn(OracleGenerator(ctx.geom(), ctx.cfg.quadrature, states));
    } else {
        const CvaeModel model = load_trained_model(ctx);
        fn(CvaeGenerator(model));
    }
}

inline void emit_profiles(CsvWriter& csv, const LinkGeometry& geom, const TargetState& t, const std::vector<double>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) csv.row(t.x, t.y, t.phi, geom.freq_grid[i], a[i]);
}

inline int run_simulate(const RunContext& ctx) {
    const auto& e = ctx.cfg.experiment;
    const LinkGeometry geom = ctx.geom();
    const UncertaintyConfig unc = e.samples_per_position > 1 ? ctx.cfg.uncertainty : UncertaintyConfig::none();
    CsvWriter csv = ctx.csv("simulate.csv", {"x_m", "y_m", "phi_rad", "freq_hz", "atten_db"});
    CsvWriter mean = ctx.csv("simulate_mean.csv", {"x_m", "y_m", "atten_mean_db"});
    for (std::size_t i = 0; i < e.sweep_x.size(); ++i) {
        TargetState nominal = ctx.cfg.body_state();
        nominal.x = e.sweep_x[i];
        nominal.y = e.sweep_y;
        Rng rng = make_rng(ctx.stream(seed_stream::simulate), i);
        const auto profiles = sample_prior({nominal}, unc, geom, ctx.cfg.quadrature, e.samples_per_position, rng);
        double sum = 0.0;
        for (const auto& p : profiles) {
            emit_profiles(csv, geom, p.condition, p.values);
            for (double v : p.values) sum += v;
        }
        mean.row(nominal.x, nominal.y, sum / static_cast<double>(profiles.size() * geom.freq_grid.size()));
    }
    csv.finish();
    mean.finish();
    return 0;
}

inline int run_dataset(const RunContext& ctx) {
    const LinkGeometry geom = ctx.geom();
    const CandidateGrid grid = ctx.cfg.grid();
    const TrainingSet set = build_training_set(grid.conditions, ctx.cfg.uncertainty, geom, ctx.cfg.quadrature,
                                               ctx.cfg.dataset.per_condition, ctx.stream(seed_stream::dataset),
                                               ConditionRanges::for_link(geom.d), ctx.cfg.thread_count());
    const auto path = ctx.resolve(ctx.cfg.dataset.path);
    save_dataset(path, set);
    std::cerr << "dataset: " << set.records.size() << " records, F=" << set.profile_length() << " -> " << path.string()
              << "\n";
    return 0;
}

inline int run_train(const RunContext& ctx) {
    const auto data_path = ctx.resolve(ctx.cfg.dataset.path);
    if (!std::filesystem::exists(data_path)) throw ConfigError("no dataset at " + data_path.string() + "; run `dataset` first");
    const TrainingSet set = load_dataset(data_path);
    if (set.profile_length() != ctx.cfg.geometry.freq_count)
        throw ShapeError("dataset F differs from the configured frequency count");
    TrainConfig tc = ctx.cfg.train_config();
    tc.seed = ctx.stream(seed_stream::train);
    const TrainResult r = train(set, tc);
    save_model(ctx.resolve(ctx.cfg.cvae.model_path), r.model);
    CsvWriter csv = ctx.csv("train_history.csv", {"epoch", "train_loss", "validation_loss"});
    for (const auto& h : r.history) csv.row(h.epoch, h.train_loss, h.validation_loss);
    csv.finish();
    std::cerr << "train: " << r.history.size() << " epochs, best " << r.best_epoch << ", parameters "
              << r.model.parameter_count() << "\n";
    return 0;
}

inline int run_generate(const RunContext& ctx) {
    const auto& e = ctx.cfg.experiment;
    const LinkGeometry geom = ctx.geom();
    with_generator(ctx, [&](const auto& gen) {
        CsvWriter csv = ctx.csv("generate.csv", {"x_m", "y_m", "phi_rad", "freq_hz", "atten_db"});
        for (std::size_t i = 0; i < e.sweep_x.size(); ++i) {
            TargetState t = ctx.cfg.body_state();
            t.x = e.sweep_x[i];
            t.y = e.sweep_y;
            Rng rng = make_rng(ctx.stream(seed_stream::generate), i);
            for (const auto& p : gen.generate(t, e.generate_samples, rng)) emit_profiles(csv, geom, t, p.values);
        }
        csv.finish();
    });
    return 0;
}

inline int run_rss(const RunContext& ctx) {
    const auto& e = ctx.cfg.experiment;
    const std::vector<double> p0 = free_space_profile(ctx.geom(), ctx.cfg.budget);
    with_generator(ctx, [&](const auto& gen) {
        for (std::size_t i = 0; i < e.rss_positions.size(); ++i) {
            TargetState t = ctx.cfg.body_state();
            t.x = e.rss_positions[i][0];
            t.y = e.rss_positions[i][1];
            Rng rng = make_rng(ctx.stream(seed_stream::rss), i);
            const MarginalRss m = marginal_rss(gen, t, ctx.cfg.noise, p0, e.rss_samples, e.rss_frequency_index, rng);
            CsvWriter csv = ctx.csv("rss_" + std::to_string(i) + ".csv", {"bin_low_dbm", "bin_high_dbm", "mass"});
            for (const auto& b : m.histogram) csv.row(b.low, b.high, b.mass);
            csv.finish();
        }
    });
    return 0;
}

inline int run_localize(const RunContext& ctx) {
    const auto& e = ctx.cfg.experiment;
    const LinkGeometry geom = ctx.geom();
    const CandidateGrid grid = ctx.cfg.grid();
    const std::vector<double> p0 = free_space_profile(geom, ctx.cfg.budget);
    with_generator(ctx, [&](const auto& gen) {
        CsvWriter csv = ctx.csv("localize.csv", {"trial", "true_x_m", "true_y_m", "est_x_m", "est_y_m", "error_m"});
        for (std::size_t t = 0; t < e.localize_trials; ++t) {
            Rng rng = make_rng(ctx.stream(seed_stream::localize), t);
            const std::size_t cell = std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng);
            const TargetState truth = sample_state(grid.conditions[cell], ctx.cfg.uncertainty, geom.d, rng);
            const AttenuationProfile a = attenuation_profile(geom, truth, ctx.cfg.quadrature);
            const RssObservation obs = synth_rss_from_profile(p0, &a.values, ctx.cfg.noise, rng);
            const MapResult r = estimate_position(obs.values, grid, gen, scoring_noise(ctx.cfg.noise), p0, e.m_samples, rng);
            csv.row(t, truth.x, truth.y, r.x, r.y, std::hypot(r.x - truth.x, r.y - truth.y));
        }
        csv.finish();
    });
    return 0;
}

inline int run_detect(const RunContext& ctx) {
    const auto& e = ctx.cfg.experiment;
    DetectionConfig dc;
    dc.d_t = e.d_t;
    dc.trials = e.trials;
    dc.m_samples = e.m_samples;
    dc.truth_uncertainty = ctx.cfg.uncertainty;
    dc.synth_noise = ctx.cfg.noise;
    dc.score_noise = scoring_noise(ctx.cfg.noise);
    dc.budget = ctx.cfg.budget;
    dc.fresnel_freq_hz = e.fresnel_freq_hz;
    dc.latent_dim = ctx.cfg.cvae.latent_dim;
    dc.beta = ctx.cfg.cvae.beta;
    dc.threads = ctx.cfg.thread_count();
    with_generator(ctx, [&](const auto& gen) {
        const DetectionReport r = detection_experiment(ctx.cfg.grid(), gen, ctx.geom(), ctx.cfg.quadrature, dc,
                                                       ctx.stream(seed_stream::detect));
        CsvWriter csv = ctx.csv("detect.csv", {"Z", "beta", "d_T_m", "p_L0", "p_L1", "trials"});
        nlohmann::json classes = nlohmann::json::array();
        for (const ClassTally& t : r.l1) {
            csv.row(r.latent_dim, r.beta, t.d_t, r.p_l0(), t.probability(), t.trials);
            classes.push_back({{"d_T_m", t.d_t}, {"hits", t.hits}, {"trials", t.trials}, {"p_L1", t.probability()}});
        }
        csv.finish();
        write_json(ctx.file("detect.json"), {{"config_hash", ctx.hash},
                                             {"seed", ctx.cfg.seed},
                                             {"generator", ctx.generator},
                                             {"Z", r.latent_dim},
                                             {"beta", r.beta},
                                             {"L0", {{"hits", r.l0.hits}, {"trials", r.l0.trials}, {"p_L0", r.p_l0()}}},
                                             {"L1", classes}});
    });
    return 0;
}

inline int run_bench(const RunContext& ctx) {
    const auto& b = ctx.cfg.bench;
    const ExperimentConfig& cfg = ctx.cfg;
    std::vector<CvaeModel> models;
    const auto trained = ctx.resolve(cfg.cvae.model_path);
    for (std::size_t z : b.latent_dims) {
        if (z == cfg.cvae.latent_dim && std::filesystem::exists(trained)) {
            models.push_back(load_model(trained, cfg.geometry.freq_count));
            continue;
        }
        // Timing does not depend on the weights, so an untrained model stands in.
        Rng init = make_rng(ctx.stream(seed_stream::bench), z);
        Normalization norm;
        norm.cond_half_range.fill(1.0);
        norm.profile_mean.assign(cfg.geometry.freq_count, 0.0);
        norm.profile_scale.assign(cfg.geometry.freq_count, 1.0);
        models.push_back(make_cvae(cfg.geometry.freq_count, z, cfg.cvae.beta, cfg.cvae.recon_sigma,
                                   nn::activation_from_string(cfg.cvae.activation), norm, init));
    }
    std::vector<const CvaeModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);

    ExperimentConfig omni = cfg, directional = cfg;
    omni.geometry.antenna = "omni";
    directional.geometry.antenna = "directional";
    BenchOptions opt;
    opt.cvae_samples = b.cvae_samples;
    opt.quad_samples = b.quad_samples;
    opt.warmup = b.warmup;
    opt.tolerances = b.tolerances;
    opt.seed = ctx.stream(seed_stream::bench);
    const BenchReport r = bench_generation(ptrs, omni.link(), directional.link(), cfg.grid(), cfg.quadrature, opt);

    CsvWriter csv = ctx.csv("bench.csv", {"config", "sec_per_sample", "ratio_vs_em"});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : r.entries) {
        csv.row(e.config, e.mean_sec, e.ratio_vs_em);
        rows.push_back({{"config", e.config},
                        {"samples", e.samples},
                        {"mean_sec_per_sample", e.mean_sec},
                        {"median_sec_per_sample", e.median_sec},
                        {"ratio_vs_em", e.ratio_vs_em},
                        {"reference_sec_per_sample", e.reference_sec ? nlohmann::json(*e.reference_sec) : nlohmann::json()}});
        std::fprintf(stderr, "  %-26s %.3e s/sample  ratio %8.1f  reference %s\n", e.config.c_str(), e.mean_sec,
                     e.ratio_vs_em, e.reference_sec ? CsvWriter::cell(*e.reference_sec).c_str() : "-");
    }
    csv.finish();
    write_json(ctx.file("bench.json"),
               {{"config_hash", ctx.hash}, {"timer_granularity_sec", r.timer_granularity_sec}, {"entries", rows}});
    return 0;
}

inline int run_fresnel_map(const RunContext& ctx) {
    const LinkGeometry geom = ctx.geom();
    const CandidateGrid grid = ctx.cfg.grid();
    const auto& e = ctx.cfg.experiment;
    CsvWriter csv = ctx.csv("fresnel_map.csv", {"k", "x_m", "y_m", "d_T_m", "in_fresnel", "label"});
    for (double d_t : e.d_t)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto& s = grid.state(k);
            const RegionLabel l = classify_region(geom, e.fresnel_freq_hz, s.x, s.y, d_t);
            csv.row(k, s.x, s.y, d_t, in_first_fresnel(geom, e.fresnel_freq_hz, s.x, s.y) ? 1 : 0, to_string(l.kind));
        }
    csv.finish();
    return 0;
}

} // namespace detail

inline const std::vector<std::string>& cli_subcommands() {
    static const std::vector<std::string> names{"simulate", "dataset", "train",  "generate",   "rss",
                                                "localize", "detect",  "bench",  "fresnel-map"};
    return names;
}

/// Entry point of the command-line tool. Returns 0 on success, 2 on usage or
/// configuration errors and 1 on runtime failures.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"rfsense: diffraction body model, generative surrogate and passive RF localization", "rfsense"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string generator = "cvae";
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "master seed (overrides the configuration)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--generator", generator, "profile source for generate/rss/localize/detect")
        ->check(CLI::IsMember({"cvae", "oracle"}));
    app.fallthrough();

    const std::vector<std::pair<std::string, std::string>> help{
        {"simulate", "diffraction attenuation along the configured sweep"},
        {"dataset", "build the training set"},
        {"train", "train the C-VAE on the dataset"},
        {"generate", "draw attenuation profiles along the sweep"},
        {"rss", "generator-marginalized RSS histograms"},
        {"localize", "MAP localization of synthetic observations"},
        {"detect", "region detection experiment"},
        {"bench", "per-sample generation timing"},
        {"fresnel-map", "region labels of the candidate grid"},
    };
    for (const auto& [name, text] : help) app.add_subcommand(name, text);

    if (argc <= 1) {
        err << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    detail::RunContext ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.generator = generator;
    ctx.out = out_dir;
    try {
        ctx.cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed) ctx.cfg.seed = *seed;
        ctx.cfg.validate();
    } catch (const std::exception& e) {
        err << "error: invalid configuration: " << e.what() << "\n";
        return 2;
    }
    ctx.hash = config_hash(ctx.cfg);

    try {
        std::filesystem::create_directories(ctx.out);
        detail::write_resolved(ctx);
        const std::string& c = ctx.command;
        if (c == "simulate") return detail::run_simulate(ctx);
        if (c == "dataset") return detail::run_dataset(ctx);
        if (c == "train") return detail::run_train(ctx);
        if (c == "generate") return detail::run_generate(ctx);
        if (c == "rss") return detail::run_rss(ctx);
        if (c == "localize") return detail::run_localize(ctx);
        if (c == "detect") return detail::run_detect(ctx);
        if (c == "bench") return detail::run_bench(ctx);
        if (c == "fresnel-map") return detail::run_fresnel_map(ctx);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: unknown subcommand\n";
    return 2;
}

} // namespace rfsense

#endif
