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

#include <rfsense/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rfsense;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rfsense_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "rfsense");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST(Config, DefaultsValidateAndRoundTrip) {
    const ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    const ExperimentConfig back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(c.link().freq_grid.size(), 16u);
    EXPECT_EQ(c.grid().size(), 75u);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cvae": {"latnt_dim": 8}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"network": {}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cvae": 3})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cvae": {"latent_dim": "x"}})")), ConfigError);
}

TEST(Config, PartialOverride) {
    const auto c = config_from_json(nlohmann::json::parse(R"({"cvae": {"latent_dim": 32}, "seed": 9})"));
    EXPECT_EQ(c.cvae.latent_dim, 32u);
    EXPECT_EQ(c.cvae.beta, ExperimentConfig{}.cvae.beta);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.train_config().latent_dim, 32u);
    EXPECT_EQ(c.train_config().seed, derive_seed(9, 2));
}

TEST(Config, ValidationNamesTheBlock) {
    ExperimentConfig c;
    c.geometry.freq_count = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.geometry.antenna = "yagi";
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.noise.sigma0 = 0.0;
    c.noise.sigma_t = 0.0;
    EXPECT_NO_THROW(c.validate());
    c.noise.sigma0 = 3.0;
    try {
        c.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("noise"), std::string::npos);
    }
    c = {};
    c.experiment.d_t = {5.0};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, HashIgnoresThreadsOnly) {
    ExperimentConfig a, b;
    b.threads = 7;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Fnv1a, KnownVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Cli, NoArgumentsPrintsUsage) {
    std::string err;
    EXPECT_EQ(run({}, &err), 2);
    EXPECT_NE(err.find("fresnel-map"), std::string::npos);
}

TEST(Cli, UnknownSubcommandOrFlag) {
    EXPECT_EQ(run({"teleport"}), 2);
    EXPECT_EQ(run({"simulate", "--bogus"}), 2);
    EXPECT_EQ(run({"simulate", "--generator", "gan"}), 2);
}

TEST(Cli, BadConfigurationExitsTwo) {
    const fs::path dir = temp_dir("badcfg");
    write_file(dir / "c.json", R"({"geometry": {"d": -1}})");
    std::string err;
    EXPECT_EQ(run({"fresnel-map", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()}, &err), 2);
    EXPECT_NE(err.find("geometry"), std::string::npos);
    write_file(dir / "u.json", R"({"geometry": {"dd": 1}})");
    EXPECT_EQ(run({"fresnel-map", "--config", (dir / "u.json").string(), "--out", (dir / "o").string()}), 2);
    EXPECT_EQ(run({"fresnel-map", "--config", (dir / "absent.json").string()}), 2);
}

TEST(Cli, MissingModelExitsTwo) {
    const fs::path dir = temp_dir("nomodel");
    std::string err;
    EXPECT_EQ(run({"generate", "--out", dir.string()}, &err), 2);
    EXPECT_NE(err.find("train"), std::string::npos);
}

TEST(Cli, FresnelMapDeterministic) {
    const fs::path dir = temp_dir("fmap");
    ASSERT_EQ(run({"fresnel-map", "--seed", "3", "--out", (dir / "a").string()}), 0);
    ASSERT_EQ(run({"fresnel-map", "--seed", "3", "--out", (dir / "b").string()}), 0);
    const std::string a = slurp(dir / "a" / "fresnel_map.csv");
    EXPECT_EQ(a, slurp(dir / "b" / "fresnel_map.csv"));
    EXPECT_EQ(a.rfind("# config_hash=", 0), 0u);
    EXPECT_NE(a.find("k,x_m,y_m,d_T_m,in_fresnel,label"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "a" / "fresnel-map.resolved.json"));
}

TEST(Cli, SimulateSmallConfig) {
    const fs::path dir = temp_dir("sim");
    write_file(dir / "c.json",
               R"({"geometry": {"freq_count": 2}, "experiment": {"sweep_x": [1.0, 2.0], "samples_per_position": 2}})");
    const std::string cfg = (dir / "c.json").string();
    ASSERT_EQ(run({"simulate", "--config", cfg, "--seed", "5", "--out", (dir / "a").string()}), 0);
    ASSERT_EQ(run({"simulate", "--config", cfg, "--seed", "5", "--out", (dir / "b").string()}), 0);
    EXPECT_EQ(slurp(dir / "a" / "simulate.csv"), slurp(dir / "b" / "simulate.csv"));
    EXPECT_EQ(slurp(dir / "a" / "simulate_mean.csv"), slurp(dir / "b" / "simulate_mean.csv"));
    std::istringstream lines(slurp(dir / "a" / "simulate.csv"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 2u + 2u * 2u * 2u);
}
