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

#ifndef RFSENSE_PERSISTENCE_HPP
#define RFSENSE_PERSISTENCE_HPP

#include "cvae.hpp"
#include "error.hpp"
#include "prior_sampler.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace rfsense {

// Binary containers (native little-endian):
//   dataset: magic[8] "RFSDSET\0", u32 version, u32 F, u64 N, N x (6 + F) f64
//   model:   magic[8] "RFSMODL\0", u32 version, u32 F, u32 Z, u32 activation,
//            u32 descriptor length, descriptor bytes,
//            u64 encoder count, f64[], u64 decoder count, f64[]
// Each has a JSON sidecar (<path>.json) with normalization statistics.

inline constexpr std::uint32_t dataset_format_version = 1;
inline constexpr std::uint32_t model_format_version = 1;
inline constexpr std::array<char, 8> dataset_magic{'R', 'F', 'S', 'D', 'S', 'E', 'T', '\0'};
inline constexpr std::array<char, 8> model_magic{'R', 'F', 'S', 'M', 'O', 'D', 'L', '\0'};

inline std::filesystem::path sidecar_path(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".json");
}

inline nlohmann::json to_json(const Normalization& n) {
    return {{"cond_center", n.cond_center},
            {"cond_half_range", n.cond_half_range},
            {"profile_mean", n.profile_mean},
            {"profile_scale", n.profile_scale}};
}

inline Normalization normalization_from_json(const nlohmann::json& j) {
    Normalization n;
    n.cond_center = j.at("cond_center").get<ConditionVector>();
    n.cond_half_range = j.at("cond_half_range").get<ConditionVector>();
    n.profile_mean = j.at("profile_mean").get<std::vector<double>>();
    n.profile_scale = j.at("profile_scale").get<std::vector<double>>();
    if (n.profile_mean.size() != n.profile_scale.size()) throw ConfigError("normalization vectors differ in length");
    return n;
}

namespace detail {

class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& p) : out_(p, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open " + p.string() + " for writing");
    }
    template <class T>
    void put(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }
    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed");
    }

private:
    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& p) : in_(p, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open " + p.string());
    }
    template <class T>
    T get(const char* what) {
        T v{};
        bytes(&v, sizeof(T), what);
        return v;
    }
    void bytes(void* data, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        const auto got = static_cast<std::uint64_t>(in_.gcount());
        if (got != n) throw FormatError(std::string("truncated file while reading ") + what, offset_ + got);
        offset_ += n;
    }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload", offset_);
    }
    std::uint64_t offset() const { return offset_; }

private:
    std::ifstream in_;
    std::uint64_t offset_ = 0;
};

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

template <std::size_t N>
void check_magic(BinaryReader& r, const std::array<char, N>& magic, const char* kind) {
    std::array<char, N> got{};
    r.bytes(got.data(), N, "magic");
    if (got != magic) throw FormatError(std::string("not a ") + kind + " file: bad magic bytes", 0);
}

} // namespace detail

inline void save_dataset(const std::filesystem::path& path, const TrainingSet& set) {
    const std::size_t f = set.profile_length();
    detail::BinaryWriter w(path);
    w.bytes(dataset_magic.data(), dataset_magic.size());
    w.put<std::uint32_t>(dataset_format_version);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(f));
    w.put<std::uint64_t>(set.records.size());
    for (const auto& r : set.records) {
        if (r.profile.size() != f) throw ShapeError("record profile length differs from the dataset F");
        w.bytes(r.condition.data(), sizeof(double) * condition_dim);
        w.bytes(r.profile.data(), sizeof(double) * f);
    }
    w.finish();
    detail::write_json(sidecar_path(path), {{"format", "rfsense-dataset"},
                                            {"version", dataset_format_version},
                                            {"profile_length", f},
                                            {"records", set.records.size()},
                                            {"normalization", to_json(set.normalization)}});
}

inline TrainingSet load_dataset(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    detail::check_magic(r, dataset_magic, "dataset");
    const auto version_offset = r.offset();
    const auto version = r.get<std::uint32_t>("version");
    if (version != dataset_format_version)
        throw FormatError("unsupported dataset version " + std::to_string(version), version_offset);
    const auto f = r.get<std::uint32_t>("profile length");
    const auto n = r.get<std::uint64_t>("record count");
    TrainingSet set;
    set.records.resize(n);
    for (auto& rec : set.records) {
        r.bytes(rec.condition.data(), sizeof(double) * condition_dim, "record condition");
        rec.profile.resize(f);
        r.bytes(rec.profile.data(), sizeof(double) * f, "record profile");
    }
    r.expect_end();
    const nlohmann::json side = detail::read_json(sidecar_path(path));
    if (side.value("version", 0u) != dataset_format_version || side.value("profile_length", 0u) != f ||
        side.value("records", std::uint64_t{0}) != n)
        throw FormatError("dataset sidecar does not match the binary payload", 0);
    set.normalization = normalization_from_json(side.at("normalization"));
    if (set.normalization.profile_length() != f) throw FormatError("sidecar normalization length differs from F", 0);
    return set;
}

inline void save_model(const std::filesystem::path& path, const CvaeModel& m) {
    const std::string arch = m.architecture();
    detail::BinaryWriter w(path);
    w.bytes(model_magic.data(), model_magic.size());
    w.put<std::uint32_t>(model_format_version);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.profile_length));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.latent_dim));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.activation));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(arch.size()));
    w.bytes(arch.data(), arch.size());
    for (const nn::Network* net : {&m.encoder, &m.decoder}) {
        w.put<std::uint64_t>(net->parameter_count());
        w.bytes(net->parameters().data(), sizeof(double) * net->parameter_count());
    }
    w.finish();
    detail::write_json(sidecar_path(path), {{"format", "rfsense-cvae"},
                                            {"version", model_format_version},
                                            {"architecture", arch},
                                            {"profile_length", m.profile_length},
                                            {"latent_dim", m.latent_dim},
                                            {"beta", m.beta},
                                            {"recon_sigma", m.recon_sigma},
                                            {"activation", nn::to_string(m.activation)},
                                            {"encoder_parameters", m.encoder.parameter_count()},
                                            {"decoder_parameters", m.decoder.parameter_count()},
                                            {"normalization", to_json(m.normalization)}});
}

/// Loads a model; when `expected_profile_length` is given, a model built for
/// another frequency grid is rejected.
inline CvaeModel load_model(const std::filesystem::path& path, std::optional<std::size_t> expected_profile_length = {}) {
    detail::BinaryReader r(path);
    detail::check_magic(r, model_magic, "model");
    const auto version_offset = r.offset();
    const auto version = r.get<std::uint32_t>("version");
    if (version != model_format_version)
        throw FormatError("unsupported model version " + std::to_string(version), version_offset);
    const auto f = r.get<std::uint32_t>("profile length");
    const auto z = r.get<std::uint32_t>("latent dimension");
    const auto act_code = r.get<std::uint32_t>("activation");
    if (act_code > static_cast<std::uint32_t>(nn::Activation::tanh)) throw FormatError("unknown activation code", r.offset() - 4);
    if (expected_profile_length && *expected_profile_length != f)
        throw ShapeError("model was trained for F=" + std::to_string(f) + " frequencies, configuration has F=" +
                         std::to_string(*expected_profile_length));
    const auto arch_len = r.get<std::uint32_t>("descriptor length");
    std::string arch(arch_len, '\0');
    r.bytes(arch.data(), arch_len, "architecture descriptor");

    CvaeModel m;
    m.profile_length = f;
    m.latent_dim = z;
    m.activation = static_cast<nn::Activation>(act_code);
    m.encoder = make_encoder(f, z, m.activation);
    m.decoder = make_decoder(f, z, m.activation);
    if (arch != m.architecture()) throw FormatError("architecture mismatch: file has '" + arch + "'", 24);
    for (nn::Network* net : {&m.encoder, &m.decoder}) {
        const auto count_offset = r.offset();
        const auto count = r.get<std::uint64_t>("parameter count");
        if (count != net->parameter_count()) throw FormatError("parameter count mismatch", count_offset);
        std::vector<double> params(count);
        r.bytes(params.data(), sizeof(double) * count, "parameters");
        net->set_parameters(params);
    }
    r.expect_end();
    const nlohmann::json side = detail::read_json(sidecar_path(path));
    if (side.value("architecture", std::string{}) != arch) throw FormatError("model sidecar architecture mismatch", 0);
    m.beta = side.at("beta").get<double>();
    m.recon_sigma = side.at("recon_sigma").get<double>();
    m.normalization = normalization_from_json(side.at("normalization"));
    if (m.normalization.profile_length() != f) throw FormatError("sidecar normalization length differs from F", 0);
    return m;
}

} // namespace rfsense

#endif
