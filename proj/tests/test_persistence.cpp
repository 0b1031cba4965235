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

#include <rfsense/persistence.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace rfsense;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rfsense_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

TrainingSet small_set(std::size_t f, std::size_t n) {
    TrainingSet s;
    Rng rng(2);
    for (std::size_t i = 0; i < n; ++i) {
        TrainingRecord r{{0.5 + static_cast<double>(i), 0.25, -0.1, 1.8, 0.55, 0.25}, std::vector<double>(f)};
        for (double& v : r.profile) v = 5.0 * standard_normal(rng);
        s.records.push_back(std::move(r));
    }
    s.normalization = compute_normalization(s.records, ConditionRanges::for_link(4.0));
    return s;
}

CvaeModel small_model(std::size_t f, std::size_t z) {
    Rng rng(3);
    CvaeModel m = make_cvae(f, z, 0.07, 0.4, nn::Activation::tanh, small_set(f, 4).normalization, rng);
    for (double& p : m.encoder.mutable_parameters()) p += 0.01 * standard_normal(rng);
    return m;
}

void truncate(const fs::path& p, std::uintmax_t size) { fs::resize_file(p, size); }

} // namespace

TEST(Dataset, RoundTrip) {
    const fs::path dir = temp_dir("ds");
    const TrainingSet s = small_set(3, 5);
    save_dataset(dir / "d.bin", s);
    EXPECT_TRUE(fs::exists(dir / "d.bin.json"));
    EXPECT_EQ(fs::file_size(dir / "d.bin"), 24u + 5u * (6u + 3u) * 8u);
    EXPECT_EQ(load_dataset(dir / "d.bin"), s);
}

TEST(Dataset, BadMagic) {
    const fs::path dir = temp_dir("ds_magic");
    save_dataset(dir / "d.bin", small_set(2, 2));
    {
        std::fstream f(dir / "d.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
    }
    try {
        load_dataset(dir / "d.bin");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 0u);
    }
}

TEST(Dataset, TruncationReportsOffset) {
    const fs::path dir = temp_dir("ds_trunc");
    save_dataset(dir / "d.bin", small_set(2, 3));
    // Header 24 bytes, records 64 bytes each; cut 10 bytes into the second record.
    truncate(dir / "d.bin", 24 + 64 + 10);
    try {
        load_dataset(dir / "d.bin");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 98u);
    }
}

TEST(Dataset, TrailingBytesAndSidecarMismatch) {
    const fs::path dir = temp_dir("ds_trail");
    const TrainingSet s = small_set(2, 2);
    save_dataset(dir / "d.bin", s);
    {
        std::ofstream f(dir / "d.bin", std::ios::app | std::ios::binary);
        f.put('x');
    }
    EXPECT_THROW(load_dataset(dir / "d.bin"), FormatError);
    save_dataset(dir / "d.bin", s);
    save_dataset(dir / "e.bin", small_set(2, 3));
    fs::copy_file(dir / "e.bin.json", dir / "d.bin.json", fs::copy_options::overwrite_existing);
    EXPECT_THROW(load_dataset(dir / "d.bin"), FormatError);
}

TEST(Dataset, UnsupportedVersion) {
    const fs::path dir = temp_dir("ds_ver");
    save_dataset(dir / "d.bin", small_set(2, 2));
    {
        std::fstream f(dir / "d.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const std::uint32_t v = 99;
        f.write(reinterpret_cast<const char*>(&v), 4);
    }
    try {
        load_dataset(dir / "d.bin");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 8u);
    }
}

TEST(Model, RoundTripGeneratesIdentically) {
    const fs::path dir = temp_dir("model");
    const CvaeModel m = small_model(5, 3);
    save_model(dir / "m.bin", m);
    const CvaeModel r = load_model(dir / "m.bin");
    EXPECT_EQ(r.architecture(), m.architecture());
    EXPECT_EQ(r.beta, 0.07);
    EXPECT_EQ(r.recon_sigma, 0.4);
    EXPECT_EQ(r.normalization, m.normalization);
    EXPECT_TRUE(std::equal(m.encoder.parameters().begin(), m.encoder.parameters().end(), r.encoder.parameters().begin()));
    const TargetState t{1.0, 0.0, 0.0, 1.8, 0.55, 0.25};
    Rng a(6), b(6);
    const auto ga = generate(m, t, 4, a), gb = generate(r, t, 4, b);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ga[i].values, gb[i].values);
}

TEST(Model, WrongProfileLength) {
    const fs::path dir = temp_dir("model_f");
    save_model(dir / "m.bin", small_model(5, 2));
    EXPECT_NO_THROW(load_model(dir / "m.bin", 5));
    EXPECT_THROW(load_model(dir / "m.bin", 16), ShapeError);
}

TEST(Model, TruncatedParameters) {
    const fs::path dir = temp_dir("model_trunc");
    save_model(dir / "m.bin", small_model(4, 2));
    const auto size = fs::file_size(dir / "m.bin");
    truncate(dir / "m.bin", size - 3);
    try {
        load_model(dir / "m.bin");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), size - 3);
    }
}

TEST(Model, BadMagicAndMissingFile) {
    const fs::path dir = temp_dir("model_magic");
    save_dataset(dir / "d.bin", small_set(2, 2));
    EXPECT_THROW(load_model(dir / "d.bin"), FormatError);
    EXPECT_THROW(load_model(dir / "absent.bin"), std::runtime_error);
}
