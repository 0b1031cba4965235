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

#ifndef RFSENSE_GENERATORS_HPP
#define RFSENSE_GENERATORS_HPP

#include "cvae.hpp"
#include "diffraction.hpp"
#include "geometry.hpp"
#include "rng.hpp"

#include <concepts>
#include <map>
#include <vector>

namespace rfsense {

/// Source of attenuation profiles conditioned on a nominal target state.
template <class G>
concept ProfileGenerator = requires(const G& g, const TargetState& t, std::size_t n, Rng& rng) {
    { g.generate(t, n, rng) } -> std::same_as<std::vector<AttenuationProfile>>;
};

class CvaeGenerator {
public:
    explicit CvaeGenerator(const CvaeModel& model) : model_(&model) {}

    std::vector<AttenuationProfile> generate(const TargetState& condition, std::size_t n, Rng& rng) const {
        return rfsense::generate(*model_, condition, n, rng);
    }

    const CvaeModel& model() const { return *model_; }

private:
    const CvaeModel* model_;
};

/// Deterministic stand-in that returns the diffraction profile of the nominal
/// state n times. Profiles of the states passed at construction are computed
/// once; others on demand.
class OracleGenerator {
public:
    OracleGenerator(LinkGeometry geom, QuadratureConfig quad, const std::vector<TargetState>& precompute = {})
        : geom_(std::move(geom)), quad_(quad) {
        for (const TargetState& t : precompute) cache_.emplace(key(t), attenuation_profile(geom_, t, quad_));
    }

    std::vector<AttenuationProfile> generate(const TargetState& condition, std::size_t n, Rng&) const {
        const auto it = cache_.find(key(condition));
        const AttenuationProfile p = it != cache_.end() ? it->second : attenuation_profile(geom_, condition, quad_);
        return std::vector<AttenuationProfile>(n, p);
    }

private:
    static ConditionVector key(const TargetState& t) { return condition_vector(t); }

    LinkGeometry geom_;
    QuadratureConfig quad_;
    std::map<ConditionVector, AttenuationProfile> cache_;
};

static_assert(ProfileGenerator<CvaeGenerator>);
static_assert(ProfileGenerator<OracleGenerator>);

} // namespace rfsense

#endif
