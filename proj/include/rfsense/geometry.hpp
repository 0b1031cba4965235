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

#ifndef RFSENSE_GEOMETRY_HPP
#define RFSENSE_GEOMETRY_HPP

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace rfsense {

inline constexpr double speed_of_light = 299'792'458.0;

// Link frame: origin at the TX antenna, first axis toward the RX along the
// line of sight, second axis horizontal-transverse, third axis up. The floor
// lies at vertical = -h.
struct Point3 {
    double along = 0.0;
    double transverse = 0.0;
    double vertical = 0.0;
};

struct AntennaPattern {
    enum class Kind { omnidirectional, directional };

    Kind kind = Kind::omnidirectional;
    double gain_exponent = 0.0; ///< n in the cos^n field-gain law
    double max_gain_dbi = 0.0;

    static AntennaPattern omni(double gain_dbi = 0.0) { return {Kind::omnidirectional, 0.0, gain_dbi}; }
    static AntennaPattern directional(double exponent, double gain_dbi) {
        return {Kind::directional, exponent, gain_dbi};
    }

    /// Relative field gain in (0, 1] toward a direction making an angle with
    /// boresight whose cosine is `cos_angle`; zero behind the antenna.
    double relative_field_gain(double cos_angle) const {
        if (kind == Kind::omnidirectional) return 1.0;
        if (cos_angle <= 0.0) return 0.0;
        return std::pow(std::min(cos_angle, 1.0), gain_exponent);
    }

    void validate() const {
        if (!(gain_exponent >= 0.0) || !std::isfinite(gain_exponent))
            throw DomainError("antenna gain exponent must be finite and >= 0");
        if (!std::isfinite(max_gain_dbi)) throw DomainError("antenna gain must be finite");
    }
};

struct LinkGeometry {
    double d = 4.0;  ///< link length (m)
    double h = 0.99; ///< LoS height above the floor (m)
    std::vector<double> freq_grid;
    AntennaPattern tx_pattern;
    AntennaPattern rx_pattern;

    std::size_t frequency_count() const { return freq_grid.size(); }

    void validate() const {
        if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("link length must be positive");
        if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("link height must be positive");
        if (freq_grid.empty()) throw DomainError("frequency grid is empty");
        for (std::size_t i = 0; i < freq_grid.size(); ++i) {
            if (!(freq_grid[i] > 0.0) || !std::isfinite(freq_grid[i]))
                throw DomainError("frequency grid entries must be positive");
            if (i > 0 && !(freq_grid[i] > freq_grid[i - 1]))
                throw DomainError("frequency grid must be strictly increasing");
        }
        tx_pattern.validate();
        rx_pattern.validate();
    }
};

/// `count` evenly spaced frequencies covering [start, stop]; a single point sits at `start`.
inline std::vector<double> band_grid(double start_hz, double stop_hz, std::size_t count) {
    if (count == 0) throw DomainError("band grid needs at least one frequency");
    if (count > 1 && !(stop_hz > start_hz)) throw DomainError("band stop must exceed band start");
    std::vector<double> grid(count);
    const double step = count > 1 ? (stop_hz - start_hz) / static_cast<double>(count - 1) : 0.0;
    for (std::size_t i = 0; i < count; ++i) grid[i] = start_hz + step * static_cast<double>(i);
    return grid;
}

/// Body state: barycenter projection (x along LoS from TX, y cross-LoS),
/// orientation w.r.t. the LoS and the sheet dimensions.
struct TargetState {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double h_s = 1.80;
    double w_s1 = 0.55;
    double w_s2 = 0.25;

    friend bool operator==(const TargetState&, const TargetState&) = default;

    void validate() const {
        if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("target position must be finite");
        if (!(h_s > 0.0)) throw DomainError("sheet height must be positive");
        if (!(w_s2 > 0.0) || !(w_s1 >= w_s2)) throw DomainError("sheet widths must satisfy w_s1 >= w_s2 > 0");
        constexpr double half_pi = std::numbers::pi / 2.0;
        if (!(phi >= -half_pi && phi <= half_pi)) throw DomainError("orientation must lie in [-pi/2, pi/2]");
    }
};

inline double wavelength(double freq_hz) {
    if (!(freq_hz > 0.0) || !std::isfinite(freq_hz)) throw DomainError("frequency must be positive and finite");
    return speed_of_light / freq_hz;
}

struct PathLengths {
    double r1 = 0.0; ///< to TX
    double r2 = 0.0; ///< to RX
};

inline PathLengths path_lengths(const LinkGeometry& geom, const Point3& p) {
    const double rx_along = geom.d - p.along;
    const double cross = p.transverse * p.transverse + p.vertical * p.vertical;
    return {std::sqrt(p.along * p.along + cross), std::sqrt(rx_along * rx_along + cross)};
}

/// First Fresnel zone membership of a position at LoS height (strict interior).
inline bool in_first_fresnel(const LinkGeometry& geom, double freq_hz, double x, double y) {
    const double lambda = wavelength(freq_hz);
    const auto [r1, r2] = path_lengths(geom, {x, y, 0.0});
    return r1 + r2 < geom.d + lambda / 2.0;
}

struct RegionLabel {
    enum class Kind { outside_fresnel, near_antenna, unassigned };

    Kind kind = Kind::unassigned;
    double d_t = 0.0;

    bool is_l0() const { return kind == Kind::outside_fresnel; }
    bool is_l1() const { return kind == Kind::near_antenna; }
    friend bool operator==(const RegionLabel&, const RegionLabel&) = default;
};

inline std::string to_string(RegionLabel::Kind kind) {
    switch (kind) {
    case RegionLabel::Kind::outside_fresnel: return "L0";
    case RegionLabel::Kind::near_antenna: return "L1";
    case RegionLabel::Kind::unassigned: return "unassigned";
    }
    return "unassigned";
}

/// L0 outside the first Fresnel ellipsoid; L1(d_T) inside it and within d_T
/// of the nearer antenna; everything else is unassigned.
inline RegionLabel classify_region(const LinkGeometry& geom, double freq_hz, double x, double y, double d_t) {
    if (!(d_t > 0.0 && d_t < geom.d)) throw DomainError("d_T must lie in (0, d)");
    if (!in_first_fresnel(geom, freq_hz, x, y)) return {RegionLabel::Kind::outside_fresnel, d_t};
    const auto [r1, r2] = path_lengths(geom, {x, y, 0.0});
    if (std::min(r1, r2) <= d_t) return {RegionLabel::Kind::near_antenna, d_t};
    return {RegionLabel::Kind::unassigned, d_t};
}

} // namespace rfsense

#endif
