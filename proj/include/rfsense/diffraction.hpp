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

#ifndef RFSENSE_DIFFRACTION_HPP
#define RFSENSE_DIFFRACTION_HPP

#include "error.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace rfsense {

struct QuadratureConfig {
    double abs_tol = 1e-3; ///< on the complex field ratio
    int max_depth = 16;
    int init_tiles_x = 2; ///< transverse
    int init_tiles_y = 4; ///< vertical

    void validate() const {
        if (!(abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be positive");
        if (max_depth < 1) throw DomainError("quadrature max_depth must be >= 1");
        if (init_tiles_x < 1 || init_tiles_y < 1) throw DomainError("quadrature init_tiles must be >= 1x1");
    }
};

struct AttenuationProfile {
    std::vector<double> values; ///< excess attenuation (dB) per grid frequency
    TargetState condition;
};

/// Transverse breadth of an elliptical cylinder with axes w1, w2 seen at angle phi.
inline double effective_width(double w_s1, double w_s2, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return std::sqrt(w_s1 * w_s1 * c * c + w_s2 * w_s2 * s * s);
}

/// The absorbing sheet sits in the plane transverse to the LoS at the target
/// barycenter, standing on the floor.
struct SheetPlacement {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double bottom = 0.0; ///< -h
    double top = 0.0;    ///< h_S - h

    static SheetPlacement of(const LinkGeometry& geom, const TargetState& t) {
        return {t.x, t.y, effective_width(t.w_s1, t.w_s2, t.phi), -geom.h, t.h_s - geom.h};
    }

    Rect rect() const { return {y - width / 2.0, y + width / 2.0, bottom, top}; }
};

namespace detail {

inline void check_in_slab(const LinkGeometry& geom, double x) {
    if (!(x > 0.0 && x < geom.d)) throw DomainError("sheet must lie strictly between TX and RX (0 < x < d)");
}

/// Sheet integral scaled by d/lambda, so the field ratio is 1 - j * result.
inline TiledResult sheet_integral(const LinkGeometry& geom, const SheetPlacement& sheet, double freq_hz,
                                  const QuadratureConfig& quad) {
    const double lambda = wavelength(freq_hz);
    const double k = 2.0 * std::numbers::pi / lambda;
    const double scale = geom.d / lambda;
    const double x1 = sheet.x;
    const double x2 = geom.d - sheet.x;
    const double x1sq = x1 * x1, x2sq = x2 * x2;
    const double d = geom.d;
    const bool omni = geom.tx_pattern.kind == AntennaPattern::Kind::omnidirectional &&
                      geom.rx_pattern.kind == AntennaPattern::Kind::omnidirectional;
    const TiledOptions opt{quad.abs_tol, quad.max_depth, quad.init_tiles_x, quad.init_tiles_y};

    if (omni) {
        auto integrand = [=](double u, double v) {
            const double cross = u * u + v * v;
            const double r1 = std::sqrt(x1sq + cross), r2 = std::sqrt(x2sq + cross);
            const double phase = k * (r1 + r2 - d);
            const double amp = scale / (r1 * r2);
            return std::complex<double>(amp * std::cos(phase), -amp * std::sin(phase));
        };
        return integrate_tiled(integrand, sheet.rect(), opt);
    }
    const AntennaPattern tx = geom.tx_pattern, rx = geom.rx_pattern;
    auto integrand = [=](double u, double v) {
        const double cross = u * u + v * v;
        const double r1 = std::sqrt(x1sq + cross), r2 = std::sqrt(x2sq + cross);
        const double phase = k * (r1 + r2 - d);
        const double gain = tx.relative_field_gain(x1 / r1) * rx.relative_field_gain(x2 / r2);
        const double amp = gain * scale / (r1 * r2);
        return std::complex<double>(amp * std::cos(phase), -amp * std::sin(phase));
    };
    return integrate_tiled(integrand, sheet.rect(), opt);
}

} // namespace detail

/// Field ratio E_theta / E_0 behind an absorbing sheet: one minus the
/// obstructed Huygens sources, weighted by the antenna field gains toward each
/// source (E_0 uses boresight gains).
inline std::complex<double> field_ratio(const LinkGeometry& geom, const SheetPlacement& sheet, double freq_hz,
                                        const QuadratureConfig& quad) {
    detail::check_in_slab(geom, sheet.x);
    if (!(sheet.width > 0.0) || !(sheet.top > sheet.bottom)) return {1.0, 0.0};
    const TiledResult r = detail::sheet_integral(geom, sheet, freq_hz, quad);
    const std::complex<double> ratio = 1.0 - std::complex<double>(0.0, 1.0) * r.value;
    if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag()))
        throw QuadratureError("non-finite diffraction integral", ratio, r.error);
    if (!r.converged)
        throw QuadratureError("quadrature tolerance not reached at max_depth", ratio, r.error);
    return ratio;
}

inline std::complex<double> field_ratio(const LinkGeometry& geom, const TargetState& target, double freq_hz,
                                        const QuadratureConfig& quad) {
    return field_ratio(geom, SheetPlacement::of(geom, target), freq_hz, quad);
}

inline double attenuation_db(std::complex<double> ratio) {
    const double power = std::norm(ratio);
    if (!(power > 0.0)) throw DomainError("field ratio vanishes; attenuation is infinite");
    return -10.0 * std::log10(power);
}

inline double excess_attenuation(const LinkGeometry& geom, const TargetState& target, double freq_hz,
                                 const QuadratureConfig& quad) {
    return attenuation_db(field_ratio(geom, target, freq_hz, quad));
}

inline AttenuationProfile attenuation_profile(const LinkGeometry& geom, const TargetState& target,
                                              const QuadratureConfig& quad) {
    AttenuationProfile profile;
    profile.condition = target;
    profile.values.reserve(geom.freq_grid.size());
    const SheetPlacement sheet = SheetPlacement::of(geom, target);
    for (double f : geom.freq_grid) profile.values.push_back(attenuation_db(field_ratio(geom, sheet, f, quad)));
    return profile;
}

} // namespace rfsense

#endif
