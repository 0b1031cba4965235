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

#ifndef RFSENSE_FRESNEL_HPP
#define RFSENSE_FRESNEL_HPP

#include "error.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace rfsense {

struct FresnelCS {
    double c = 0.0;
    double s = 0.0;
};

/// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt and S(x) likewise with sin.
/// Power series below |x| = 1.5, modified-Lentz continued fraction above.
inline FresnelCS fresnel_integrals(double x) {
    constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
    constexpr double fpmin = std::numeric_limits<double>::min() * 16.0;
    constexpr double series_limit = 1.5;
    constexpr int max_iter = 200;
    constexpr double pi = std::numbers::pi;

    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw DomainError("Fresnel integral of NaN");
        return x > 0 ? FresnelCS{0.5, 0.5} : FresnelCS{-0.5, -0.5};
    }

    const double ax = std::abs(x);
    FresnelCS out;
    if (ax < std::sqrt(fpmin)) {
        out = {ax, 0.0};
    } else if (ax <= series_limit) {
        double sum = 0.0, sums = 0.0, sumc = ax;
        double sign = 1.0;
        const double fact = pi / 2.0 * ax * ax;
        bool odd = true;
        double term = ax;
        int n = 3;
        for (int k = 1; k <= max_iter; ++k) {
            term *= fact / k;
            sum += sign * term / n;
            const double test = std::abs(sum) * eps;
            if (odd) {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if (term < test) break;
            odd = !odd;
            n += 2;
        }
        out = {sumc, sums};
    } else {
        using cd = std::complex<double>;
        const double pix2 = pi * ax * ax;
        cd b(1.0, -pix2);
        cd cc = 1.0 / fpmin;
        cd d = 1.0 / b;
        cd h = d;
        int n = -1;
        for (int k = 2; k <= max_iter; ++k) {
            n += 2;
            const double a = -static_cast<double>(n) * (n + 1);
            b += 4.0;
            d = 1.0 / (a * d + b);
            cc = b + a / cc;
            const cd del = cc * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
        }
        h *= cd(ax, -ax);
        const cd cs = cd(0.5, 0.5) * (1.0 - cd(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
        out = {cs.real(), cs.imag()};
    }
    if (x < 0.0) {
        out.c = -out.c;
        out.s = -out.s;
    }
    return out;
}

/// Knife-edge field ratio (1+j)/2 * int_v^inf exp(-j pi t^2 / 2) dt.
inline std::complex<double> knife_edge_field(double v) {
    const auto [c, s] = fresnel_integrals(v);
    const std::complex<double> tail(0.5 - c, -(0.5 - s));
    return std::complex<double>(0.5, 0.5) * tail;
}

/// Classical knife-edge excess attenuation in dB for Fresnel parameter v
/// (positive v: edge above the LoS). Exactly 20 log10 2 at grazing.
inline double knife_edge_attenuation(double v) {
    if (!std::isfinite(v)) {
        if (std::isnan(v)) throw DomainError("Fresnel parameter must not be NaN");
        if (v < 0) return 0.0;
        throw DomainError("Fresnel parameter +inf gives infinite attenuation");
    }
    return -20.0 * std::log10(std::abs(knife_edge_field(v)));
}

/// Fresnel parameter of an edge at height `clearance` above the LoS at
/// distances d1, d2 from the antennas.
inline double fresnel_parameter(double clearance, double lambda, double d1, double d2) {
    return clearance * std::sqrt(2.0 * (d1 + d2) / (lambda * d1 * d2));
}

} // namespace rfsense

#endif
