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

#ifndef RFSENSE_QUADRATURE_HPP
#define RFSENSE_QUADRATURE_HPP

#include <array>
#include <complex>
#include <cstddef>

namespace rfsense {

struct Rect {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;

    double area() const { return (x1 - x0) * (y1 - y0); }
};

struct TiledOptions {
    double abs_tol = 1e-3;
    int max_depth = 16;
    int init_tiles_x = 2;
    int init_tiles_y = 4;
};

struct TiledResult {
    std::complex<double> value;
    double error = 0.0;         ///< sum of per-tile error estimates
    std::size_t tiles = 0;      ///< accepted leaf tiles
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

// 15-point Gauss-Kronrod rule on [-1, 1]; the 7-point Gauss rule uses the odd-indexed nodes.
struct Gk15 {
    std::array<double, 15> node{};
    std::array<double, 15> wk{};
    std::array<double, 15> wg{};

    constexpr Gk15() {
        constexpr std::array<double, 8> xgk = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
        constexpr std::array<double, 8> wgk = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        constexpr std::array<double, 4> wg7 = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
        for (int i = 0; i < 7; ++i) {
            node[i] = -xgk[i];
            node[14 - i] = xgk[i];
            wk[i] = wk[14 - i] = wgk[i];
            const double g = (i % 2 == 1) ? wg7[i / 2] : 0.0;
            wg[i] = wg[14 - i] = g;
        }
        node[7] = 0.0;
        wk[7] = wgk[7];
        wg[7] = wg7[3];
    }
};

inline constexpr Gk15 gk15{};

template <class F>
struct TileIntegrator {
    F& f;
    double tol_density; ///< allowed error per unit area
    int max_depth;
    TiledResult& out;

    // Tensor-product Kronrod estimate and |Kronrod - Gauss| over one tile.
    std::pair<std::complex<double>, double> rule(const Rect& t) const {
        const double cx = 0.5 * (t.x0 + t.x1), hx = 0.5 * (t.x1 - t.x0);
        const double cy = 0.5 * (t.y0 + t.y1), hy = 0.5 * (t.y1 - t.y0);
        std::complex<double> kron{}, gauss{};
        for (int i = 0; i < 15; ++i) {
            const double xi = cx + hx * gk15.node[i];
            std::complex<double> row_k{}, row_g{};
            for (int j = 0; j < 15; ++j) {
                const std::complex<double> v = f(xi, cy + hy * gk15.node[j]);
                row_k += gk15.wk[j] * v;
                row_g += gk15.wg[j] * v;
            }
            kron += gk15.wk[i] * row_k;
            gauss += gk15.wg[i] * row_g;
        }
        out.evaluations += 225;
        const double jac = hx * hy;
        return {kron * jac, std::abs(kron - gauss) * jac};
    }

    void run(const Rect& t, int depth) {
        const auto [value, err] = rule(t);
        if (err <= tol_density * t.area()) {
            accept(value, err);
            return;
        }
        if (depth >= max_depth) {
            out.converged = false;
            accept(value, err);
            return;
        }
        const double mx = 0.5 * (t.x0 + t.x1), my = 0.5 * (t.y0 + t.y1);
        run({t.x0, mx, t.y0, my}, depth + 1);
        run({mx, t.x1, t.y0, my}, depth + 1);
        run({t.x0, mx, my, t.y1}, depth + 1);
        run({mx, t.x1, my, t.y1}, depth + 1);
    }

    void accept(std::complex<double> value, double err) {
        out.value += value;
        out.error += err;
        ++out.tiles;
    }
};

} // namespace detail

/// Adaptive tiled cubature of a complex integrand over a rectangle.
///
/// The rectangle is cut into init_tiles_x by init_tiles_y tiles. Each tile is
/// integrated with a 15x15 Gauss-Kronrod product rule whose embedded 7x7
/// Gauss rule provides the error estimate; a tile is accepted once its
/// estimate falls within its area share of abs_tol, otherwise it is split
/// 2x2 until max_depth. Tiles are visited depth-first in a fixed order, so
/// the summation order and the result are deterministic.
template <class F>
TiledResult integrate_tiled(F&& f, const Rect& rect, const TiledOptions& opt) {
    TiledResult out;
    const double area = rect.area();
    if (!(area > 0.0)) return out;
    detail::TileIntegrator<F> worker{f, opt.abs_tol / area, opt.max_depth, out};
    const double dx = (rect.x1 - rect.x0) / opt.init_tiles_x;
    const double dy = (rect.y1 - rect.y0) / opt.init_tiles_y;
    for (int j = 0; j < opt.init_tiles_y; ++j) {
        const double y0 = rect.y0 + dy * j;
        const double y1 = j + 1 == opt.init_tiles_y ? rect.y1 : y0 + dy;
        for (int i = 0; i < opt.init_tiles_x; ++i) {
            const double x0 = rect.x0 + dx * i;
            const double x1 = i + 1 == opt.init_tiles_x ? rect.x1 : x0 + dx;
            worker.run({x0, x1, y0, y1}, 0);
        }
    }
    return out;
}

} // namespace rfsense

#endif
