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

#ifndef RFSENSE_NN_OPTIMIZER_HPP
#define RFSENSE_NN_OPTIMIZER_HPP

#include "../error.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace rfsense::nn {

/// Adaptive-moment (Adam) state for one flat parameter vector.
struct OptimizerState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    explicit OptimizerState(std::size_t n = 0, double lr = 1e-3) : learning_rate(lr), m(n, 0.0), v(n, 0.0) {}
};

inline void optimizer_step(std::span<double> params, std::span<const double> grads, OptimizerState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw ShapeError("optimizer: parameter, gradient and state sizes differ");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

} // namespace rfsense::nn

#endif
