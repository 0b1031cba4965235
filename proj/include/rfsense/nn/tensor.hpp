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

#ifndef RFSENSE_NN_TENSOR_HPP
#define RFSENSE_NN_TENSOR_HPP

#include "../error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>

namespace rfsense::nn {

struct Shape {
    std::size_t channels = 1;
    std::size_t length = 1;

    std::size_t size() const { return channels * length; }
    std::string str() const { return std::to_string(channels) + "x" + std::to_string(length); }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// A batch of (channels, length) samples. Each column of `values` is one
/// sample stored channel-major (row = channel * length + position).
struct Tensor {
    Shape shape;
    Eigen::MatrixXd values;

    Tensor() = default;
    Tensor(Shape s, std::size_t batch) : shape(s), values(Eigen::MatrixXd::Zero(s.size(), batch)) {}
    Tensor(Shape s, Eigen::MatrixXd v) : shape(s), values(std::move(v)) {
        if (static_cast<std::size_t>(values.rows()) != shape.size())
            throw ShapeError("tensor values have " + std::to_string(values.rows()) + " rows, shape " + shape.str() +
                             " needs " + std::to_string(shape.size()));
    }

    static Tensor flat(const Eigen::MatrixXd& v) { return {Shape{1, static_cast<std::size_t>(v.rows())}, v}; }

    std::size_t batch() const { return static_cast<std::size_t>(values.cols()); }
    bool all_finite() const { return values.allFinite(); }
};

enum class Activation { identity, relu, tanh };

inline std::string to_string(Activation a) {
    switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    }
    return "identity";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + s + "'");
}

} // namespace rfsense::nn

#endif
