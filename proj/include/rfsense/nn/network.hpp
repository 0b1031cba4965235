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

#ifndef RFSENSE_NN_NETWORK_HPP
#define RFSENSE_NN_NETWORK_HPP

#include "../error.hpp"
#include "../rng.hpp"
#include "tensor.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rfsense::nn {

// Weights are stored column-major in the network's flat parameter vector.
struct DenseLayer {
    std::size_t in = 0, out = 0;
    std::size_t weight_offset = 0, bias_offset = 0; ///< W: out x in
};

struct Conv1dLayer {
    std::size_t in_channels = 0, out_channels = 0, kernel = 0, stride = 1, pad = 0;
    std::size_t in_length = 0, out_length = 0;
    std::size_t weight_offset = 0, bias_offset = 0; ///< W: out_channels x (in_channels * kernel)
};

/// Transposed convolution. Its weight has the layout of the matching
/// Conv1dLayer(out_channels -> in_channels), so with zero bias the two are
/// adjoint linear maps.
struct Deconv1dLayer {
    std::size_t in_channels = 0, out_channels = 0, kernel = 0, stride = 1, pad = 0, output_padding = 0;
    std::size_t in_length = 0, out_length = 0;
    std::size_t weight_offset = 0, bias_offset = 0; ///< W: in_channels x (out_channels * kernel)
};

struct ActivationLayer {
    Activation fn = Activation::identity;
};

struct ReshapeLayer {
    Shape to;
};

using Layer = std::variant<DenseLayer, Conv1dLayer, Deconv1dLayer, ActivationLayer, ReshapeLayer>;

struct ForwardCache {
    std::uint64_t stamp = 0;
    std::vector<Eigen::MatrixXd> activations; ///< input of each layer, then the output
};

struct Gradients {
    std::vector<double> params;
    Eigen::MatrixXd input;
};

namespace detail {

inline std::uint64_t next_stamp() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

// cols(c * k + t, b * out_len + l) = x(c * in_len + l * s - p + t, b)
inline Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, std::size_t channels, std::size_t in_len, std::size_t out_len,
                              std::size_t kernel, std::size_t stride, std::size_t pad) {
    const Eigen::Index batch = x.cols();
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels * kernel),
                                                 static_cast<Eigen::Index>(out_len) * batch);
    for (Eigen::Index b = 0; b < batch; ++b)
        for (std::size_t l = 0; l < out_len; ++l) {
            const Eigen::Index col = b * static_cast<Eigen::Index>(out_len) + static_cast<Eigen::Index>(l);
            for (std::size_t t = 0; t < kernel; ++t) {
                const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(l * stride + t) - static_cast<std::ptrdiff_t>(pad);
                if (i < 0 || i >= static_cast<std::ptrdiff_t>(in_len)) continue;
                for (std::size_t c = 0; c < channels; ++c)
                    cols(static_cast<Eigen::Index>(c * kernel + t), col) =
                        x(static_cast<Eigen::Index>(c * in_len) + i, b);
            }
        }
    return cols;
}

// Adjoint of im2col.
inline Eigen::MatrixXd col2im(const Eigen::MatrixXd& cols, std::size_t channels, std::size_t in_len,
                              std::size_t out_len, std::size_t kernel, std::size_t stride, std::size_t pad,
                              Eigen::Index batch) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels * in_len), batch);
    for (Eigen::Index b = 0; b < batch; ++b)
        for (std::size_t l = 0; l < out_len; ++l) {
            const Eigen::Index col = b * static_cast<Eigen::Index>(out_len) + static_cast<Eigen::Index>(l);
            for (std::size_t t = 0; t < kernel; ++t) {
                const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(l * stride + t) - static_cast<std::ptrdiff_t>(pad);
                if (i < 0 || i >= static_cast<std::ptrdiff_t>(in_len)) continue;
                for (std::size_t c = 0; c < channels; ++c)
                    x(static_cast<Eigen::Index>(c * in_len) + i, b) += cols(static_cast<Eigen::Index>(c * kernel + t), col);
            }
        }
    return x;
}

// (channels * len) x batch  <->  channels x (batch * len)
inline Eigen::MatrixXd unfold_channels(const Eigen::MatrixXd& x, std::size_t channels, std::size_t len) {
    const Eigen::Index batch = x.cols();
    const auto L = static_cast<Eigen::Index>(len);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(channels), batch * L);
    for (Eigen::Index b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < channels; ++c)
            m.row(static_cast<Eigen::Index>(c)).segment(b * L, L) =
                x.col(b).segment(static_cast<Eigen::Index>(c) * L, L).transpose();
    return m;
}

inline Eigen::MatrixXd fold_channels(const Eigen::MatrixXd& m, std::size_t channels, std::size_t len) {
    const auto L = static_cast<Eigen::Index>(len);
    const Eigen::Index batch = m.cols() / L;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(channels) * L, batch);
    for (Eigen::Index b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < channels; ++c)
            x.col(b).segment(static_cast<Eigen::Index>(c) * L, L) =
                m.row(static_cast<Eigen::Index>(c)).segment(b * L, L).transpose();
    return x;
}

} // namespace detail

/// Plain sequential stack of layers with a flat parameter vector and
/// fixed-order backpropagation.
class Network {
public:
    Network() : stamp_(detail::next_stamp()) {}
    explicit Network(Shape input) : input_(input), shapes_{input}, stamp_(detail::next_stamp()) {}

    Shape input_shape() const { return input_; }
    Shape output_shape() const { return shapes_.back(); }
    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t parameter_count() const { return params_.size(); }
    std::span<const double> parameters() const { return params_; }

    /// Mutable view; invalidates forward caches taken before the call.
    std::span<double> mutable_parameters() {
        stamp_ = detail::next_stamp();
        return params_;
    }

    void set_parameters(std::span<const double> values) {
        if (values.size() != params_.size()) throw ShapeError("parameter count mismatch");
        std::copy(values.begin(), values.end(), params_.begin());
        stamp_ = detail::next_stamp();
    }

    Network& dense(std::size_t out) {
        DenseLayer l{current().size(), out, 0, 0};
        l.weight_offset = allocate(l.in * l.out);
        l.bias_offset = allocate(l.out);
        return push(l, Shape{1, out});
    }

    Network& conv1d(std::size_t out_channels, std::size_t kernel, std::size_t stride, std::size_t pad) {
        const Shape in = current();
        if (kernel == 0 || stride == 0) throw ShapeError("conv1d needs kernel and stride >= 1");
        if (in.length + 2 * pad < kernel) throw ShapeError("conv1d kernel longer than padded input");
        Conv1dLayer l{in.channels, out_channels, kernel, stride, pad, in.length, 0, 0, 0};
        l.out_length = (in.length + 2 * pad - kernel) / stride + 1;
        l.weight_offset = allocate(out_channels * in.channels * kernel);
        l.bias_offset = allocate(out_channels);
        return push(l, Shape{out_channels, l.out_length});
    }

    Network& deconv1d(std::size_t out_channels, std::size_t kernel, std::size_t stride, std::size_t pad,
                      std::size_t output_padding = 0) {
        const Shape in = current();
        if (kernel == 0 || stride == 0) throw ShapeError("deconv1d needs kernel and stride >= 1");
        if (output_padding >= stride) throw ShapeError("deconv1d output_padding must be < stride");
        Deconv1dLayer l{in.channels, out_channels, kernel, stride, pad, output_padding, in.length, 0, 0, 0};
        const std::ptrdiff_t len = static_cast<std::ptrdiff_t>((in.length - 1) * stride + kernel + output_padding) -
                                   2 * static_cast<std::ptrdiff_t>(pad);
        if (len < 1) throw ShapeError("deconv1d output would be empty");
        l.out_length = static_cast<std::size_t>(len);
        l.weight_offset = allocate(in.channels * out_channels * kernel);
        l.bias_offset = allocate(out_channels);
        return push(l, Shape{out_channels, l.out_length});
    }

    Network& activation(Activation fn) { return push(ActivationLayer{fn}, current()); }

    Network& reshape(Shape to) {
        if (to.size() != current().size())
            throw ShapeError("reshape " + current().str() + " -> " + to.str() + " changes the element count");
        return push(ReshapeLayer{to}, to);
    }

    /// Glorot-uniform weights, zero biases.
    void initialize(Rng& rng) {
        for (const Layer& layer : layers_) {
            std::visit(
                [&](const auto& l) {
                    using L = std::decay_t<decltype(l)>;
                    if constexpr (std::is_same_v<L, DenseLayer>) {
                        fill_uniform(rng, l.weight_offset, l.in * l.out, l.in, l.out);
                        fill_zero(l.bias_offset, l.out);
                    } else if constexpr (std::is_same_v<L, Conv1dLayer>) {
                        fill_uniform(rng, l.weight_offset, l.in_channels * l.out_channels * l.kernel,
                                     l.in_channels * l.kernel, l.out_channels * l.kernel);
                        fill_zero(l.bias_offset, l.out_channels);
                    } else if constexpr (std::is_same_v<L, Deconv1dLayer>) {
                        fill_uniform(rng, l.weight_offset, l.in_channels * l.out_channels * l.kernel,
                                     l.in_channels * l.kernel, l.out_channels * l.kernel);
                        fill_zero(l.bias_offset, l.out_channels);
                    }
                },
                layer);
        }
        stamp_ = detail::next_stamp();
    }

    /// Zeroes weights and biases of the last parameterized layer.
    void zero_last_layer() {
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
            if (const auto* d = std::get_if<DenseLayer>(&*it)) {
                fill_zero(d->weight_offset, d->in * d->out + d->out);
                stamp_ = detail::next_stamp();
                return;
            }
            if (std::holds_alternative<Conv1dLayer>(*it) || std::holds_alternative<Deconv1dLayer>(*it))
                throw ShapeError("zero_last_layer expects a dense output layer");
        }
    }

    std::string describe() const {
        std::string s = "in(" + input_.str() + ")";
        for (const Layer& layer : layers_) {
            s += "|";
            std::visit(
                [&](const auto& l) {
                    using L = std::decay_t<decltype(l)>;
                    if constexpr (std::is_same_v<L, DenseLayer>) {
                        s += "dense(" + std::to_string(l.in) + "," + std::to_string(l.out) + ")";
                    } else if constexpr (std::is_same_v<L, Conv1dLayer>) {
                        s += "conv1d(" + std::to_string(l.in_channels) + "," + std::to_string(l.out_channels) + ",k" +
                             std::to_string(l.kernel) + ",s" + std::to_string(l.stride) + ",p" + std::to_string(l.pad) + ")";
                    } else if constexpr (std::is_same_v<L, Deconv1dLayer>) {
                        s += "deconv1d(" + std::to_string(l.in_channels) + "," + std::to_string(l.out_channels) + ",k" +
                             std::to_string(l.kernel) + ",s" + std::to_string(l.stride) + ",p" + std::to_string(l.pad) +
                             ",op" + std::to_string(l.output_padding) + ")";
                    } else if constexpr (std::is_same_v<L, ActivationLayer>) {
                        s += to_string(l.fn);
                    } else {
                        s += "reshape(" + l.to.str() + ")";
                    }
                },
                layer);
        }
        return s;
    }

    /// Forward pass; fills `cache` when given so backward() can run.
    Tensor forward(const Tensor& input, ForwardCache* cache = nullptr) const {
        if (input.shape.size() != input_.size())
            throw ShapeError("network input has shape " + input.shape.str() + ", expected " + input_.str());
        if (cache) {
            cache->stamp = stamp_;
            cache->activations.clear();
            cache->activations.reserve(layers_.size() + 1);
            cache->activations.push_back(input.values);
        }
        Eigen::MatrixXd x = input.values;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            x = apply(layers_[i], x);
            if (cache) cache->activations.push_back(x);
        }
#ifndef NDEBUG
        if (!x.allFinite()) throw ShapeError("non-finite network output");
#endif
        return Tensor(output_shape(), std::move(x));
    }

    /// Gradients of <output_gradient, forward(input)> w.r.t. parameters and input.
    Gradients backward(const ForwardCache& cache, const Eigen::MatrixXd& output_gradient) const {
        if (cache.stamp != stamp_ || cache.activations.size() != layers_.size() + 1)
            throw ShapeError("stale forward cache: parameters changed since the forward pass");
        if (output_gradient.rows() != cache.activations.back().rows() ||
            output_gradient.cols() != cache.activations.back().cols())
            throw ShapeError("output gradient shape does not match the cached output");
        Gradients g;
        g.params.assign(params_.size(), 0.0);
        Eigen::MatrixXd delta = output_gradient;
        for (std::size_t i = layers_.size(); i-- > 0;)
            delta = back(layers_[i], cache.activations[i], cache.activations[i + 1], delta, g.params);
        g.input = std::move(delta);
        return g;
    }

private:
    using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
    using Map = Eigen::Map<Eigen::MatrixXd>;

    Shape current() const { return shapes_.back(); }

    std::size_t allocate(std::size_t n) {
        const std::size_t off = params_.size();
        params_.resize(off + n, 0.0);
        return off;
    }

    template <class L>
    Network& push(const L& l, Shape out) {
        layers_.emplace_back(l);
        shapes_.push_back(out);
        stamp_ = detail::next_stamp();
        return *this;
    }

    void fill_uniform(Rng& rng, std::size_t off, std::size_t n, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < n; ++i) params_[off + i] = dist(rng);
    }

    void fill_zero(std::size_t off, std::size_t n) { std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(off), n, 0.0); }

    ConstMap mat(std::size_t off, std::size_t rows, std::size_t cols) const {
        return {params_.data() + off, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }
    Eigen::Map<const Eigen::VectorXd> vec(std::size_t off, std::size_t n) const {
        return {params_.data() + off, static_cast<Eigen::Index>(n)};
    }

    Eigen::MatrixXd apply(const Layer& layer, const Eigen::MatrixXd& x) const {
        return std::visit(
            [&](const auto& l) -> Eigen::MatrixXd {
                using L = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<L, DenseLayer>) {
                    Eigen::MatrixXd y = mat(l.weight_offset, l.out, l.in) * x;
                    y.colwise() += vec(l.bias_offset, l.out);
                    return y;
                } else if constexpr (std::is_same_v<L, Conv1dLayer>) {
                    const Eigen::MatrixXd cols =
                        detail::im2col(x, l.in_channels, l.in_length, l.out_length, l.kernel, l.stride, l.pad);
                    Eigen::MatrixXd ym = mat(l.weight_offset, l.out_channels, l.in_channels * l.kernel) * cols;
                    ym.colwise() += vec(l.bias_offset, l.out_channels);
                    return detail::fold_channels(ym, l.out_channels, l.out_length);
                } else if constexpr (std::is_same_v<L, Deconv1dLayer>) {
                    const Eigen::MatrixXd xm = detail::unfold_channels(x, l.in_channels, l.in_length);
                    const Eigen::MatrixXd cols =
                        mat(l.weight_offset, l.in_channels, l.out_channels * l.kernel).transpose() * xm;
                    Eigen::MatrixXd y = detail::col2im(cols, l.out_channels, l.out_length, l.in_length, l.kernel,
                                                       l.stride, l.pad, x.cols());
                    for (std::size_t c = 0; c < l.out_channels; ++c)
                        y.middleRows(static_cast<Eigen::Index>(c * l.out_length), static_cast<Eigen::Index>(l.out_length))
                            .array() += params_[l.bias_offset + c];
                    return y;
                } else if constexpr (std::is_same_v<L, ActivationLayer>) {
                    switch (l.fn) {
                    case Activation::relu: return x.cwiseMax(0.0);
                    case Activation::tanh: return x.array().tanh().matrix();
                    case Activation::identity: break;
                    }
                    return x;
                } else {
                    return x;
                }
            },
            layer);
    }

    Eigen::MatrixXd back(const Layer& layer, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                         const Eigen::MatrixXd& dy, std::vector<double>& grads) const {
        return std::visit(
            [&](const auto& l) -> Eigen::MatrixXd {
                using L = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<L, DenseLayer>) {
                    gmat(grads, l.weight_offset, l.out, l.in) += dy * x.transpose();
                    gvec(grads, l.bias_offset, l.out) += dy.rowwise().sum();
                    return mat(l.weight_offset, l.out, l.in).transpose() * dy;
                } else if constexpr (std::is_same_v<L, Conv1dLayer>) {
                    const Eigen::MatrixXd cols =
                        detail::im2col(x, l.in_channels, l.in_length, l.out_length, l.kernel, l.stride, l.pad);
                    const Eigen::MatrixXd dym = detail::unfold_channels(dy, l.out_channels, l.out_length);
                    gmat(grads, l.weight_offset, l.out_channels, l.in_channels * l.kernel) += dym * cols.transpose();
                    gvec(grads, l.bias_offset, l.out_channels) += dym.rowwise().sum();
                    const Eigen::MatrixXd dcols =
                        mat(l.weight_offset, l.out_channels, l.in_channels * l.kernel).transpose() * dym;
                    return detail::col2im(dcols, l.in_channels, l.in_length, l.out_length, l.kernel, l.stride, l.pad,
                                          x.cols());
                } else if constexpr (std::is_same_v<L, Deconv1dLayer>) {
                    const Eigen::MatrixXd xm = detail::unfold_channels(x, l.in_channels, l.in_length);
                    const Eigen::MatrixXd dcols =
                        detail::im2col(dy, l.out_channels, l.out_length, l.in_length, l.kernel, l.stride, l.pad);
                    gmat(grads, l.weight_offset, l.in_channels, l.out_channels * l.kernel) += xm * dcols.transpose();
                    for (std::size_t c = 0; c < l.out_channels; ++c)
                        grads[l.bias_offset + c] +=
                            dy.middleRows(static_cast<Eigen::Index>(c * l.out_length), static_cast<Eigen::Index>(l.out_length))
                                .sum();
                    const Eigen::MatrixXd dxm = mat(l.weight_offset, l.in_channels, l.out_channels * l.kernel) * dcols;
                    return detail::fold_channels(dxm, l.in_channels, l.in_length);
                } else if constexpr (std::is_same_v<L, ActivationLayer>) {
                    switch (l.fn) {
                    case Activation::relu: return (x.array() > 0.0).select(dy, 0.0);
                    case Activation::tanh: return (dy.array() * (1.0 - y.array().square())).matrix();
                    case Activation::identity: break;
                    }
                    return dy;
                } else {
                    return dy;
                }
            },
            layer);
    }

    static Map gmat(std::vector<double>& g, std::size_t off, std::size_t rows, std::size_t cols) {
        return {g.data() + off, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }
    static Eigen::Map<Eigen::VectorXd> gvec(std::vector<double>& g, std::size_t off, std::size_t n) {
        return {g.data() + off, static_cast<Eigen::Index>(n)};
    }

    Shape input_;
    std::vector<Layer> layers_;
    std::vector<Shape> shapes_{Shape{}};
    std::vector<double> params_;
    std::uint64_t stamp_ = 0;
};

} // namespace rfsense::nn

#endif
