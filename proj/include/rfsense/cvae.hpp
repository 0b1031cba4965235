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

#ifndef RFSENSE_CVAE_HPP
#define RFSENSE_CVAE_HPP

#include "diffraction.hpp"
#include "error.hpp"
#include "nn/network.hpp"
#include "nn/optimizer.hpp"
#include "prior_sampler.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace rfsense {

inline constexpr double log_var_min = -10.0;
inline constexpr double log_var_max = 10.0;

/// Conditional VAE: encoder Q(z | profile, condition) -> (mu, log_var) and
/// decoder (z, condition) -> profile, both on normalized units.
struct CvaeModel {
    std::size_t profile_length = 0;
    std::size_t latent_dim = 16;
    double beta = 0.05;
    double recon_sigma = 10.0;
    nn::Activation activation = nn::Activation::tanh;
    nn::Network encoder;
    nn::Network decoder;
    Normalization normalization;

    std::string architecture() const {
        return "cvae/F=" + std::to_string(profile_length) + "/Z=" + std::to_string(latent_dim) +
               "/enc=" + encoder.describe() + "/dec=" + decoder.describe();
    }
    std::size_t parameter_count() const { return encoder.parameter_count() + decoder.parameter_count(); }
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    double beta = 0.05;
    std::size_t latent_dim = 16;
    std::size_t patience = 20;
    double recon_sigma = 10.0;
    nn::Activation activation = nn::Activation::tanh;
    void validate() const {
        if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch_size must be positive");
        if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
        if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
        if (latent_dim == 0) throw ConfigError("latent dimension must be >= 1");
        if (!(recon_sigma > 0.0)) throw ConfigError("recon_sigma must be positive");
    }
};

// Encoder: dense(F+6 -> 256) -> 16x16 -> conv(32,k3,s2) -> conv(64,k3,s2) -> dense(128) -> dense(2Z).
inline nn::Network make_encoder(std::size_t profile_length, std::size_t latent_dim, nn::Activation act) {
    nn::Network net(nn::Shape{1, profile_length + condition_dim});
    net.dense(256).activation(act).reshape({16, 16});
    net.conv1d(32, 3, 2, 1).activation(act);
    net.conv1d(64, 3, 2, 1).activation(act);
    net.reshape({1, 256}).dense(128).activation(act).dense(2 * latent_dim);
    return net;
}

// Decoder: dense(Z+6 -> 64) -> 16x4 -> deconv(16,k3,s2) -> deconv(8,k3,s2) -> dense(F).
inline nn::Network make_decoder(std::size_t profile_length, std::size_t latent_dim, nn::Activation act) {
    nn::Network net(nn::Shape{1, latent_dim + condition_dim});
    net.dense(64).activation(act).reshape({16, 4});
    net.deconv1d(16, 3, 2, 1, 1).activation(act);
    net.deconv1d(8, 3, 2, 1, 1).activation(act);
    net.reshape({1, 128}).dense(profile_length);
    return net;
}

/// Fresh model: Glorot-initialized, with the encoder output layer zeroed so
/// an untrained encoder returns mu = 0, log_var = 0.
inline CvaeModel make_cvae(std::size_t profile_length, std::size_t latent_dim, double beta, double recon_sigma,
                           nn::Activation act, Normalization normalization, Rng& rng) {
    if (profile_length == 0 || latent_dim == 0) throw ShapeError("profile length and latent dimension must be >= 1");
    if (normalization.profile_length() != profile_length) throw ShapeError("normalization length differs from F");
    CvaeModel m;
    m.profile_length = profile_length;
    m.latent_dim = latent_dim;
    m.beta = beta;
    m.recon_sigma = recon_sigma;
    m.activation = act;
    m.encoder = make_encoder(profile_length, latent_dim, act);
    m.decoder = make_decoder(profile_length, latent_dim, act);
    m.encoder.initialize(rng);
    m.encoder.zero_last_layer();
    m.decoder.initialize(rng);
    m.normalization = std::move(normalization);
    return m;
}

struct LatentGaussian {
    std::vector<double> mu;
    std::vector<double> log_var;
};

namespace detail {

inline Eigen::VectorXd normalized_condition(const CvaeModel& m, const TargetState& t) {
    const ConditionVector c = m.normalization.normalize_condition(condition_vector(t));
    return Eigen::Map<const Eigen::VectorXd>(c.data(), condition_dim);
}

inline Eigen::MatrixXd stack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
    Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

inline Eigen::MatrixXd clamp_log_var(const Eigen::MatrixXd& raw) {
    return raw.cwiseMax(log_var_min).cwiseMin(log_var_max);
}

} // namespace detail

inline std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var,
                                          std::span<const double> eps) {
    if (mu.size() != log_var.size() || mu.size() != eps.size()) throw ShapeError("reparameterize: size mismatch");
    std::vector<double> z(mu.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + std::exp(0.5 * log_var[i]) * eps[i];
    return z;
}

/// KL( N(mu, exp(log_var)) || N(0, I) ).
inline double kl_standard_normal(std::span<const double> mu, std::span<const double> log_var) {
    if (mu.size() != log_var.size()) throw ShapeError("kl_standard_normal: size mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) kl += mu[i] * mu[i] + std::exp(log_var[i]) - 1.0 - log_var[i];
    return 0.5 * kl;
}

/// Encoder output for normalized batches (columns are records).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> encode_normalized(const CvaeModel& m, const Eigen::MatrixXd& profiles,
                                                                     const Eigen::MatrixXd& conditions) {
    const Eigen::MatrixXd out = m.encoder.forward(nn::Tensor::flat(detail::stack(profiles, conditions))).values;
    const auto z = static_cast<Eigen::Index>(m.latent_dim);
    return {out.topRows(z), detail::clamp_log_var(out.bottomRows(z))};
}

inline Eigen::MatrixXd decode_normalized(const CvaeModel& m, const Eigen::MatrixXd& z, const Eigen::MatrixXd& conditions) {
    return m.decoder.forward(nn::Tensor::flat(detail::stack(z, conditions))).values;
}

inline LatentGaussian encode(const CvaeModel& m, const std::vector<double>& profile_db, const TargetState& condition) {
    if (profile_db.size() != m.profile_length) throw ShapeError("encode: profile length differs from model F");
    const std::vector<double> u = m.normalization.normalize_profile(profile_db);
    const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    const auto [mu, lv] = encode_normalized(m, x, detail::normalized_condition(m, condition));
    return {{mu.data(), mu.data() + mu.size()}, {lv.data(), lv.data() + lv.size()}};
}

/// Decoder mean for one latent vector, in dB.
inline std::vector<double> decode(const CvaeModel& m, std::span<const double> z, const TargetState& condition) {
    if (z.size() != m.latent_dim) throw ShapeError("decode: latent size differs from model Z");
    const Eigen::MatrixXd zm = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::MatrixXd u = decode_normalized(m, zm, detail::normalized_condition(m, condition));
    return m.normalization.denormalize_profile({u.data(), u.data() + u.size()});
}

/// Profile -> mu -> decoded profile (dB).
inline std::vector<double> reconstruct(const CvaeModel& m, const std::vector<double>& profile_db,
                                       const TargetState& condition) {
    return decode(m, encode(m, profile_db, condition).mu, condition);
}

struct ElboResult {
    double loss = 0.0;      ///< batch mean of -ELBO
    double recon_nll = 0.0; ///< batch mean reconstruction negative log-likelihood
    double kl = 0.0;        ///< batch mean KL
    std::vector<double> grad_encoder;
    std::vector<double> grad_decoder;
};

/// Negative beta-ELBO averaged over a normalized batch with a Gaussian
/// decoder likelihood of fixed scale recon_sigma, and its exact gradients
/// through the reparameterization z = mu + exp(log_var / 2) * eps.
inline ElboResult elbo(const CvaeModel& m, const Eigen::MatrixXd& profiles, const Eigen::MatrixXd& conditions,
                       const Eigen::MatrixXd& eps, bool with_gradients = true) {
    const Eigen::Index batch = profiles.cols();
    const auto f = static_cast<Eigen::Index>(m.profile_length);
    const auto zd = static_cast<Eigen::Index>(m.latent_dim);
    if (batch == 0) throw ShapeError("elbo: empty batch");
    if (profiles.rows() != f || conditions.rows() != static_cast<Eigen::Index>(condition_dim) ||
        conditions.cols() != batch || eps.rows() != zd || eps.cols() != batch)
        throw ShapeError("elbo: batch shapes do not match the model");

    nn::ForwardCache enc_cache, dec_cache;
    const Eigen::MatrixXd enc_out =
        m.encoder.forward(nn::Tensor::flat(detail::stack(profiles, conditions)), with_gradients ? &enc_cache : nullptr).values;
    const Eigen::MatrixXd mu = enc_out.topRows(zd);
    const Eigen::MatrixXd raw_lv = enc_out.bottomRows(zd);
    const Eigen::MatrixXd lv = detail::clamp_log_var(raw_lv);
    const Eigen::MatrixXd std_dev = (0.5 * lv.array()).exp().matrix();
    const Eigen::MatrixXd z = mu + std_dev.cwiseProduct(eps);
    const Eigen::MatrixXd recon =
        m.decoder.forward(nn::Tensor::flat(detail::stack(z, conditions)), with_gradients ? &dec_cache : nullptr).values;

    const double inv_var = 1.0 / (m.recon_sigma * m.recon_sigma);
    const double log_norm = static_cast<double>(f) * std::log(m.recon_sigma * std::sqrt(2.0 * std::numbers::pi));
    const Eigen::MatrixXd residual = recon - profiles;
    const double n = static_cast<double>(batch);
    ElboResult r;
    r.recon_nll = 0.5 * inv_var * residual.squaredNorm() / n + log_norm;
    r.kl = 0.5 * (mu.array().square() + lv.array().exp() - 1.0 - lv.array()).sum() / n;
    r.loss = r.recon_nll + m.beta * r.kl;
    if (!with_gradients) return r;

    const Eigen::MatrixXd d_recon = residual * (inv_var / n);
    nn::Gradients dec_grads = m.decoder.backward(dec_cache, d_recon);
    const Eigen::MatrixXd dz = dec_grads.input.topRows(zd);
    const Eigen::MatrixXd d_mu = dz + mu * (m.beta / n);
    Eigen::MatrixXd d_lv = (dz.cwiseProduct(eps).cwiseProduct(std_dev) * 0.5).array() +
                           (m.beta * 0.5 / n) * (lv.array().exp() - 1.0);
    d_lv = (raw_lv.array() >= log_var_min && raw_lv.array() <= log_var_max).select(d_lv, 0.0);
    Eigen::MatrixXd d_enc(2 * zd, batch);
    d_enc << d_mu, d_lv;
    nn::Gradients enc_grads = m.encoder.backward(enc_cache, d_enc);
    r.grad_encoder = std::move(enc_grads.params);
    r.grad_decoder = std::move(dec_grads.params);
    return r;
}

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double best_validation_loss = 0.0;
};

struct TrainResult {
    CvaeModel model;
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
};

namespace detail {

struct NormalizedData {
    Eigen::MatrixXd profiles;
    Eigen::MatrixXd conditions;
};

inline NormalizedData normalize_records(const TrainingSet& data) {
    const auto f = static_cast<Eigen::Index>(data.profile_length());
    const auto n = static_cast<Eigen::Index>(data.records.size());
    NormalizedData out{Eigen::MatrixXd(f, n), Eigen::MatrixXd(static_cast<Eigen::Index>(condition_dim), n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const TrainingRecord& r = data.records[static_cast<std::size_t>(j)];
        const std::vector<double> u = data.normalization.normalize_profile(r.profile);
        const ConditionVector c = data.normalization.normalize_condition(r.condition);
        for (Eigen::Index i = 0; i < f; ++i) out.profiles(i, j) = u[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(condition_dim); ++i)
            out.conditions(i, j) = c[static_cast<std::size_t>(i)];
    }
    return out;
}

inline Eigen::MatrixXd gather(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(idx[j]));
    return out;
}

inline Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
    return m;
}

} // namespace detail

/// Minimizes the negative beta-ELBO with Adam on a seeded 90/10 split and
/// returns the parameters of the epoch with the best validation loss.
///
/// Substreams of cfg.seed: 0 initialization, 1 split and shuffling,
/// 2 validation noise, 3 training noise.
inline TrainResult train(const TrainingSet& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.records.empty()) throw ConfigError("training set is empty");
    const std::size_t n = data.records.size();
    if (cfg.batch_size > n) throw ConfigError("batch_size exceeds the dataset size");

    Rng init_rng = make_rng(cfg.seed, 0);
    Rng order_rng = make_rng(cfg.seed, 1);
    Rng val_rng = make_rng(cfg.seed, 2);
    Rng noise_rng = make_rng(cfg.seed, 3);

    TrainResult result;
    result.model = make_cvae(data.profile_length(), cfg.latent_dim, cfg.beta, cfg.recon_sigma, cfg.activation,
                             data.normalization, init_rng);
    CvaeModel& model = result.model;

    const detail::NormalizedData all = detail::normalize_records(data);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), order_rng);
    const std::size_t n_val = n / 10;
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    if (val_idx.empty()) val_idx = train_idx;
    const std::size_t batch_size = std::min(cfg.batch_size, train_idx.size());

    const Eigen::MatrixXd val_x = detail::gather(all.profiles, val_idx);
    const Eigen::MatrixXd val_c = detail::gather(all.conditions, val_idx);
    const Eigen::MatrixXd val_eps =
        detail::normal_matrix(static_cast<Eigen::Index>(cfg.latent_dim), static_cast<Eigen::Index>(val_idx.size()), val_rng);

    nn::OptimizerState enc_opt(model.encoder.parameter_count(), cfg.learning_rate);
    nn::OptimizerState dec_opt(model.decoder.parameter_count(), cfg.learning_rate);
    std::vector<double> best_enc(model.encoder.parameters().begin(), model.encoder.parameters().end());
    std::vector<double> best_dec(model.decoder.parameters().begin(), model.decoder.parameters().end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), order_rng);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < train_idx.size(); start += batch_size) {
            const std::size_t count = std::min(batch_size, train_idx.size() - start);
            const std::span<const std::size_t> idx(train_idx.data() + start, count);
            const Eigen::MatrixXd eps =
                detail::normal_matrix(static_cast<Eigen::Index>(cfg.latent_dim), static_cast<Eigen::Index>(count), noise_rng);
            const ElboResult r = elbo(model, detail::gather(all.profiles, idx), detail::gather(all.conditions, idx), eps);
            if (!std::isfinite(r.loss)) throw TrainingError("training diverged: non-finite loss", epoch);
            nn::optimizer_step(model.encoder.mutable_parameters(), r.grad_encoder, enc_opt);
            nn::optimizer_step(model.decoder.mutable_parameters(), r.grad_decoder, dec_opt);
            epoch_loss += r.loss * static_cast<double>(count);
            seen += count;
        }
        const double val_loss = elbo(model, val_x, val_c, val_eps, false).loss;
        if (!std::isfinite(val_loss)) throw TrainingError("training diverged: non-finite validation loss", epoch);
        if (val_loss < best) {
            best = val_loss;
            since_best = 0;
            result.best_epoch = epoch;
            std::copy(model.encoder.parameters().begin(), model.encoder.parameters().end(), best_enc.begin());
            std::copy(model.decoder.parameters().begin(), model.decoder.parameters().end(), best_dec.begin());
        } else {
            ++since_best;
        }
        result.history.push_back({epoch, epoch_loss / static_cast<double>(seen), val_loss, best});
        if (cfg.patience > 0 && since_best >= cfg.patience) break;
    }
    model.encoder.set_parameters(best_enc);
    model.decoder.set_parameters(best_dec);
    return result;
}

/// Monte Carlo draws from the generator: z ~ N(0, I), decoded and mapped back to dB.
/// Latent draws are taken column by column from `rng`.
inline std::vector<AttenuationProfile> generate(const CvaeModel& m, const TargetState& condition, std::size_t n, Rng& rng) {
    std::vector<AttenuationProfile> out;
    if (n == 0) return out;
    const auto cols = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd z = detail::normal_matrix(static_cast<Eigen::Index>(m.latent_dim), cols, rng);
    const Eigen::MatrixXd cond = detail::normalized_condition(m, condition).replicate(1, cols);
    const Eigen::MatrixXd u = decode_normalized(m, z, cond);
    out.reserve(n);
    const auto& norm = m.normalization;
    for (Eigen::Index j = 0; j < cols; ++j) {
        AttenuationProfile p;
        p.condition = condition;
        p.values.resize(m.profile_length);
        for (std::size_t i = 0; i < m.profile_length; ++i)
            p.values[i] = u(static_cast<Eigen::Index>(i), j) * norm.profile_scale[i] + norm.profile_mean[i];
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace rfsense

#endif
