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

#ifndef RFSENSE_ERROR_HPP
#define RFSENSE_ERROR_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfsense {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Tensor or vector dimensions that do not chain.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature hit its depth limit before meeting the tolerance.
/// The best available estimate is kept so callers can decide to use it.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, std::complex<double> estimate, double achieved_error)
        : std::runtime_error(what), estimate_(estimate), achieved_error_(achieved_error) {}

    std::complex<double> estimate() const noexcept { return estimate_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    std::complex<double> estimate_;
    double achieved_error_;
};

/// Malformed or mismatched file content; carries the byte offset where reading failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, std::size_t epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

} // namespace rfsense

#endif
