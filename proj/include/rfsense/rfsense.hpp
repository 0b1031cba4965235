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

#ifndef RFSENSE_RFSENSE_HPP
#define RFSENSE_RFSENSE_HPP

#include "bench.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "cvae.hpp"
#include "diffraction.hpp"
#include "error.hpp"
#include "fresnel.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "nn/network.hpp"
#include "nn/optimizer.hpp"
#include "nn/tensor.hpp"
#include "parallel.hpp"
#include "persistence.hpp"
#include "prior_sampler.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "rss_channel.hpp"

#endif
