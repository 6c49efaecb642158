// Copyright 2026 The CGVAE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "cgvae/tensor.hpp"

namespace cgvae {

// Independent stream for (seed, purpose, ...) so every consumer of
// randomness is reproducible regardless of scheduling.
std::mt19937_64 derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

enum class RngPurpose : std::uint64_t { kInit = 1, kShuffle = 2, kTraces = 3, kLatent = 4, kSample = 5, kOptimize = 6 };

inline std::uint64_t purpose(RngPurpose p) { return static_cast<std::uint64_t>(p); }

Tensor standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

// Index drawn from a discrete distribution given by (unnormalised) weights.
int sample_index(const double* weights, int n, std::mt19937_64& rng);

}  // namespace cgvae
