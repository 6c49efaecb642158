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

#include "cgvae/tensor.hpp"

namespace cgvae {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t t = 0;

  AdamState() = default;
  AdamState(const ParameterSet& params, AdamConfig cfg);
};

// One bias-corrected Adam update, in place. A non-finite gradient aborts the
// step with NumericError before any parameter is touched.
void adam_step(ParameterSet& params, const GradientBuffer& grads, AdamState& state);

}  // namespace cgvae
