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

#include "cgvae/optim.hpp"

#include <cmath>
#include <string>

#include "cgvae/errors.hpp"

namespace cgvae {

AdamState::AdamState(const ParameterSet& params, AdamConfig cfg) : config(cfg) {
  m.reserve(params.size());
  v.reserve(params.size());
  for (const auto& p : params) {
    m.push_back(Tensor::Zero(p.value.rows(), p.value.cols()));
    v.push_back(Tensor::Zero(p.value.rows(), p.value.cols()));
  }
}

void adam_step(ParameterSet& params, const GradientBuffer& grads, AdamState& state) {
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw DimensionError("adam_step: parameter/gradient/state count mismatch");
  }
  for (ParamId i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params.value(i).rows() || grads[i].cols() != params.value(i).cols()) {
      throw DimensionError("adam_step: gradient shape mismatch for " + params[i].name);
    }
    if (!grads[i].allFinite()) {
      throw NumericError("adam_step: non-finite gradient for parameter " + params[i].name +
                         "; step aborted");
    }
  }
  const AdamConfig& c = state.config;
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (ParamId i = 0; i < params.size(); ++i) {
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    const Tensor& g = grads[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    params.value(i).array() -=
        c.lr * (m.array() / correct1) / ((v.array() / correct2).sqrt() + c.eps);
  }
}

}  // namespace cgvae
