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

#include <random>
#include <vector>

#include "cgvae/autodiff.hpp"
#include "cgvae/graph.hpp"
#include "cgvae/model.hpp"

namespace cgvae {

// Per-node diagonal Gaussian posterior, one row per node.
struct Posterior {
  ad::Var mu;         // N x d
  ad::Var log_sigma;  // N x d

  [[nodiscard]] int num_nodes() const { return static_cast<int>(mu.rows()); }
};

struct NodePosterior {
  RowVector<double> mu;
  RowVector<double> sigma;
};

Posterior encode(ad::Tape& tape, const Model& model, const MolecularGraph& graph);

std::vector<NodePosterior> posterior_values(const Posterior& posterior);

// z = mu + sigma * eps with eps ~ N(0, I) drawn from `rng`.
ad::Var sample_latents(ad::Tape& tape, const Posterior& posterior, std::mt19937_64& rng);

// Sum over nodes and dimensions of KL(q || N(0, I)).
ad::Var kl_loss(ad::Tape& tape, const Posterior& posterior);

// Closed-form KL of a diagonal Gaussian against N(0, I); plain values.
double kl_divergence(const Tensor& mu, const Tensor& sigma);

}  // namespace cgvae
