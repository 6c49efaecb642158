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

#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cgvae/autodiff.hpp"
#include "cgvae/decoder.hpp"
#include "cgvae/encoder.hpp"
#include "cgvae/graph.hpp"
#include "cgvae/model.hpp"
#include "cgvae/traces.hpp"

namespace cgvae {

// Decoder node states per partial edge set, shared by every transition
// scored on one tape.
class StateCache {
 public:
  StateCache(const Model& model, const DecoderInputs& inputs) : model_(model), inputs_(inputs) {}
  ad::Var states(ad::Tape& tape, const MolecularGraph& partial);

 private:
  const Model& model_;
  const DecoderInputs& inputs_;
  std::map<std::vector<Edge>, ad::Var> cache_;
};

// Mean over the transition's valid expansions of log p(expansion | state).
ad::Var transition_edge_term(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                             StateCache& cache, const TraceSample& trace,
                             const Transition& transition);

struct ReconstructionTerms {
  ad::Var loss;             // -(node term + edge term)
  double node_term = 0.0;
  double edge_term = 0.0;
  // log N and log |traces| estimate; not part of `loss`.
  double dropped_constants = 0.0;
  int transitions = 0;
};

// Reconstruction loss given latents aligned with the graph's nodes. With
// several traces, transitions are pooled and subsampled back to one trace's
// worth.
ReconstructionTerms reconstruction_loss(ad::Tape& tape, const Model& model,
                                        const MolecularGraph& graph,
                                        std::span<const TraceSample> traces, ad::Var z,
                                        std::mt19937_64& rng);

struct LossOptions {
  double lambda_latent = 0.3;
  double lambda_property = 0.0;
  bool sample_latents = true;  // false: decode from the posterior mean
};

struct LossTerms {
  ad::Var total;
  double recon = 0.0;
  double latent = 0.0;
  double property = 0.0;
  double dropped_constants = 0.0;
};

// L = L_recon + lambda_latent * KL + lambda_property * (R(z) - Q)^2, the last
// term only when `property_target` is set.
LossTerms total_loss(ad::Tape& tape, const Model& model, const MolecularGraph& graph,
                     std::span<const TraceSample> traces, const LossOptions& options,
                     std::optional<double> property_target, std::mt19937_64& rng);

}  // namespace cgvae
