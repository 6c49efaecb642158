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

#include <deque>
#include <random>
#include <vector>

#include "cgvae/autodiff.hpp"
#include "cgvae/graph.hpp"
#include "cgvae/masking.hpp"
#include "cgvae/model.hpp"

namespace cgvae {

enum class ChoiceMode { kSample, kArgmax };

// Quantities fixed once the latent nodes are typed.
struct DecoderInputs {
  std::vector<int> types;
  ad::Var initial;       // N x h, rows [z_v, one_hot(type_v)]
  ad::Var initial_mean;  // 1 x h
};

// Builds the initial states from latents and given types.
DecoderInputs decoder_inputs(ad::Tape& tape, const Model& model, ad::Var z,
                             const std::vector<int>& types);

// N x |types| log-probabilities of each node's type given its latent.
ad::Var type_log_probs(ad::Tape& tape, const Model& model, ad::Var z);

// Chooses a type per node from `type_log_probs`.
std::vector<int> choose_types(const Tensor& log_probs, ChoiceMode mode, std::mt19937_64& rng);

// Node states of the partial graph; a function of the current edge set only.
ad::Var node_states(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                    const MolecularGraph& graph);

// Scores for every possible next edge from `focus`.
struct EdgeScores {
  int num_nodes = 0;
  ad::Var target_log_probs;  // (N+1) x 1, masked; last row is stop
  ad::Var label_logits;      // (N+1) x 3
  std::vector<std::uint8_t> target_mask;
  std::vector<std::vector<std::uint8_t>> label_masks;  // per target node

  [[nodiscard]] int stop_row() const { return num_nodes; }
};

EdgeScores score_edges(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                       ad::Var states, const MolecularGraph& graph, const BondLedger& ledger,
                       int focus);

// Target probabilities with exact zeros on masked rows.
Tensor target_probabilities(const EdgeScores& scores);

// log p(choice | state) as a tape value.
ad::Var choice_log_prob(const EdgeScores& scores, const EdgeChoice& choice);

// Distance bucket of every node relative to `focus` (focus itself is -1).
std::vector<int> distance_buckets(const ModelConfig& config, const MolecularGraph& graph,
                                  int focus);

// Mutable generation state: partial graph, bond ledger and BFS queue.
struct DecoderState {
  MolecularGraph graph;
  BondLedger ledger;
  std::deque<int> queue;
  std::vector<std::uint8_t> queued;
  int start = -1;

  [[nodiscard]] bool done() const { return queue.empty(); }
  [[nodiscard]] int focus() const { return queue.front(); }
};

DecoderState initial_state(const AtomTypeTable& table, const std::vector<int>& types, int start);

// Applies a choice and advances the queue.
void advance(DecoderState& state, const EdgeChoice& choice);

EdgeChoice choose_edge(const EdgeScores& scores, ChoiceMode mode, std::mt19937_64& rng);

struct GenerateOptions {
  ChoiceMode types = ChoiceMode::kSample;
  ChoiceMode edges = ChoiceMode::kSample;
};

struct Generation {
  MolecularGraph molecule;  // connected component of the start, hydrogens completed
  MolecularGraph full;      // every latent node, including unconnected ones
  std::vector<EdgeChoice> choices;
  int start = -1;
};

// Decodes one molecule from N x d latents.
Generation generate(const Model& model, const Tensor& z, std::mt19937_64& rng,
                    const GenerateOptions& options = {});

// ---- independent-edge decoder (ablation B) ----------------------------------

struct PairScores {
  std::vector<std::pair<int, int>> pairs;  // u < v
  ad::Var edge_logits;                     // P x 1
  ad::Var label_logits;                    // P x 3
};

PairScores score_pairs(ad::Tape& tape, const Model& model, const DecoderInputs& inputs);

Generation generate_independent(const Model& model, const Tensor& z, std::mt19937_64& rng,
                                const GenerateOptions& options = {});

}  // namespace cgvae
