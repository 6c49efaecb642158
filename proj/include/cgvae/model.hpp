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
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgvae/atom_types.hpp"
#include "cgvae/autodiff.hpp"
#include "cgvae/graph.hpp"
#include "cgvae/tensor.hpp"

namespace cgvae {

struct ModelConfig {
  int latent_dim = 32;
  int propagation_steps = 7;
  int hidden_width = 200;
  // Distances 1..max_distance each get a bucket, then ">max" and "none".
  int max_distance = 8;
  bool master_node = true;
  bool use_distance = true;       // false: ablation A
  bool independent_edges = false; // true: ablation B
  bool decoder_ggnn = true;       // false: ablation C

  [[nodiscard]] int distance_buckets() const { return max_distance + 2; }
  [[nodiscard]] int disconnected_bucket() const { return max_distance + 1; }
  [[nodiscard]] nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct GruIds {
  ParamId input;    // h x 3h  (update | reset | candidate)
  ParamId gates;    // h x 2h  (update | reset)
  ParamId recurrent;// h x h   (candidate)
  ParamId bias;     // 1 x 3h
};

struct GgnnIds {
  ParamId edges;       // (K*h) x h, one block per edge type
  GruIds gru;
  ParamId master_init; // 1 x h, unused without a master node
  int edge_types = 0;
  int width = 0;
};

struct EncoderIds {
  ParamId embed;       // |types| x h
  GgnnIds ggnn;
  ParamId mu_w, mu_b, log_sigma_w, log_sigma_b;
};

struct DecoderIds {
  ParamId type_w, type_b; // z -> type logits
  GgnnIds ggnn;
  ParamId stop;           // 1 x h
  ParamId w_focus, w_target, w_distance, w_init, w_component, b_hidden;
  ParamId target_w, target_b;   // hidden block 0 -> scalar
  ParamId label_w, label_b;     // hidden blocks 1..3 -> one logit each
};

struct PropertyIds {
  ParamId gate_w, gate_b, value_w, value_b;
};

class Model {
 public:
  Model(AtomTypeTable types, ModelConfig config, std::uint64_t seed);

  [[nodiscard]] const AtomTypeTable& types() const { return types_; }
  [[nodiscard]] const ModelConfig& config() const { return config_; }
  [[nodiscard]] ParameterSet& params() { return params_; }
  [[nodiscard]] const ParameterSet& params() const { return params_; }

  [[nodiscard]] int latent_dim() const { return config_.latent_dim; }
  [[nodiscard]] int state_width() const { return config_.latent_dim + static_cast<int>(types_.size()); }
  [[nodiscard]] int num_types() const { return static_cast<int>(types_.size()); }

  [[nodiscard]] const EncoderIds& encoder() const { return encoder_; }
  [[nodiscard]] const DecoderIds& decoder() const { return decoder_; }
  [[nodiscard]] const PropertyIds& property() const { return property_; }

  static constexpr int kBondTypes = 3;

 private:
  GgnnIds add_ggnn(const std::string& prefix, int width, std::mt19937_64& rng);

  AtomTypeTable types_;
  ModelConfig config_;
  ParameterSet params_;
  EncoderIds encoder_{};
  DecoderIds decoder_{};
  PropertyIds property_{};
};

// Adjacency of a graph in the form used for message passing: one matrix per
// edge type over the nodes plus (optionally) a trailing master node.
struct MessageGraph {
  int num_nodes = 0;
  bool master = false;
  std::vector<Tensor> adjacency;

  [[nodiscard]] int total() const { return num_nodes + (master ? 1 : 0); }
};

MessageGraph message_graph(const MolecularGraph& g, bool master);
MessageGraph message_graph(int num_nodes, std::span<const Edge> edges, bool master);

ad::Var gru_cell(ad::Tape& tape, const ParameterSet& params, const GruIds& ids, ad::Var input,
                 ad::Var state);

// Runs `steps` rounds of gated propagation from `initial` (num_nodes x h) and
// returns the final node states without the master row.
ad::Var propagate(ad::Tape& tape, const ParameterSet& params, const GgnnIds& ids,
                  ad::Var initial, const MessageGraph& graph, int steps);

}  // namespace cgvae
