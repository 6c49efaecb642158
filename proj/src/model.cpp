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

#include "cgvae/model.hpp"

#include <cmath>

#include "cgvae/errors.hpp"
#include "cgvae/rng.hpp"

namespace cgvae {

nlohmann::json ModelConfig::to_json() const {
  return {{"latent_dim", latent_dim},
          {"propagation_steps", propagation_steps},
          {"hidden_width", hidden_width},
          {"max_distance", max_distance},
          {"master_node", master_node},
          {"use_distance", use_distance},
          {"independent_edges", independent_edges},
          {"decoder_ggnn", decoder_ggnn}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.latent_dim = j.at("latent_dim").get<int>();
    c.propagation_steps = j.at("propagation_steps").get<int>();
    c.hidden_width = j.at("hidden_width").get<int>();
    c.max_distance = j.at("max_distance").get<int>();
    c.master_node = j.at("master_node").get<bool>();
    c.use_distance = j.at("use_distance").get<bool>();
    c.independent_edges = j.at("independent_edges").get<bool>();
    c.decoder_ggnn = j.at("decoder_ggnn").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model config: ") + e.what());
  }
  if (c.latent_dim < 1 || c.propagation_steps < 0 || c.hidden_width < 1 || c.max_distance < 1) {
    throw DataError("model config: non-positive dimension");
  }
  return c;
}

Model::Model(AtomTypeTable types, ModelConfig config, std::uint64_t seed)
    : types_(std::move(types)), config_(config) {
  if (types_.size() == 0) throw UsageError("model needs at least one atom type");
  if (config_.latent_dim < 1 || config_.hidden_width < 1) {
    throw UsageError("model dimensions must be positive");
  }
  std::mt19937_64 rng = derive_rng(seed, {purpose(RngPurpose::kInit)});
  const int h = state_width();
  const int d = config_.latent_dim;
  const int t = num_types();
  const int hidden = config_.hidden_width;

  encoder_.embed = params_.add_glorot("encoder/embed", t, h, rng);
  encoder_.ggnn = add_ggnn("encoder", h, rng);
  encoder_.mu_w = params_.add_glorot("encoder/mu_w", h, d, rng);
  encoder_.mu_b = params_.add_zeros("encoder/mu_b", 1, d);
  encoder_.log_sigma_w = params_.add_glorot("encoder/log_sigma_w", h, d, rng);
  encoder_.log_sigma_b = params_.add_zeros("encoder/log_sigma_b", 1, d);

  decoder_.type_w = params_.add_glorot("decoder/type_w", d, t, rng);
  decoder_.type_b = params_.add_zeros("decoder/type_b", 1, t);
  decoder_.ggnn = add_ggnn("decoder", h, rng);
  decoder_.stop = params_.add_uniform("decoder/stop", 1, h, 0.1, rng);

  // The first edge-MLP layer acts on [h_v, h_u, distance, H_init, H_t]; it
  // is stored as one block per segment of that concatenation.
  const int fan_in = 4 * h + config_.distance_buckets();
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + hidden));
  const int wide = 4 * hidden;
  decoder_.w_focus = params_.add_uniform("decoder/w_focus", h, wide, limit, rng);
  decoder_.w_target = params_.add_uniform("decoder/w_target", h, wide, limit, rng);
  decoder_.w_distance =
      params_.add_uniform("decoder/w_distance", config_.distance_buckets(), wide, limit, rng);
  decoder_.w_init = params_.add_uniform("decoder/w_init", h, wide, limit, rng);
  decoder_.w_component = params_.add_uniform("decoder/w_component", h, wide, limit, rng);
  decoder_.b_hidden = params_.add_zeros("decoder/b_hidden", 1, wide);
  decoder_.target_w = params_.add_glorot("decoder/target_w", hidden, 1, rng);
  decoder_.target_b = params_.add_zeros("decoder/target_b", 1, 1);
  decoder_.label_w = params_.add_glorot("decoder/label_w", hidden, kBondTypes, rng);
  decoder_.label_b = params_.add_zeros("decoder/label_b", 1, kBondTypes);

  property_.gate_w = params_.add_glorot("property/gate_w", d, 1, rng);
  property_.gate_b = params_.add_zeros("property/gate_b", 1, 1);
  property_.value_w = params_.add_glorot("property/value_w", d, 1, rng);
  property_.value_b = params_.add_zeros("property/value_b", 1, 1);
}

GgnnIds Model::add_ggnn(const std::string& prefix, int width, std::mt19937_64& rng) {
  GgnnIds g;
  g.width = width;
  g.edge_types = kBondTypes + (config_.master_node ? 2 : 0);
  const double limit = std::sqrt(6.0 / (2.0 * width));
  g.edges = params_.add_uniform(prefix + "/edges", static_cast<Eigen::Index>(g.edge_types) * width,
                                width, limit, rng);
  g.gru.input = params_.add_uniform(prefix + "/gru_input", width, 3 * width, limit, rng);
  g.gru.gates = params_.add_uniform(prefix + "/gru_gates", width, 2 * width, limit, rng);
  g.gru.recurrent = params_.add_uniform(prefix + "/gru_recurrent", width, width, limit, rng);
  g.gru.bias = params_.add_zeros(prefix + "/gru_bias", 1, 3 * width);
  g.master_init = params_.add_uniform(prefix + "/master_init", 1, width, 0.1, rng);
  return g;
}

MessageGraph message_graph(int num_nodes, std::span<const Edge> edges, bool master) {
  MessageGraph m;
  m.num_nodes = num_nodes;
  m.master = master;
  const int total = m.total();
  const int kinds = Model::kBondTypes + (master ? 2 : 0);
  m.adjacency.assign(kinds, Tensor::Zero(total, total));
  for (const Edge& e : edges) {
    if (e.order < 1 || e.order > Model::kBondTypes) {
      throw InvalidGraphError("message_graph: bond order out of range");
    }
    Tensor& a = m.adjacency[e.order - 1];
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  if (master && num_nodes > 0) {
    Tensor& to_master = m.adjacency[Model::kBondTypes];
    Tensor& from_master = m.adjacency[Model::kBondTypes + 1];
    const double mean = 1.0 / num_nodes;
    for (int v = 0; v < num_nodes; ++v) {
      to_master(num_nodes, v) = mean;
      from_master(v, num_nodes) = 1.0;
    }
  }
  return m;
}

MessageGraph message_graph(const MolecularGraph& g, bool master) {
  return message_graph(g.num_nodes(), g.edges(), master);
}

ad::Var gru_cell(ad::Tape& tape, const ParameterSet& params, const GruIds& ids, ad::Var input,
                 ad::Var state) {
  const Eigen::Index w = state.cols();
  ad::Var x = ad::add_rowvec(ad::matmul(input, tape.param(params, ids.input)),
                             tape.param(params, ids.bias));
  ad::Var hz = ad::matmul(state, tape.param(params, ids.gates));
  ad::Var z = ad::sigmoid(ad::add(ad::slice_cols(x, 0, w), ad::slice_cols(hz, 0, w)));
  ad::Var r = ad::sigmoid(ad::add(ad::slice_cols(x, w, w), ad::slice_cols(hz, w, w)));
  ad::Var candidate = ad::tanh(ad::add(
      ad::slice_cols(x, 2 * w, w),
      ad::matmul(ad::hadamard(r, state), tape.param(params, ids.recurrent))));
  // (1 - z) * state + z * candidate
  return ad::add(state, ad::hadamard(z, ad::sub(candidate, state)));
}

ad::Var propagate(ad::Tape& tape, const ParameterSet& params, const GgnnIds& ids,
                  ad::Var initial, const MessageGraph& graph, int steps) {
  if (initial.rows() != graph.num_nodes || initial.cols() != ids.width) {
    throw DimensionError("propagate: initial state shape mismatch");
  }
  if (static_cast<int>(graph.adjacency.size()) != ids.edge_types) {
    throw DimensionError("propagate: edge type count mismatch");
  }
  if (steps == 0) return initial;
  ad::Var h = initial;
  if (graph.master) {
    const ad::Var parts[] = {initial, tape.param(params, ids.master_init)};
    h = ad::concat_rows(parts);
  }
  std::vector<ad::Var> adjacency;
  adjacency.reserve(graph.adjacency.size());
  for (const Tensor& a : graph.adjacency) adjacency.push_back(tape.constant(a));
  ad::Var edges = tape.param(params, ids.edges);
  std::vector<ad::Var> gathered(adjacency.size());
  for (int s = 0; s < steps; ++s) {
    for (std::size_t k = 0; k < adjacency.size(); ++k) gathered[k] = ad::matmul(adjacency[k], h);
    ad::Var messages = ad::matmul(ad::concat_cols(gathered), edges);
    h = gru_cell(tape, params, ids.gru, messages, h);
  }
  if (!graph.master) return h;
  std::vector<int> rows(graph.num_nodes);
  for (int v = 0; v < graph.num_nodes; ++v) rows[v] = v;
  return ad::gather_rows(h, rows);
}

}  // namespace cgvae
