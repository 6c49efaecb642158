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

#include "cgvae/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cgvae/errors.hpp"
#include "cgvae/rng.hpp"

namespace cgvae {

namespace {

int argmax(const double* values, int n) {
  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (values[i] > 0.0 && (best < 0 || values[i] > values[best])) best = i;
  }
  if (best < 0) throw NoLegalChoiceError("argmax: every choice has zero probability");
  return best;
}

int choose(const Tensor& probs, ChoiceMode mode, std::mt19937_64& rng) {
  const int n = static_cast<int>(probs.size());
  return mode == ChoiceMode::kArgmax ? argmax(probs.data(), n) : sample_index(probs.data(), n, rng);
}

// Segments of the first edge-MLP layer that do not depend on the target.
struct SharedTerms {
  ad::Var target_proj;  // R x 4H, target block applied to every candidate row
  ad::Var global;       // 1 x 4H
};

// Hidden activations to (target logits, label logits).
std::pair<ad::Var, ad::Var> heads(ad::Tape& tape, const Model& model, ad::Var hidden) {
  const ParameterSet& ps = model.params();
  const DecoderIds& ids = model.decoder();
  const int h = model.config().hidden_width;
  ad::Var target = ad::add_rowvec(
      ad::matmul(ad::slice_cols(hidden, 0, h), tape.param(ps, ids.target_w)),
      tape.param(ps, ids.target_b));
  ad::Var label_w = tape.param(ps, ids.label_w);
  std::vector<ad::Var> labels;
  labels.reserve(Model::kBondTypes);
  for (int j = 0; j < Model::kBondTypes; ++j) {
    labels.push_back(ad::matmul(ad::slice_cols(hidden, (j + 1) * h, h), ad::slice_cols(label_w, j, 1)));
  }
  ad::Var label = ad::add_rowvec(ad::concat_cols(labels), tape.param(ps, ids.label_b));
  return {target, label};
}

Tensor one_hot_rows(const std::vector<int>& index, int width) {
  Tensor t = Tensor::Zero(static_cast<Eigen::Index>(index.size()), width);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= 0) t(static_cast<Eigen::Index>(r), index[r]) = 1.0;
  }
  return t;
}

MolecularGraph finish(const MolecularGraph& full, const std::vector<int>& keep,
                      const AtomTypeTable& table) {
  return complete_hydrogens(full.induced(keep), table);
}

}  // namespace

DecoderInputs decoder_inputs(ad::Tape& tape, const Model& model, ad::Var z,
                             const std::vector<int>& types) {
  if (z.rows() != static_cast<Eigen::Index>(types.size()) || z.cols() != model.latent_dim()) {
    throw DimensionError("decoder_inputs: latent shape does not match node count");
  }
  if (types.empty()) throw InvalidGraphError("decoder_inputs: no nodes");
  for (int t : types) {
    if (t < 0 || t >= model.num_types()) throw InvalidGraphError("decoder_inputs: unknown type");
  }
  DecoderInputs in;
  in.types = types;
  const ad::Var parts[] = {z, tape.constant(one_hot_rows(types, model.num_types()))};
  in.initial = ad::concat_cols(parts);
  in.initial_mean = ad::mean_rows(in.initial);
  return in;
}

ad::Var type_log_probs(ad::Tape& tape, const Model& model, ad::Var z) {
  const ParameterSet& ps = model.params();
  const DecoderIds& ids = model.decoder();
  return ad::log_softmax_rows(
      ad::add_rowvec(ad::matmul(z, tape.param(ps, ids.type_w)), tape.param(ps, ids.type_b)));
}

std::vector<int> choose_types(const Tensor& log_probs, ChoiceMode mode, std::mt19937_64& rng) {
  std::vector<int> types(static_cast<std::size_t>(log_probs.rows()));
  for (Eigen::Index v = 0; v < log_probs.rows(); ++v) {
    const Tensor p = log_probs.row(v).array().exp().matrix();
    types[static_cast<std::size_t>(v)] = choose(p, mode, rng);
  }
  return types;
}

ad::Var node_states(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                    const MolecularGraph& graph) {
  if (graph.num_nodes() != static_cast<int>(inputs.types.size())) {
    throw DimensionError("node_states: graph size differs from latent count");
  }
  if (!model.config().decoder_ggnn) return inputs.initial;
  return propagate(tape, model.params(), model.decoder().ggnn, inputs.initial,
                   message_graph(graph, model.config().master_node),
                   model.config().propagation_steps);
}

std::vector<int> distance_buckets(const ModelConfig& config, const MolecularGraph& graph,
                                  int focus) {
  std::vector<int> dist = distances_from(graph, focus);
  for (int& d : dist) {
    if (d == kDisconnected) {
      d = config.disconnected_bucket();
    } else if (d == 0) {
      d = -1;
    } else {
      d = std::min(d, config.max_distance + 1) - 1;
    }
  }
  return dist;
}

EdgeScores score_edges(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                       ad::Var states, const MolecularGraph& graph, const BondLedger& ledger,
                       int focus) {
  const ParameterSet& ps = model.params();
  const DecoderIds& ids = model.decoder();
  const ModelConfig& cfg = model.config();
  const int n = graph.num_nodes();
  if (focus < 0 || focus >= n) throw UsageError("score_edges: focus out of range");

  const int focus_row[] = {focus};
  const std::vector<int> component = component_of(graph, focus);
  ad::Var component_mean = ad::mean_rows(ad::gather_rows(states, component));
  ad::Var global = ad::add(
      ad::add(ad::matmul(ad::gather_rows(states, focus_row), tape.param(ps, ids.w_focus)),
              ad::matmul(inputs.initial_mean, tape.param(ps, ids.w_init))),
      ad::add_rowvec(ad::matmul(component_mean, tape.param(ps, ids.w_component)),
                     tape.param(ps, ids.b_hidden)));

  const ad::Var rows[] = {states, tape.param(ps, ids.stop)};
  ad::Var candidates = ad::concat_rows(rows);
  ad::Var pre = ad::add_rowvec(ad::matmul(candidates, tape.param(ps, ids.w_target)), global);
  if (cfg.use_distance) {
    std::vector<int> buckets = distance_buckets(cfg, graph, focus);
    buckets.push_back(cfg.disconnected_bucket());
    ad::Var onehot = tape.constant(one_hot_rows(buckets, cfg.distance_buckets()));
    pre = ad::add(pre, ad::matmul(onehot, tape.param(ps, ids.w_distance)));
  }
  auto [target_logits, label_logits] = heads(tape, model, ad::relu(pre));

  const MaskContext ctx{graph, ledger, focus};
  EdgeScores s;
  s.num_nodes = n;
  s.target_mask = target_mask(ctx);
  s.target_log_probs = ad::masked_log_softmax(target_logits, s.target_mask);
  s.label_logits = label_logits;
  s.label_masks.resize(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) s.label_masks[static_cast<std::size_t>(u)] = label_mask(ctx, u);
  return s;
}

ad::Var choice_log_prob(const EdgeScores& scores, const EdgeChoice& choice) {
  if (choice.is_stop()) return ad::element(scores.target_log_probs, scores.stop_row(), 0);
  const int u = choice.target;
  if (u < 0 || u >= scores.num_nodes || !scores.target_mask[static_cast<std::size_t>(u)]) {
    throw NoLegalChoiceError("choice_log_prob: target is masked");
  }
  const auto& lm = scores.label_masks[static_cast<std::size_t>(u)];
  if (choice.order < 1 || choice.order > kMaxBondOrder || !lm[static_cast<std::size_t>(choice.order - 1)]) {
    throw NoLegalChoiceError("choice_log_prob: bond order is masked");
  }
  const int row[] = {u};
  ad::Var label = ad::masked_log_softmax(ad::gather_rows(scores.label_logits, row), lm);
  return ad::add(ad::element(scores.target_log_probs, u, 0), ad::element(label, 0, choice.order - 1));
}

Tensor target_probabilities(const EdgeScores& scores) {
  const Tensor& lp = scores.target_log_probs.value();
  Tensor p = Tensor::Zero(lp.rows(), 1);
  for (Eigen::Index i = 0; i < lp.rows(); ++i) {
    if (scores.target_mask[static_cast<std::size_t>(i)]) p(i, 0) = std::exp(lp(i, 0));
  }
  return p;
}

EdgeChoice choose_edge(const EdgeScores& scores, ChoiceMode mode, std::mt19937_64& rng) {
  const Tensor probs = target_probabilities(scores);
  const int target = choose(probs, mode, rng);
  if (target == scores.stop_row()) return EdgeChoice::stop();
  const Tensor label = ad::masked_softmax_values(scores.label_logits.value().row(target),
                                                 scores.label_masks[static_cast<std::size_t>(target)]);
  return {target, choose(label, mode, rng) + 1};
}

DecoderState initial_state(const AtomTypeTable& table, const std::vector<int>& types, int start) {
  DecoderState s;
  s.graph = MolecularGraph(types);
  s.ledger = BondLedger(s.graph, table);
  s.queued.assign(types.size(), 0);
  if (start < 0 || start >= static_cast<int>(types.size())) {
    throw UsageError("initial_state: start node out of range");
  }
  s.start = start;
  s.queue.push_back(start);
  s.queued[static_cast<std::size_t>(start)] = 1;
  return s;
}

void advance(DecoderState& state, const EdgeChoice& choice) {
  if (state.done()) throw UsageError("advance: generation already finished");
  const int focus = state.focus();
  apply_choice(state.graph, state.ledger, focus, choice);
  if (choice.is_stop()) {
    state.queue.pop_front();
    return;
  }
  if (!state.queued[static_cast<std::size_t>(choice.target)]) {
    state.queued[static_cast<std::size_t>(choice.target)] = 1;
    state.queue.push_back(choice.target);
  }
}

Generation generate(const Model& model, const Tensor& z, std::mt19937_64& rng,
                    const GenerateOptions& options) {
  if (model.config().independent_edges) return generate_independent(model, z, rng, options);
  ad::Tape tape(false);
  ad::Var zv = tape.constant(z);
  const std::vector<int> types =
      choose_types(type_log_probs(tape, model, zv).value(), options.types, rng);
  DecoderInputs inputs = decoder_inputs(tape, model, zv, types);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(types.size()) - 1);
  DecoderState state = initial_state(model.types(), types, pick(rng));

  Generation out;
  out.start = state.start;
  ad::Var states;
  bool stale = true;
  while (!state.done()) {
    if (stale) {
      states = node_states(tape, model, inputs, state.graph);
      stale = false;
    }
    EdgeScores scores = score_edges(tape, model, inputs, states, state.graph, state.ledger,
                                    state.focus());
    const EdgeChoice choice = choose_edge(scores, options.edges, rng);
    advance(state, choice);
    out.choices.push_back(choice);
    if (!choice.is_stop()) stale = true;
  }
  out.molecule = finish(state.graph, component_of(state.graph, state.start), model.types());
  out.full = std::move(state.graph);
  return out;
}

PairScores score_pairs(ad::Tape& tape, const Model& model, const DecoderInputs& inputs) {
  const ParameterSet& ps = model.params();
  const DecoderIds& ids = model.decoder();
  const ModelConfig& cfg = model.config();
  const int n = static_cast<int>(inputs.types.size());
  PairScores out;
  std::vector<int> first;
  std::vector<int> second;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      out.pairs.emplace_back(u, v);
      first.push_back(u);
      second.push_back(v);
    }
  }
  if (out.pairs.empty()) return out;
  ad::Var states = node_states(tape, model, inputs, MolecularGraph(inputs.types));
  ad::Var global = ad::add_rowvec(
      ad::matmul(inputs.initial_mean,
                 ad::add(tape.param(ps, ids.w_init), tape.param(ps, ids.w_component))),
      tape.param(ps, ids.b_hidden));
  if (cfg.use_distance) {
    const int bucket[] = {cfg.disconnected_bucket()};
    global = ad::add(global, ad::gather_rows(tape.param(ps, ids.w_distance), bucket));
  }
  ad::Var from = ad::matmul(states, tape.param(ps, ids.w_focus));
  ad::Var to = ad::matmul(states, tape.param(ps, ids.w_target));
  ad::Var pre = ad::add_rowvec(ad::add(ad::gather_rows(from, first), ad::gather_rows(to, second)),
                               global);
  std::tie(out.edge_logits, out.label_logits) = heads(tape, model, ad::relu(pre));
  return out;
}

Generation generate_independent(const Model& model, const Tensor& z, std::mt19937_64& rng,
                                const GenerateOptions& options) {
  ad::Tape tape(false);
  ad::Var zv = tape.constant(z);
  const std::vector<int> types =
      choose_types(type_log_probs(tape, model, zv).value(), options.types, rng);
  DecoderInputs inputs = decoder_inputs(tape, model, zv, types);
  PairScores scores = score_pairs(tape, model, inputs);

  const std::size_t p = scores.pairs.size();
  std::vector<double> prob(p);
  std::vector<std::size_t> kept;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < p; ++i) {
    prob[i] = 1.0 / (1.0 + std::exp(-scores.edge_logits.value()(static_cast<Eigen::Index>(i), 0)));
    const bool on = options.edges == ChoiceMode::kArgmax ? prob[i] > 0.5 : unit(rng) < prob[i];
    if (on) kept.push_back(i);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });

  MolecularGraph graph(types);
  BondLedger ledger(graph, model.types());
  Generation out;
  for (std::size_t i : kept) {
    const auto [u, v] = scores.pairs[i];
    const MaskContext ctx{graph, ledger, u};
    const std::vector<std::uint8_t> mask = label_mask(ctx, v);
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) continue;
    const Tensor label = ad::masked_softmax_values(
        scores.label_logits.value().row(static_cast<Eigen::Index>(i)), mask);
    const EdgeChoice choice{v, choose(label, options.edges, rng) + 1};
    apply_choice(graph, ledger, u, choice);
    out.choices.push_back(choice);
  }

  std::vector<int> best;
  std::vector<std::uint8_t> seen(types.size(), 0);
  for (int v = 0; v < graph.num_nodes(); ++v) {
    if (seen[static_cast<std::size_t>(v)]) continue;
    std::vector<int> comp = component_of(graph, v);
    for (int w : comp) seen[static_cast<std::size_t>(w)] = 1;
    if (comp.size() > best.size()) best = std::move(comp);
  }
  out.start = best.front();
  out.molecule = finish(graph, best, model.types());
  out.full = std::move(graph);
  return out;
}

}  // namespace cgvae
