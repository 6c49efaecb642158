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

#include "cgvae/objective.hpp"

#include <algorithm>
#include <cmath>

#include "cgvae/errors.hpp"
#include "cgvae/propopt.hpp"

namespace cgvae {

ad::Var StateCache::states(ad::Tape& tape, const MolecularGraph& partial) {
  std::vector<Edge> key = partial.edges();
  std::sort(key.begin(), key.end());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  ad::Var s = node_states(tape, model_, inputs_, partial);
  cache_.emplace(std::move(key), s);
  return s;
}

ad::Var transition_edge_term(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                             StateCache& cache, const TraceSample& trace,
                             const Transition& transition) {
  const MolecularGraph partial = transition_graph(trace, transition);
  BondLedger ledger(partial, model.types());
  ledger.closed = transition.closed;
  const ad::Var states = cache.states(tape, partial);
  const EdgeScores scores =
      score_edges(tape, model, inputs, states, partial, ledger, transition.focus);
  choice_log_prob(scores, transition.chosen);
  std::vector<ad::Var> terms;
  terms.reserve(transition.valid.size());
  for (const EdgeChoice& e : transition.valid) terms.push_back(choice_log_prob(scores, e));
  return ad::affine(ad::sum_all(terms), 1.0 / static_cast<double>(terms.size()));
}

namespace {

ad::Var node_type_term(ad::Tape& tape, const Model& model, ad::Var z,
                       const std::vector<int>& types) {
  Tensor pick = Tensor::Zero(static_cast<Eigen::Index>(types.size()), model.num_types());
  for (std::size_t v = 0; v < types.size(); ++v) pick(static_cast<Eigen::Index>(v), types[v]) = 1.0;
  return ad::sum(ad::hadamard(type_log_probs(tape, model, z), tape.constant(std::move(pick))));
}

// Bernoulli loss over all node pairs plus bond-order cross-entropy on the
// true edges (independent-edge decoder).
ad::Var independent_edge_term(ad::Tape& tape, const Model& model, const DecoderInputs& inputs,
                              const MolecularGraph& graph) {
  const PairScores scores = score_pairs(tape, model, inputs);
  if (scores.pairs.empty()) return tape.constant_scalar(0.0);
  const Eigen::Index p = static_cast<Eigen::Index>(scores.pairs.size());
  Tensor sign(p, 1);
  std::vector<ad::Var> label_terms;
  const MolecularGraph empty(graph.types());
  const BondLedger ledger(empty, model.types());
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto [u, v] = scores.pairs[static_cast<std::size_t>(i)];
    const int order = graph.bond_order(u, v);
    sign(i, 0) = order > 0 ? 1.0 : -1.0;
    if (order == 0) continue;
    const std::vector<std::uint8_t> mask = label_mask(MaskContext{empty, ledger, u}, v);
    const int row[] = {static_cast<int>(i)};
    label_terms.push_back(ad::element(
        ad::masked_log_softmax(ad::gather_rows(scores.label_logits, row), mask), 0, order - 1));
  }
  label_terms.push_back(
      ad::sum(ad::log_sigmoid(ad::hadamard(scores.edge_logits, tape.constant(std::move(sign))))));
  return ad::sum_all(label_terms);
}

}  // namespace

ReconstructionTerms reconstruction_loss(ad::Tape& tape, const Model& model,
                                        const MolecularGraph& graph,
                                        std::span<const TraceSample> traces, ad::Var z,
                                        std::mt19937_64& rng) {
  if (z.rows() != graph.num_nodes()) throw DimensionError("reconstruction_loss: latent count");
  ReconstructionTerms out;
  ad::Var node_term = node_type_term(tape, model, z, graph.types());
  DecoderInputs inputs = decoder_inputs(tape, model, z, graph.types());
  ad::Var edge_term;
  if (model.config().independent_edges) {
    edge_term = independent_edge_term(tape, model, inputs, graph);
  } else {
    if (traces.empty()) throw UsageError("reconstruction_loss: no traces");
    std::vector<std::pair<const TraceSample*, const Transition*>> picked;
    for (const TraceSample& tr : traces) {
      if (tr.num_nodes != graph.num_nodes()) {
        throw InvalidGraphError("reconstruction_loss: trace does not belong to this graph");
      }
      for (const Transition& t : tr.transitions) picked.emplace_back(&tr, &t);
    }
    if (traces.size() > 1) {
      std::shuffle(picked.begin(), picked.end(), rng);
      picked.resize(traces.front().transitions.size());
    }
    StateCache cache(model, inputs);
    std::vector<ad::Var> terms;
    terms.reserve(picked.size());
    for (const auto& [tr, t] : picked) {
      terms.push_back(transition_edge_term(tape, model, inputs, cache, *tr, *t));
    }
    edge_term = ad::sum_all(terms);
    out.transitions = static_cast<int>(picked.size());
    out.dropped_constants = log_inverse_process_probability(traces.front());
  }
  out.node_term = node_term.scalar();
  out.edge_term = edge_term.scalar();
  out.loss = ad::affine(ad::add(node_term, edge_term), -1.0);
  return out;
}

LossTerms total_loss(ad::Tape& tape, const Model& model, const MolecularGraph& graph,
                     std::span<const TraceSample> traces, const LossOptions& options,
                     std::optional<double> property_target, std::mt19937_64& rng) {
  if (options.lambda_latent < 0.0 || options.lambda_property < 0.0) {
    throw UsageError("total_loss: loss weights must be non-negative");
  }
  const Posterior posterior = encode(tape, model, graph);
  ad::Var z = options.sample_latents ? sample_latents(tape, posterior, rng) : posterior.mu;
  ReconstructionTerms recon = reconstruction_loss(tape, model, graph, traces, z, rng);
  ad::Var kl = kl_loss(tape, posterior);
  LossTerms out;
  out.recon = recon.loss.scalar();
  out.latent = kl.scalar();
  out.dropped_constants = recon.dropped_constants;
  std::vector<ad::Var> parts{recon.loss, ad::affine(kl, options.lambda_latent)};
  if (property_target && options.lambda_property > 0.0) {
    ad::Var reg = regression_loss(tape, model, z, *property_target);
    out.property = reg.scalar();
    parts.push_back(ad::affine(reg, options.lambda_property));
  }
  out.total = ad::sum_all(parts);
  return out;
}

}  // namespace cgvae
