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

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>
#include <vector>

#include "cgvae/decoder.hpp"
#include "cgvae/objective.hpp"
#include "cgvae/traces.hpp"

namespace cgvae::testing {

// Brute-force enumeration of every breadth-first trace of a small graph,
// independent of extract_traces. Each trace carries its probability under
// the random traversal (uniform start, uniform choice among the remaining
// edges at the focus).
struct EnumeratedTrace {
  TraceSample sample;
  double weight = 0.0;
};

inline void enumerate_from(const MolecularGraph& g, MolecularGraph partial,
                           std::vector<std::uint8_t> closed, std::vector<std::uint8_t> queued,
                           std::deque<int> queue, TraceSample prefix, double weight,
                           std::vector<EnumeratedTrace>& out) {
  if (queue.empty()) {
    out.push_back({std::move(prefix), weight});
    return;
  }
  const int focus = queue.front();
  std::vector<EdgeChoice> remaining;
  for (const Neighbor& nb : g.neighbors(focus)) {
    if (!partial.has_edge(focus, nb.node)) remaining.push_back({nb.node, nb.order});
  }
  std::sort(remaining.begin(), remaining.end());
  if (remaining.empty()) remaining.push_back(EdgeChoice::stop());
  for (const EdgeChoice& c : remaining) {
    Transition t;
    t.edges = partial.edges();
    t.closed = closed;
    t.focus = focus;
    t.valid = remaining;
    t.chosen = c;
    TraceSample next = prefix;
    next.transitions.push_back(t);
    MolecularGraph p = partial;
    auto cl = closed;
    auto qd = queued;
    auto q = queue;
    if (c.is_stop()) {
      cl[static_cast<std::size_t>(focus)] = 1;
      q.pop_front();
    } else {
      p.add_edge(focus, c.target, c.order);
      if (!qd[static_cast<std::size_t>(c.target)]) {
        qd[static_cast<std::size_t>(c.target)] = 1;
        q.push_back(c.target);
      }
    }
    enumerate_from(g, std::move(p), std::move(cl), std::move(qd), std::move(q), std::move(next),
                   weight / static_cast<double>(remaining.size()), out);
  }
}

inline std::vector<EnumeratedTrace> enumerate_traces(const MolecularGraph& g) {
  std::vector<EnumeratedTrace> out;
  const int n = g.num_nodes();
  for (int start = 0; start < n; ++start) {
    TraceSample base;
    base.num_nodes = n;
    base.types = g.types();
    base.start = start;
    base.permutation.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) base.permutation[static_cast<std::size_t>(i)] = i;
    std::vector<std::uint8_t> queued(static_cast<std::size_t>(n), 0);
    queued[static_cast<std::size_t>(start)] = 1;
    enumerate_from(g, MolecularGraph(g.types()), std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0),
                   queued, std::deque<int>{start}, base, 1.0 / n, out);
  }
  return out;
}

// Scores log p(choice | state) for the transitions of enumerated traces with
// fixed latents; caches by state so the two sides of the identity share the
// same numbers only through the model, not through any summation.
class StepScorer {
 public:
  StepScorer(const Model& model, const Tensor& z, const std::vector<int>& types)
      : model_(model), tape_(false) {
    inputs_ = decoder_inputs(tape_, model, tape_.constant(z), types);
  }

  double log_prob(const TraceSample& tr, const Transition& t, const EdgeChoice& c) {
    std::vector<Edge> edges = t.edges;
    std::sort(edges.begin(), edges.end());
    const auto key = std::make_tuple(edges, t.closed, t.focus, c);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const MolecularGraph partial = transition_graph(tr, t);
    BondLedger ledger(partial, model_.types());
    ledger.closed = t.closed;
    const ad::Var states = node_states(tape_, model_, inputs_, partial);
    const EdgeScores s = score_edges(tape_, model_, inputs_, states, partial, ledger, t.focus);
    const double v = choice_log_prob(s, c).scalar();
    memo_.emplace(key, v);
    return v;
  }

  [[nodiscard]] const DecoderInputs& inputs() const { return inputs_; }
  ad::Tape& tape() { return tape_; }

 private:
  const Model& model_;
  ad::Tape tape_;
  DecoderInputs inputs_;
  std::map<std::tuple<std::vector<Edge>, std::vector<std::uint8_t>, int, EdgeChoice>, double> memo_;
};

struct ObjectiveForms {
  double trace_average = 0.0;   // sum_pi w(pi) log p(pi)
  double state_form = 0.0;      // log(1/N) + sum_s P(s) mean_eps log p(eps|s)
  double implementation = 0.0;  // log(1/N) + sum_pi w(pi) * reconstruction edge term
  double log_total = 0.0;       // log sum_pi p(pi)
  double uniform_average = 0.0; // (1/|Pi|) sum_pi log p(pi)
  std::size_t traces = 0;
};

inline ObjectiveForms objective_forms(const Model& model, const MolecularGraph& g, const Tensor& z) {
  const std::vector<EnumeratedTrace> traces = enumerate_traces(g);
  StepScorer scorer(model, z, g.types());
  ObjectiveForms f;
  f.traces = traces.size();
  const double log_focus = std::log(1.0 / g.num_nodes());

  // State visit probabilities collected independently of the per-trace sums.
  std::map<std::tuple<std::vector<Edge>, std::vector<std::uint8_t>, int>, std::pair<double, const Transition*>> states;
  std::vector<double> log_p(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const EnumeratedTrace& et = traces[i];
    double lp = log_focus;
    for (const Transition& t : et.sample.transitions) {
      lp += scorer.log_prob(et.sample, t, t.chosen);
      std::vector<Edge> edges = t.edges;
      std::sort(edges.begin(), edges.end());
      auto& slot = states[std::make_tuple(edges, t.closed, t.focus)];
      slot.first += et.weight;
      slot.second = &t;
    }
    log_p[i] = lp;
    f.trace_average += et.weight * lp;
    f.uniform_average += lp / static_cast<double>(traces.size());
  }
  f.state_form = log_focus;
  for (const auto& [key, entry] : states) {
    const Transition& t = *entry.second;
    double mean = 0.0;
    for (const EdgeChoice& c : t.valid) mean += scorer.log_prob(traces.front().sample, t, c);
    f.state_form += entry.first * mean / static_cast<double>(t.valid.size());
  }
  const double top = *std::max_element(log_p.begin(), log_p.end());
  double acc = 0.0;
  for (double lp : log_p) acc += std::exp(lp - top);
  f.log_total = top + std::log(acc);

  f.implementation = log_focus;
  for (const EnumeratedTrace& et : traces) {
    ad::Tape tape(false);
    std::mt19937_64 rng(0);
    const TraceSample one[] = {et.sample};
    const ReconstructionTerms r =
        reconstruction_loss(tape, model, g, one, tape.constant(z), rng);
    f.implementation += et.weight * r.edge_term;
  }
  return f;
}

}  // namespace cgvae::testing
