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

#include "cgvae/traces.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "cgvae/errors.hpp"

namespace cgvae {

std::vector<EdgeChoice> valid_expansions(const MolecularGraph& target, const MolecularGraph& partial,
                                         int focus) {
  std::vector<EdgeChoice> out;
  for (const Neighbor& n : target.neighbors(focus)) {
    if (!partial.has_edge(focus, n.node)) out.push_back({n.node, n.order});
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) out.push_back(EdgeChoice::stop());
  return out;
}

std::vector<TraceSample> extract_traces(const MolecularGraph& g, int k, std::mt19937_64& rng,
                                        int source_id) {
  if (g.num_nodes() == 0) throw InvalidGraphError("extract_traces: empty graph");
  if (count_components(g) != 1) throw InvalidGraphError("extract_traces: graph is disconnected");
  if (k < 1) throw UsageError("extract_traces: trace count must be positive");
  const int n = g.num_nodes();
  std::vector<TraceSample> traces;
  traces.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<int> pick_start(0, n - 1);
  for (int i = 0; i < k; ++i) {
    TraceSample tr;
    tr.source_id = source_id;
    tr.permutation.resize(static_cast<std::size_t>(n));
    std::iota(tr.permutation.begin(), tr.permutation.end(), 0);
    tr.num_nodes = n;
    tr.types = g.types();
    tr.start = pick_start(rng);

    MolecularGraph partial(g.types());
    std::vector<std::uint8_t> closed(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> queued(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{tr.start};
    queued[static_cast<std::size_t>(tr.start)] = 1;
    while (!queue.empty()) {
      const int focus = queue.front();
      Transition t;
      t.edges = partial.edges();
      t.closed = closed;
      t.focus = focus;
      t.valid = valid_expansions(g, partial, focus);
      std::uniform_int_distribution<std::size_t> pick(0, t.valid.size() - 1);
      t.chosen = t.valid[pick(rng)];
      if (t.chosen.is_stop()) {
        closed[static_cast<std::size_t>(focus)] = 1;
        queue.pop_front();
      } else {
        partial.add_edge(focus, t.chosen.target, t.chosen.order);
        if (!queued[static_cast<std::size_t>(t.chosen.target)]) {
          queued[static_cast<std::size_t>(t.chosen.target)] = 1;
          queue.push_back(t.chosen.target);
        }
      }
      tr.transitions.push_back(std::move(t));
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

MolecularGraph replay(const TraceSample& trace) {
  MolecularGraph g(trace.types);
  for (const Transition& t : trace.transitions) {
    if (!t.chosen.is_stop()) g.add_edge(t.focus, t.chosen.target, t.chosen.order);
  }
  return g;
}

MolecularGraph transition_graph(const TraceSample& trace, const Transition& t) {
  MolecularGraph g(trace.types);
  for (const Edge& e : t.edges) g.add_edge(e.u, e.v, e.order);
  return g;
}

double log_inverse_process_probability(const TraceSample& trace) {
  double total = std::log(static_cast<double>(trace.num_nodes));
  for (const Transition& t : trace.transitions) total += std::log(static_cast<double>(t.valid.size()));
  return total;
}

}  // namespace cgvae
