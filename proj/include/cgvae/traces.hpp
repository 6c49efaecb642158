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

#include "cgvae/graph.hpp"
#include "cgvae/masking.hpp"

namespace cgvae {

// One teacher-forced step: the state (partial edges, closed nodes, focus),
// every correct next expansion in that state, and the one actually taken.
struct Transition {
  std::vector<Edge> edges;
  std::vector<std::uint8_t> closed;
  int focus = 0;
  std::vector<EdgeChoice> valid;
  EdgeChoice chosen;
};

struct TraceSample {
  int source_id = 0;
  std::vector<int> permutation;  // identity: decoder node v is graph node v
  int num_nodes = 0;
  std::vector<int> types;
  int start = 0;
  std::vector<Transition> transitions;
};

// Correct expansions from `focus`: target edges not yet in `partial`, or
// stop when none remain.
std::vector<EdgeChoice> valid_expansions(const MolecularGraph& target, const MolecularGraph& partial,
                                         int focus);

// Random breadth-first traces of `g`, one per call to the generator.
std::vector<TraceSample> extract_traces(const MolecularGraph& g, int k, std::mt19937_64& rng,
                                        int source_id = 0);

// Rebuilds the graph by replaying every chosen edge.
MolecularGraph replay(const TraceSample& trace);

// Partial graph of a transition (typed nodes plus the listed edges).
MolecularGraph transition_graph(const TraceSample& trace, const Transition& t);

// log of N times the product of |valid| along the trace: the inverse of the
// probability that the random traversal produced this trace.
double log_inverse_process_probability(const TraceSample& trace);

}  // namespace cgvae
