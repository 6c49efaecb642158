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
#include <array>
#include <numeric>
#include <random>
#include <vector>

#include "cgvae/atom_types.hpp"
#include "cgvae/graph.hpp"

namespace cgvae::testing {

// C N O F plus O- and N+ for bracket-atom coverage.
inline AtomTypeTable charged_table() {
  return AtomTypeTable::parse(
      "C 4 12.011 0\nN 3 14.007 0\nO 2 15.999 0\nF 1 18.998 0\nO 1 15.999 -1\nN 4 14.007 1\n");
}

inline int pick_type(const AtomTypeTable& table, std::mt19937_64& rng) {
  std::vector<double> w(table.size(), 1.0);
  if (!w.empty()) w[0] = 3.0;
  std::discrete_distribution<int> d(w.begin(), w.end());
  return d(rng);
}

// Random connected graph with valence respected, rings and multiple bonds
// included; hydrogens completed.
inline MolecularGraph random_molecule(const AtomTypeTable& table, std::mt19937_64& rng,
                                      int min_nodes = 1, int max_nodes = 9,
                                      int max_edges = 1 << 20) {
  std::uniform_int_distribution<int> size(min_nodes, max_nodes);
  const int n = size(rng);
  MolecularGraph g;
  std::vector<int> cap;
  g.add_node(pick_type(table, rng));
  cap.push_back(table.valence(g.type(0)));
  for (int i = 1; i < n && g.num_edges() < max_edges; ++i) {
    std::vector<int> open;
    for (int j = 0; j < i; ++j) {
      if (cap[static_cast<std::size_t>(j)] > 0) open.push_back(j);
    }
    if (open.empty()) break;
    int t = pick_type(table, rng);
    g.add_node(t);
    cap.push_back(table.valence(t));
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const int j = open[pick(rng)];
    g.add_edge(j, i, 1);
    --cap[static_cast<std::size_t>(j)];
    --cap[static_cast<std::size_t>(i)];
  }
  std::bernoulli_distribution coin(0.35);
  std::uniform_int_distribution<int> node(0, g.num_nodes() - 1);
  for (int attempt = 0; attempt < 2 * g.num_nodes() && g.num_edges() < max_edges; ++attempt) {
    const int a = node(rng);
    const int b = node(rng);
    if (a == b || g.has_edge(a, b) || cap[static_cast<std::size_t>(a)] < 1 ||
        cap[static_cast<std::size_t>(b)] < 1 || !coin(rng)) {
      continue;
    }
    g.add_edge(a, b, 1);
    --cap[static_cast<std::size_t>(a)];
    --cap[static_cast<std::size_t>(b)];
  }
  // Promote some bonds to double or triple where capacity allows.
  std::vector<Edge> edges = g.edges();
  MolecularGraph out(g.types());
  for (const Edge& e : edges) {
    int order = 1;
    while (order < 3 && cap[static_cast<std::size_t>(e.u)] > 0 &&
           cap[static_cast<std::size_t>(e.v)] > 0 && coin(rng)) {
      ++order;
      --cap[static_cast<std::size_t>(e.u)];
      --cap[static_cast<std::size_t>(e.v)];
    }
    out.add_edge(e.u, e.v, order);
  }
  return complete_hydrogens(out, table);
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Exhaustive isomorphism test (types and bond orders must match).
inline bool brute_force_isomorphic(const MolecularGraph& a, const MolecularGraph& b) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
  std::vector<int> perm(static_cast<std::size_t>(a.num_nodes()));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int v = 0; v < a.num_nodes() && ok; ++v) ok = a.type(v) == b.type(perm[static_cast<std::size_t>(v)]);
    for (const Edge& e : a.edges()) {
      if (!ok) break;
      ok = b.bond_order(perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)]) == e.order;
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Simple cycles by length via vertex subsets: a subset of size k hosts
// (number of Hamiltonian cycles of its induced subgraph) cycles of length k.
inline std::array<long, 4> brute_force_cycles(const MolecularGraph& g) {
  std::array<long, 4> out{};
  const int n = g.num_nodes();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k < 3 || k > 6) continue;
    std::vector<int> nodes;
    for (int v = 0; v < n; ++v) {
      if (mask & (1u << v)) nodes.push_back(v);
    }
    // Fix nodes[0] first; count orderings of the rest, halve for direction.
    std::vector<int> rest(nodes.begin() + 1, nodes.end());
    long hits = 0;
    do {
      bool ok = g.has_edge(nodes[0], rest.front()) && g.has_edge(rest.back(), nodes[0]);
      for (std::size_t i = 0; ok && i + 1 < rest.size(); ++i) ok = g.has_edge(rest[i], rest[i + 1]);
      hits += ok ? 1 : 0;
    } while (std::next_permutation(rest.begin(), rest.end()));
    out[static_cast<std::size_t>(k - 3)] += hits / 2;
  }
  return out;
}

}  // namespace cgvae::testing
