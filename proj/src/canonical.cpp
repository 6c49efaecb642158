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

#include "cgvae/canonical.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <tuple>

namespace cgvae {

namespace {

using Colors = std::vector<int>;

int num_colors(const Colors& c) { return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1; }

// Replaces colours by the rank of (colour, sorted neighbour signature) until
// the partition stops splitting. Ranks are computed from sorted signatures,
// so the result is invariant under relabelling.
Colors refine(const MolecularGraph& g, Colors colors) {
  const int n = g.num_nodes();
  int classes = num_colors(colors);
  while (true) {
    std::vector<std::pair<std::vector<int>, int>> sigs(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      std::vector<int> s;
      s.reserve(2 * static_cast<std::size_t>(g.degree(v)) + 1);
      std::vector<std::pair<int, int>> nb;
      for (const Neighbor& x : g.neighbors(v)) nb.emplace_back(colors[static_cast<std::size_t>(x.node)], x.order);
      std::sort(nb.begin(), nb.end());
      s.push_back(colors[static_cast<std::size_t>(v)]);
      for (const auto& [c, o] : nb) {
        s.push_back(c);
        s.push_back(o);
      }
      sigs[static_cast<std::size_t>(v)] = {std::move(s), v};
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return sigs[static_cast<std::size_t>(a)].first < sigs[static_cast<std::size_t>(b)].first;
    });
    Colors next(static_cast<std::size_t>(n));
    int rank = -1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i == 0 || sigs[static_cast<std::size_t>(idx[i])].first != sigs[static_cast<std::size_t>(idx[i - 1])].first) ++rank;
      next[static_cast<std::size_t>(idx[i])] = rank;
    }
    const int next_classes = rank + 1;
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

std::vector<int> certificate(const MolecularGraph& g, const Colors& discrete, std::vector<int>& order) {
  const int n = g.num_nodes();
  order.assign(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) order[static_cast<std::size_t>(discrete[static_cast<std::size_t>(v)])] = v;
  std::vector<int> cert;
  cert.reserve(static_cast<std::size_t>(n + 3 * g.num_edges() + 2));
  cert.push_back(n);
  for (int i = 0; i < n; ++i) cert.push_back(g.type(order[static_cast<std::size_t>(i)]));
  std::vector<std::tuple<int, int, int>> edges;
  for (const Edge& e : g.edges()) {
    int a = discrete[static_cast<std::size_t>(e.u)];
    int b = discrete[static_cast<std::size_t>(e.v)];
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b, e.order);
  }
  std::sort(edges.begin(), edges.end());
  cert.push_back(static_cast<int>(edges.size()));
  for (const auto& [a, b, o] : edges) {
    cert.push_back(a);
    cert.push_back(b);
    cert.push_back(o);
  }
  return cert;
}

struct Search {
  const MolecularGraph& g;
  std::optional<std::vector<int>> best;
  std::vector<int> best_order;

  void run(const Colors& colors) {
    const int n = g.num_nodes();
    if (num_colors(colors) == n) {
      std::vector<int> order;
      std::vector<int> cert = certificate(g, colors, order);
      if (!best || cert < *best) {
        best = std::move(cert);
        best_order = std::move(order);
      }
      return;
    }
    // first non-singleton cell by colour
    std::vector<int> size(static_cast<std::size_t>(num_colors(colors)), 0);
    for (int c : colors) ++size[static_cast<std::size_t>(c)];
    int target = 0;
    while (size[static_cast<std::size_t>(target)] < 2) ++target;
    for (int v = 0; v < n; ++v) {
      if (colors[static_cast<std::size_t>(v)] != target) continue;
      Colors split = colors;
      for (int w = 0; w < n; ++w) {
        int& c = split[static_cast<std::size_t>(w)];
        if (c > target || (c == target && w != v)) ++c;
      }
      run(refine(g, std::move(split)));
    }
  }
};

std::string encode(const std::vector<int>& cert) {
  std::string key;
  key.reserve(cert.size() * 2);
  for (int x : cert) {
    // values are small non-negative ints; 16-bit big-endian keeps ordering
    key.push_back(static_cast<char>((x >> 8) & 0xff));
    key.push_back(static_cast<char>(x & 0xff));
  }
  return key;
}

}  // namespace

CanonicalForm canonical_form(const MolecularGraph& g) {
  CanonicalForm out;
  if (g.empty()) {
    out.key = encode({0, 0});
    return out;
  }
  // initial colours: ranked atom types
  std::vector<int> types = g.types();
  std::vector<int> distinct = types;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Colors colors(types.size());
  for (std::size_t v = 0; v < types.size(); ++v) {
    colors[v] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), types[v]) - distinct.begin());
  }
  Search search{g, std::nullopt, {}};
  search.run(refine(g, std::move(colors)));
  out.key = encode(*search.best);
  out.order = std::move(search.best_order);
  return out;
}

}  // namespace cgvae
