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

#include "cgvae/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>

#include "cgvae/errors.hpp"

namespace cgvae {

using nlohmann::json;

// ---- MolecularGraph -----------------------------------------------------------

MolecularGraph::MolecularGraph(std::vector<int> types)
    : types_(std::move(types)), hydrogens_(types_.size(), 0), adjacency_(types_.size()) {}

int MolecularGraph::add_node(int type) {
  types_.push_back(type);
  hydrogens_.push_back(0);
  adjacency_.emplace_back();
  return num_nodes() - 1;
}

void MolecularGraph::add_edge(int u, int v, int order) {
  if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes()) {
    throw InvalidGraphError("edge endpoint out of range");
  }
  if (u == v) throw InvalidGraphError("self loop on node " + std::to_string(u));
  if (order < 1 || order > 3) throw InvalidGraphError("bond order must be 1, 2 or 3");
  if (has_edge(u, v)) {
    throw InvalidGraphError("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  }
  if (u > v) std::swap(u, v);
  edges_.push_back({u, v, order});
  adjacency_[static_cast<std::size_t>(u)].push_back({v, order});
  adjacency_[static_cast<std::size_t>(v)].push_back({u, order});
}

int MolecularGraph::bond_order(int u, int v) const {
  for (const Neighbor& n : neighbors(u)) {
    if (n.node == v) return n.order;
  }
  return 0;
}

int MolecularGraph::used_valence(int v) const {
  int total = 0;
  for (const Neighbor& n : neighbors(v)) total += n.order;
  return total;
}

MolecularGraph MolecularGraph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != num_nodes()) throw UsageError("permutation size mismatch");
  std::vector<int> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inverse[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  MolecularGraph out;
  for (int p : perm) {
    const int id = out.add_node(type(p));
    out.set_hydrogens(id, hydrogens(p));
  }
  for (const Edge& e : edges_) {
    out.add_edge(inverse[static_cast<std::size_t>(e.u)], inverse[static_cast<std::size_t>(e.v)], e.order);
  }
  out.props_ = props_;
  return out;
}

MolecularGraph MolecularGraph::induced(const std::vector<int>& keep) const {
  std::vector<int> where(types_.size(), -1);
  MolecularGraph out;
  for (int k : keep) {
    where[static_cast<std::size_t>(k)] = out.add_node(type(k));
    out.set_hydrogens(where[static_cast<std::size_t>(k)], hydrogens(k));
  }
  for (const Edge& e : edges_) {
    const int a = where[static_cast<std::size_t>(e.u)];
    const int b = where[static_cast<std::size_t>(e.v)];
    if (a >= 0 && b >= 0) out.add_edge(a, b, e.order);
  }
  out.props_ = props_;
  return out;
}

bool operator==(const MolecularGraph& a, const MolecularGraph& b) {
  if (a.types_ != b.types_ || a.hydrogens_ != b.hydrogens_) return false;
  auto ea = a.edges_;
  auto eb = b.edges_;
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

// ---- BondLedger -------------------------------------------------------------------

BondLedger::BondLedger(const MolecularGraph& g, const AtomTypeTable& table)
    : used(static_cast<std::size_t>(g.num_nodes())),
      capacity(static_cast<std::size_t>(g.num_nodes())),
      closed(static_cast<std::size_t>(g.num_nodes()), 0) {
  for (int v = 0; v < g.num_nodes(); ++v) {
    used[static_cast<std::size_t>(v)] = g.used_valence(v);
    capacity[static_cast<std::size_t>(v)] = table.valence(g.type(v));
  }
}

void BondLedger::add_bond(int u, int v, int order) {
  used[static_cast<std::size_t>(u)] += order;
  used[static_cast<std::size_t>(v)] += order;
}

// ---- traversal ------------------------------------------------------------------------

std::vector<int> distances_from(const MolecularGraph& g, int src) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_nodes()), kDisconnected);
  std::queue<int> q;
  dist[static_cast<std::size_t>(src)] = 0;
  q.push(src);
  while (!q.empty()) {
    const int x = q.front();
    q.pop();
    for (const Neighbor& n : g.neighbors(x)) {
      if (dist[static_cast<std::size_t>(n.node)] == kDisconnected) {
        dist[static_cast<std::size_t>(n.node)] = dist[static_cast<std::size_t>(x)] + 1;
        q.push(n.node);
      }
    }
  }
  return dist;
}

int graph_distance(const MolecularGraph& g, int u, int v) {
  return distances_from(g, u)[static_cast<std::size_t>(v)];
}

std::vector<int> component_of(const MolecularGraph& g, int src) {
  const std::vector<int> dist = distances_from(g, src);
  std::vector<int> out;
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (dist[static_cast<std::size_t>(v)] != kDisconnected) out.push_back(v);
  }
  return out;
}

int count_components(const MolecularGraph& g) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.num_nodes()), 0);
  int components = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (seen[static_cast<std::size_t>(v)]) continue;
    ++components;
    for (int w : component_of(g, v)) seen[static_cast<std::size_t>(w)] = 1;
  }
  return components;
}

namespace {

void extend_cycles(const MolecularGraph& g, int start, int at, int length,
                   std::vector<std::uint8_t>& on_path, CycleCounts& out) {
  for (const Neighbor& n : g.neighbors(at)) {
    if (n.node == start && length >= 3) {
      out[length] += 1;
    } else if (n.node > start && !on_path[static_cast<std::size_t>(n.node)] && length < 6) {
      on_path[static_cast<std::size_t>(n.node)] = 1;
      extend_cycles(g, start, n.node, length + 1, on_path, out);
      on_path[static_cast<std::size_t>(n.node)] = 0;
    }
  }
}

}  // namespace

CycleCounts count_cycles(const MolecularGraph& g) {
  CycleCounts out;
  std::vector<std::uint8_t> on_path(static_cast<std::size_t>(g.num_nodes()), 0);
  for (int s = 0; s < g.num_nodes(); ++s) {
    on_path[static_cast<std::size_t>(s)] = 1;
    extend_cycles(g, s, s, 1, on_path, out);
    on_path[static_cast<std::size_t>(s)] = 0;
  }
  // every cycle is walked once per direction from its smallest vertex
  for (auto& c : out.counts) c /= 2;
  return out;
}

// ---- chemistry ------------------------------------------------------------------------

MolecularGraph complete_hydrogens(const MolecularGraph& g, const AtomTypeTable& table) {
  MolecularGraph out = g;
  for (int v = 0; v < g.num_nodes(); ++v) {
    const int free = table.valence(g.type(v)) - g.used_valence(v);
    if (free < 0) {
      throw InvalidGraphError("node " + std::to_string(v) + " (" + table[g.type(v)].symbol +
                              ") exceeds its valence");
    }
    out.set_hydrogens(v, free);
  }
  return out;
}

bool is_valid(const MolecularGraph& g, const AtomTypeTable& table) {
  if (g.empty()) return false;
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (g.type(v) < 0 || g.type(v) >= table.size()) return false;
    if (g.used_valence(v) + g.hydrogens(v) != table.valence(g.type(v))) return false;
    if (g.hydrogens(v) < 0) return false;
  }
  for (const Edge& e : g.edges()) {
    if (e.u == e.v || e.order < 1 || e.order > 3) return false;
  }
  std::vector<Edge> sorted = g.edges();
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].u == sorted[i - 1].u && sorted[i].v == sorted[i - 1].v) return false;
  }
  return count_components(g) == 1;
}

namespace {

constexpr double kHydrogenMass = 1.008;

bool is_n_or_o(const AtomType& t) { return t.element == "N" || t.element == "O"; }

}  // namespace

double molecular_weight(const MolecularGraph& g, const AtomTypeTable& table) {
  double w = 0.0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    w += table[g.type(v)].mass + kHydrogenMass * g.hydrogens(v);
  }
  return w;
}

int h_donor_count(const MolecularGraph& g, const AtomTypeTable& table) {
  int n = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (is_n_or_o(table[g.type(v)]) && g.hydrogens(v) > 0) ++n;
  }
  return n;
}

int h_acceptor_count(const MolecularGraph& g, const AtomTypeTable& table) {
  int n = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (is_n_or_o(table[g.type(v)])) ++n;
  }
  return n;
}

// ---- JSONL -----------------------------------------------------------------------------

json graph_to_json(const MolecularGraph& g, const AtomTypeTable& table) {
  json j;
  j["nodes"] = json::array();
  for (int t : g.types()) j["nodes"].push_back(table[t].symbol);
  j["edges"] = json::array();
  for (const Edge& e : g.edges()) j["edges"].push_back({e.u, e.v, e.order});
  j["props"] = json::object();
  for (const auto& [k, v] : g.props()) j["props"][k] = v;
  return j;
}

MolecularGraph graph_from_json(const json& j, const AtomTypeTable& table) {
  try {
    MolecularGraph g;
    for (const auto& sym : j.at("nodes")) g.add_node(table.index_of(sym.get<std::string>()));
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw DataError("edge must be [u, v, order]");
      g.add_edge(e[0].get<int>(), e[1].get<int>(), e[2].get<int>());
    }
    if (j.contains("props")) {
      for (const auto& [k, v] : j.at("props").items()) {
        if (v.is_number()) g.props()[k] = v.get<double>();
      }
    }
    for (int v = 0; v < g.num_nodes(); ++v) {
      g.set_hydrogens(v, std::max(0, table.valence(g.type(v)) - g.used_valence(v)));
    }
    return g;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed graph record: ") + e.what());
  }
}

std::vector<MolecularGraph> read_jsonl(const std::string& path, const AtomTypeTable& table) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<MolecularGraph> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      out.push_back(graph_from_json(json::parse(line), table));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::string& path, const std::vector<MolecularGraph>& graphs,
                 const AtomTypeTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& g : graphs) out << graph_to_json(g, table).dump() << '\n';
}

}  // namespace cgvae
