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

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cgvae/atom_types.hpp"

namespace cgvae {

struct Edge {
  int u = 0;  // u < v
  int v = 0;
  int order = 1;  // 1 single, 2 double, 3 triple

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int node;
  int order;
};

// Heavy-atom graph with typed nodes and bond-order-labelled undirected edges.
// Implicit hydrogens are stored per node and only meaningful after
// complete_hydrogens().
class MolecularGraph {
 public:
  MolecularGraph() = default;
  explicit MolecularGraph(std::vector<int> types);

  int add_node(int type);
  // Throws InvalidGraphError on self loops, duplicates, bad ids or orders.
  void add_edge(int u, int v, int order);

  [[nodiscard]] int num_nodes() const { return static_cast<int>(types_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] bool empty() const { return types_.empty(); }

  [[nodiscard]] int type(int v) const { return types_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] const std::vector<int>& types() const { return types_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<Neighbor>& neighbors(int v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }
  [[nodiscard]] int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  // 0 when no edge exists.
  [[nodiscard]] int bond_order(int u, int v) const;
  [[nodiscard]] bool has_edge(int u, int v) const { return bond_order(u, v) != 0; }
  // b_v: sum of incident bond orders.
  [[nodiscard]] int used_valence(int v) const;

  [[nodiscard]] int hydrogens(int v) const { return hydrogens_[static_cast<std::size_t>(v)]; }
  void set_hydrogens(int v, int count) { hydrogens_[static_cast<std::size_t>(v)] = count; }

  std::map<std::string, double>& props() { return props_; }
  [[nodiscard]] const std::map<std::string, double>& props() const { return props_; }

  // Node i of the result is node perm[i] of this graph.
  [[nodiscard]] MolecularGraph permuted(const std::vector<int>& perm) const;
  // Induced subgraph on `keep` (in that order), edges and hydrogens carried.
  [[nodiscard]] MolecularGraph induced(const std::vector<int>& keep) const;

  // Labelled equality (same ids), not isomorphism.
  friend bool operator==(const MolecularGraph& a, const MolecularGraph& b);

 private:
  std::vector<int> types_;
  std::vector<int> hydrogens_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::map<std::string, double> props_;
};

// Per-node bond usage b_v, capacity b*_v and closed flags.
struct BondLedger {
  std::vector<int> used;
  std::vector<int> capacity;
  std::vector<std::uint8_t> closed;

  BondLedger() = default;
  BondLedger(const MolecularGraph& g, const AtomTypeTable& table);

  [[nodiscard]] int remaining(int v) const {
    return capacity[static_cast<std::size_t>(v)] - used[static_cast<std::size_t>(v)];
  }
  void add_bond(int u, int v, int order);
};

inline constexpr int kDisconnected = -1;

// Shortest-path edge count, or kDisconnected.
int graph_distance(const MolecularGraph& g, int u, int v);
// BFS distances from src to every node (kDisconnected where unreachable).
std::vector<int> distances_from(const MolecularGraph& g, int src);

// Nodes reachable from src, ascending.
std::vector<int> component_of(const MolecularGraph& g, int src);
int count_components(const MolecularGraph& g);

// Number of simple cycles of each length 3..6.
struct CycleCounts {
  std::array<long, 4> counts{};  // index 0 -> length 3

  [[nodiscard]] long operator[](int length) const { return counts.at(static_cast<std::size_t>(length - 3)); }
  long& operator[](int length) { return counts.at(static_cast<std::size_t>(length - 3)); }
  friend bool operator==(const CycleCounts&, const CycleCounts&) = default;
};

CycleCounts count_cycles(const MolecularGraph& g);

// Sets hydrogens to b*_v - b_v. Throws InvalidGraphError if any b_v > b*_v.
MolecularGraph complete_hydrogens(const MolecularGraph& g, const AtomTypeTable& table);

// Single connected component, no self loops or duplicates, and every node
// has sum of bond orders + hydrogens == b*.
bool is_valid(const MolecularGraph& g, const AtomTypeTable& table);

// Expect completed hydrogens.
double molecular_weight(const MolecularGraph& g, const AtomTypeTable& table);
int h_donor_count(const MolecularGraph& g, const AtomTypeTable& table);
int h_acceptor_count(const MolecularGraph& g, const AtomTypeTable& table);

// ---- JSONL interchange -----------------------------------------------------
// {"nodes": ["C","O"], "edges": [[0,1,1]], "props": {"name": value}}

nlohmann::json graph_to_json(const MolecularGraph& g, const AtomTypeTable& table);
// Hydrogens are recomputed; throws DataError on malformed records.
MolecularGraph graph_from_json(const nlohmann::json& j, const AtomTypeTable& table);

std::vector<MolecularGraph> read_jsonl(const std::string& path, const AtomTypeTable& table);
void write_jsonl(const std::string& path, const std::vector<MolecularGraph>& graphs,
                 const AtomTypeTable& table);

}  // namespace cgvae
