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

#include <doctest.h>

#include <random>

#include "cgvae/atom_types.hpp"
#include "cgvae/canonical.hpp"
#include "cgvae/errors.hpp"
#include "cgvae/graph.hpp"
#include "support.hpp"

using namespace cgvae;
using cgvae::testing::brute_force_cycles;
using cgvae::testing::brute_force_isomorphic;
using cgvae::testing::charged_table;
using cgvae::testing::random_molecule;
using cgvae::testing::random_permutation;

namespace {

const AtomTypeTable& qm9() {
  static const AtomTypeTable t = AtomTypeTable::qm9();
  return t;
}

int C() { return qm9().index_of("C"); }
int N() { return qm9().index_of("N"); }
int O() { return qm9().index_of("O"); }

MolecularGraph ring(int n, int type) {
  MolecularGraph g(std::vector<int>(static_cast<std::size_t>(n), type));
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 1);
  return g;
}

}  // namespace

TEST_CASE("valence lookup from the type table") {
  const AtomTypeTable t = charged_table();
  CHECK(valence_of(t, "O") == 2);
  CHECK(valence_of(t, "O-") == 1);
  CHECK(valence_of(t, "N") == 3);
  CHECK(valence_of(t, "N+") == 4);
  CHECK_THROWS_AS(valence_of(t, "Xe"), DataError);
}

TEST_CASE("type table text round-trips") {
  const AtomTypeTable t = charged_table();
  const AtomTypeTable back = AtomTypeTable::parse(t.to_text());
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back[i].symbol == t[i].symbol);
    CHECK(back[i].valence == t[i].valence);
  }
  CHECK_THROWS_AS(AtomTypeTable::parse("C four 12 0\n"), DataError);
}

TEST_CASE("graph distance") {
  MolecularGraph path(std::vector<int>{C(), C(), C()});
  path.add_edge(0, 1, 1);
  path.add_edge(1, 2, 1);
  CHECK(graph_distance(path, 1, 1) == 0);
  CHECK(graph_distance(path, 0, 2) == 2);
  MolecularGraph two(std::vector<int>{C(), C()});
  CHECK(graph_distance(two, 0, 1) == kDisconnected);
}

TEST_CASE("graph distance is symmetric and obeys the triangle inequality") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const MolecularGraph g = random_molecule(qm9(), rng);
    const int n = g.num_nodes();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int ab = graph_distance(g, a, b);
        CHECK(ab == graph_distance(g, b, a));
        for (int c = 0; c < n; ++c) {
          CHECK(ab <= graph_distance(g, a, c) + graph_distance(g, c, b));
        }
      }
    }
  }
}

TEST_CASE("edge insertion rejects self loops, duplicates and bad orders") {
  MolecularGraph g(std::vector<int>{C(), C()});
  CHECK_THROWS_AS(g.add_edge(0, 0, 1), InvalidGraphError);
  g.add_edge(1, 0, 2);
  CHECK(g.edges().front().u == 0);
  CHECK(g.bond_order(0, 1) == 2);
  CHECK_THROWS_AS(g.add_edge(0, 1, 1), InvalidGraphError);
  CHECK_THROWS_AS(g.add_edge(0, 5, 1), InvalidGraphError);
  MolecularGraph h(std::vector<int>{C(), C()});
  CHECK_THROWS_AS(h.add_edge(0, 1, 4), InvalidGraphError);
}

TEST_CASE("cycle counts on fixtures") {
  const CycleCounts six = count_cycles(ring(6, C()));
  CHECK(six[3] == 0);
  CHECK(six[4] == 0);
  CHECK(six[5] == 0);
  CHECK(six[6] == 1);

  MolecularGraph chain(std::vector<int>(5, C()));
  for (int i = 0; i + 1 < 5; ++i) chain.add_edge(i, i + 1, 1);
  CHECK(count_cycles(chain) == CycleCounts{});

  // two triangles sharing the edge 0-1
  MolecularGraph bowtie(std::vector<int>(4, C()));
  bowtie.add_edge(0, 1, 1);
  bowtie.add_edge(0, 2, 1);
  bowtie.add_edge(1, 2, 1);
  bowtie.add_edge(0, 3, 1);
  bowtie.add_edge(1, 3, 1);
  const CycleCounts b = count_cycles(bowtie);
  CHECK(b[3] == 2);
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK(b[6] == 0);
}

TEST_CASE("cycle counts agree with subset enumeration on random graphs") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(1, 10);
  std::bernoulli_distribution coin(0.35);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = size(rng);
    MolecularGraph g(std::vector<int>(static_cast<std::size_t>(n), C()));
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (coin(rng)) g.add_edge(a, b, 1);
      }
    }
    const CycleCounts fast = count_cycles(g);
    const auto slow = brute_force_cycles(g);
    for (int len = 3; len <= 6; ++len) CHECK(fast[len] == slow[static_cast<std::size_t>(len - 3)]);
  }
}

TEST_CASE("hydrogen completion") {
  MolecularGraph o(std::vector<int>{O()});
  CHECK(complete_hydrogens(o, qm9()).hydrogens(0) == 2);

  MolecularGraph co(std::vector<int>{O(), C()});
  co.add_edge(0, 1, 1);
  CHECK(complete_hydrogens(co, qm9()).hydrogens(0) == 1);

  MolecularGraph c(std::vector<int>{C(), C(), C(), C()});
  c.add_edge(0, 1, 2);
  c.add_edge(0, 2, 1);
  c.add_edge(0, 3, 1);
  CHECK(complete_hydrogens(c, qm9()).hydrogens(0) == 0);

  MolecularGraph bad(std::vector<int>{O(), C(), C()});
  bad.add_edge(0, 1, 2);
  bad.add_edge(0, 2, 2);
  CHECK_THROWS_AS(complete_hydrogens(bad, qm9()), InvalidGraphError);
}

TEST_CASE("validity") {
  CHECK(is_valid(complete_hydrogens(MolecularGraph(std::vector<int>{C()}), qm9()), qm9()));

  MolecularGraph bad(std::vector<int>{O(), C(), C()});
  bad.add_edge(0, 1, 2);
  bad.add_edge(0, 2, 2);
  CHECK_FALSE(is_valid(bad, qm9()));

  MolecularGraph split(std::vector<int>{C(), O()});
  CHECK_FALSE(is_valid(complete_hydrogens(split, qm9()), qm9()));
  CHECK_FALSE(is_valid(MolecularGraph(), qm9()));

  MolecularGraph missing_h(std::vector<int>{C()});
  CHECK_FALSE(is_valid(missing_h, qm9()));
}

TEST_CASE("descriptors") {
  const MolecularGraph methane = complete_hydrogens(MolecularGraph(std::vector<int>{C()}), qm9());
  CHECK(molecular_weight(methane, qm9()) == doctest::Approx(16.043).epsilon(1e-3));
  const MolecularGraph water = complete_hydrogens(MolecularGraph(std::vector<int>{O()}), qm9());
  CHECK(h_donor_count(water, qm9()) == 1);
  CHECK(h_acceptor_count(water, qm9()) == 1);
  const MolecularGraph empty;
  CHECK(molecular_weight(empty, qm9()) == 0.0);
  CHECK(h_donor_count(empty, qm9()) == 0);
}

TEST_CASE("random molecules from the generator are valid") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) CHECK(is_valid(random_molecule(charged_table(), rng), charged_table()));
}

TEST_CASE("canonical key is permutation invariant over 1000 pairs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const MolecularGraph g = random_molecule(qm9(), rng, 1, 12);
    const MolecularGraph p = g.permuted(random_permutation(g.num_nodes(), rng));
    CHECK(canonical_key(g) == canonical_key(p));
  }
}

TEST_CASE("canonical key separates non-isomorphic fixtures") {
  CHECK(canonical_key(MolecularGraph(std::vector<int>{C()})) !=
        canonical_key(MolecularGraph(std::vector<int>{O()})));
  MolecularGraph ethanol(std::vector<int>{C(), C(), O()});
  ethanol.add_edge(0, 1, 1);
  ethanol.add_edge(1, 2, 1);
  MolecularGraph ether(std::vector<int>{C(), O(), C()});
  ether.add_edge(0, 1, 1);
  ether.add_edge(1, 2, 1);
  CHECK_FALSE(brute_force_isomorphic(ethanol, ether));
  CHECK(canonical_key(ethanol) != canonical_key(ether));
}

TEST_CASE("canonical key equality matches brute-force isomorphism") {
  std::mt19937_64 rng(1234);
  // Small graphs over few types collide often enough to exercise both answers.
  int same = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const MolecularGraph a = random_molecule(qm9(), rng, 1, 6);
    const MolecularGraph b = random_molecule(qm9(), rng, a.num_nodes(), a.num_nodes());
    const bool iso = brute_force_isomorphic(a, b);
    same += iso ? 1 : 0;
    CHECK(iso == (canonical_key(a) == canonical_key(b)));
  }
  CHECK(same > 0);
}

TEST_CASE("canonical key handles highly symmetric graphs") {
  // Regular graphs where colour refinement alone cannot split any cell.
  MolecularGraph two_triangles(std::vector<int>(6, C()));
  for (int base : {0, 3}) {
    for (int i = 0; i < 3; ++i) two_triangles.add_edge(base + i, base + (i + 1) % 3, 1);
  }
  const MolecularGraph hexagon = ring(6, C());
  CHECK(canonical_key(two_triangles) != canonical_key(hexagon));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    CHECK(canonical_key(hexagon.permuted(random_permutation(6, rng))) == canonical_key(hexagon));
    CHECK(canonical_key(two_triangles.permuted(random_permutation(6, rng))) ==
          canonical_key(two_triangles));
  }
}

TEST_CASE("canonical order relabels isomorphic graphs identically") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const MolecularGraph g = random_molecule(qm9(), rng, 1, 9);
    const MolecularGraph p = g.permuted(random_permutation(g.num_nodes(), rng));
    const MolecularGraph cg = g.permuted(canonical_form(g).order);
    const MolecularGraph cp = p.permuted(canonical_form(p).order);
    CHECK(cg.types() == cp.types());
    for (const Edge& e : cg.edges()) CHECK(cp.bond_order(e.u, e.v) == e.order);
  }
}

TEST_CASE("JSONL records round-trip") {
  std::mt19937_64 rng(6);
  const AtomTypeTable t = charged_table();
  for (int i = 0; i < 100; ++i) {
    MolecularGraph g = random_molecule(t, rng);
    g.props()["score"] = 0.25 * i;
    const MolecularGraph back = graph_from_json(graph_to_json(g, t), t);
    CHECK(back == g);
    CHECK(back.props().at("score") == 0.25 * i);
  }
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"nodes":["Xe"],"edges":[]})"), t),
                  DataError);
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(R"({"nodes":["C"],"edges":[[0,0,1]]})"), t),
                  DataError);
}
