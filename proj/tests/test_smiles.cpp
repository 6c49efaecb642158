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

#include <fstream>
#include <random>
#include <string>

#include "cgvae/canonical.hpp"
#include "cgvae/errors.hpp"
#include "cgvae/smiles.hpp"
#include "support.hpp"

using namespace cgvae;
using cgvae::testing::brute_force_isomorphic;
using cgvae::testing::charged_table;
using cgvae::testing::random_molecule;
using cgvae::testing::random_permutation;

namespace {

const AtomTypeTable& table() {
  static const AtomTypeTable t = charged_table();
  return t;
}

}  // namespace

TEST_CASE("parse simple strings") {
  const MolecularGraph c = parse_smiles("C", table());
  CHECK(c.num_nodes() == 1);
  CHECK(c.num_edges() == 0);
  CHECK(c.hydrogens(0) == 4);

  const MolecularGraph co = parse_smiles("C=O", table());
  REQUIRE(co.num_edges() == 1);
  CHECK(co.edges()[0].order == 2);

  const MolecularGraph tri = parse_smiles("C1CC1", table());
  CHECK(tri.num_nodes() == 3);
  CHECK(tri.num_edges() == 3);
  for (const Edge& e : tri.edges()) CHECK(e.order == 1);
}

TEST_CASE("branches, ring bonds with orders and two-digit rings") {
  const MolecularGraph g = parse_smiles("CC(=O)N", table());
  CHECK(g.num_nodes() == 4);
  CHECK(g.bond_order(1, 2) == 2);
  CHECK(g.bond_order(1, 3) == 1);

  const MolecularGraph r = parse_smiles("C=1CC1", table());
  CHECK(r.bond_order(0, 2) == 2);

  const MolecularGraph big = parse_smiles("C%12CC%12", table());
  CHECK(big.num_edges() == 3);
}

TEST_CASE("bracket atoms") {
  const MolecularGraph o = parse_smiles("[O-]", table());
  CHECK(table()[static_cast<std::size_t>(o.type(0))].symbol == "O-");
  CHECK(o.hydrogens(0) == 1);
  CHECK(parse_smiles("[OH-]", table()).hydrogens(0) == 1);
  CHECK(parse_smiles("C[N+](C)(C)C", table()).num_nodes() == 5);
  CHECK_THROWS_AS(parse_smiles("[OH2-]", table()), SmilesError);
}

TEST_CASE("parse errors carry byte offsets") {
  auto offset_of = [](const std::string& s) -> long {
    try {
      parse_smiles(s, table());
    } catch (const SmilesError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("CC(") >= 0);
  CHECK(offset_of("C1CC") >= 0);
  CHECK(offset_of("c1ccccc1") == 0);
  CHECK(offset_of("CXC") == 1);
  CHECK(offset_of("C)") == 1);
  CHECK(offset_of("C.C") == 1);
  CHECK(offset_of("") == 0);
  CHECK_THROWS_AS(parse_smiles("O=O=O", table()), DataError);
  CHECK_THROWS_AS(parse_smiles("FC(F)(F)(F)F", table()), DataError);
}

TEST_CASE("writer fixtures") {
  CHECK(write_smiles(parse_smiles("C1CC1", table()), table()) == "C1CC1");
  CHECK(write_smiles(parse_smiles("[O-]", table()), table()) == "[O-]");
  MolecularGraph invalid(std::vector<int>{table().index_of("C"), table().index_of("C")});
  CHECK_THROWS_AS(write_smiles(invalid, table()), InvalidGraphError);
}

TEST_CASE("writer output is independent of node order") {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 300; ++i) {
    const MolecularGraph g = random_molecule(table(), rng);
    const MolecularGraph p = g.permuted(random_permutation(g.num_nodes(), rng));
    CHECK(write_smiles(g, table()) == write_smiles(p, table()));
  }
}

TEST_CASE("round-trip is isomorphic over random graphs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const MolecularGraph g = random_molecule(table(), rng, 1, 8);
    const std::string s = write_smiles(g, table());
    const MolecularGraph back = parse_smiles(s, table());
    CHECK_MESSAGE(canonical_key(back) == canonical_key(g), s);
    if (g.num_nodes() <= 6) CHECK(brute_force_isomorphic(back, g));
  }
}

TEST_CASE("bundled dataset parses and round-trips") {
  const AtomTypeTable qm9 = AtomTypeTable::qm9();
  std::ifstream in(std::string(CGVAE_DATA_DIR_DEFAULT) + "/toy_200.smi");
  REQUIRE(in.good());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const MolecularGraph g = parse_smiles(line, qm9);
    CHECK(is_valid(g, qm9));
    CHECK(canonical_key(parse_smiles(write_smiles(g, qm9), qm9)) == canonical_key(g));
    ++count;
  }
  CHECK(count == 200);
}

TEST_CASE("mutated strings parse cleanly or fail cleanly") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "CNOF()=#123%[]+-H.c ";
  std::uniform_int_distribution<std::size_t> pick_char(0, alphabet.size() - 1);
  for (int i = 0; i < 3000; ++i) {
    std::string s = write_smiles(random_molecule(table(), rng), table());
    std::uniform_int_distribution<int> edits(1, 3);
    for (int e = edits(rng); e > 0; --e) {
      std::uniform_int_distribution<std::size_t> at(0, s.size());
      const std::size_t pos = at(rng);
      switch (rng() % 3) {
        case 0: s.insert(pos, 1, alphabet[pick_char(rng)]); break;
        case 1: if (pos < s.size()) s.erase(pos, 1); break;
        default: if (pos < s.size()) s[pos] = alphabet[pick_char(rng)]; break;
      }
    }
    try {
      const MolecularGraph g = parse_smiles(s, table());
      CHECK_MESSAGE(is_valid(g, table()), s);
    } catch (const DataError&) {
      // clean rejection
    }
  }
}
