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

#include <algorithm>
#include <random>
#include <sstream>

#include "cgvae/errors.hpp"
#include "cgvae/metrics.hpp"
#include "cgvae/smiles.hpp"
#include "support.hpp"

using namespace cgvae;

namespace {

std::vector<MolecularGraph> parse_all(const std::vector<std::string>& smiles) {
  std::vector<MolecularGraph> out;
  for (const std::string& s : smiles) out.push_back(parse_smiles(s, AtomTypeTable::qm9()));
  return out;
}

SampleStats one_metric(double mean) {
  SampleStats s;
  s.n_samples = 1;
  s.metrics.push_back({"ring_6", mean, 0.0});
  return s;
}

}  // namespace

TEST_CASE("validity percentage") {
  const AtomTypeTable& t = AtomTypeTable::qm9();
  auto set = parse_all({"C", "CC", "CCO", "C1CC1", "C=O", "C#N", "OCC=C", "FC(F)F", "N"});
  MolecularGraph bad(std::vector<int>{0, 3, 3, 3, 3, 3});
  for (int i = 1; i < 6; ++i) bad.add_edge(0, i, 1);
  CHECK(pct_valid(set, t) == 100.0);
  set.push_back(bad);
  CHECK(pct_valid(set, t) == doctest::Approx(90.0));
  CHECK_THROWS_AS(pct_valid({}, t), UsageError);
}

TEST_CASE("novelty percentage") {
  const auto train = parse_all({"CCO", "C1CC1", "CC=O", "N#CC"});
  const auto keys = canonical_keys(train);
  CHECK(pct_novel(parse_all({"OCC", "C1CC1"}), keys) == 0.0);
  CHECK(pct_novel(parse_all({"CCC", "C1CCC1", "O=CO"}), keys) == 100.0);
  CHECK(pct_novel(parse_all({"OCC", "CCN", "CC#N", "C1CCO1"}), keys) == 50.0);
}

TEST_CASE("uniqueness percentage") {
  CHECK(pct_unique(parse_all({"C", "CC", "CCC", "CCCC"})) == 100.0);
  CHECK(pct_unique(parse_all(std::vector<std::string>(10, "CCO"))) == doctest::Approx(10.0));
  CHECK(pct_unique(parse_all({"CCO", "OCC", "CC", "C1CC1"})) == 75.0);
}

TEST_CASE("uniqueness agrees with brute-force isomorphism") {
  const AtomTypeTable& t = AtomTypeTable::qm9();
  std::mt19937_64 rng(21);
  for (int round = 0; round < 20; ++round) {
    std::vector<MolecularGraph> set;
    for (int i = 0; i < 25; ++i) {
      MolecularGraph g = testing::random_molecule(t, rng, 1, 5);
      if (i > 0 && i % 3 == 0) {
        const MolecularGraph& prev = set[static_cast<std::size_t>(i - 1)];
        g = prev.permuted(testing::random_permutation(prev.num_nodes(), rng));
      }
      set.push_back(g);
    }
    std::vector<MolecularGraph> classes;
    for (const MolecularGraph& g : set) {
      const bool seen = std::any_of(classes.begin(), classes.end(),
                                    [&](const MolecularGraph& c) { return testing::brute_force_isomorphic(c, g); });
      if (!seen) classes.push_back(g);
    }
    CHECK(pct_unique(set) == doctest::Approx(100.0 * classes.size() / set.size()));
    const auto keys = canonical_keys(classes);
    CHECK(keys.size() == classes.size());
    CHECK(pct_novel(set, keys) == 0.0);
  }
}

TEST_CASE("distribution statistics fixtures") {
  const AtomTypeTable& t = AtomTypeTable::qm9();
  const SampleStats rings = distribution_stats(parse_all({"C1CCCCC1", "C1=CCCCC1", "C1CCOCC1"}), t);
  CHECK(rings.at("ring_6").mean == 1.0);
  CHECK(rings.at("ring_6").std == 0.0);
  CHECK(rings.n_samples == 3);

  const SampleStats ethanol = distribution_stats(parse_all({"CCO"}), t);
  CHECK(ethanol.at("atom_C").mean == 2.0);
  CHECK(ethanol.at("atom_O").mean == 1.0);
  CHECK(ethanol.at("atom_N").mean == 0.0);
  CHECK(ethanol.at("bond_single").mean == 2.0);
  CHECK(ethanol.at("bond_double").mean == 0.0);
  CHECK(ethanol.at("bond_triple").mean == 0.0);
  CHECK(ethanol.at("h_donors").mean == 1.0);
  CHECK(ethanol.at("h_acceptors").mean == 1.0);

  const SampleStats mixed = distribution_stats(parse_all({"C1CC1", "CCC"}), t);
  CHECK(mixed.at("ring_3").mean == 0.5);
  CHECK(mixed.at("ring_3").std == 0.5);
  CHECK_THROWS_AS(mixed.at("ring_7"), UsageError);
}

TEST_CASE("distribution statistics ignore sample order") {
  const AtomTypeTable& t = AtomTypeTable::qm9();
  std::mt19937_64 rng(2);
  std::vector<MolecularGraph> set;
  for (int i = 0; i < 60; ++i) set.push_back(testing::random_molecule(t, rng));
  const SampleStats a = distribution_stats(set, t);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(set.begin(), set.end(), rng);
    const SampleStats b = distribution_stats(set, t);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
      CHECK(a.metrics[i].mean == doctest::Approx(b.metrics[i].mean).epsilon(1e-12));
      CHECK(a.metrics[i].std == doctest::Approx(b.metrics[i].std).epsilon(1e-12));
    }
  }
}

TEST_CASE("comparison report") {
  const auto rows = compare(one_metric(0.8), one_metric(1.0));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].delta == doctest::Approx(0.2));
  CHECK(rows[0].relative_delta == doctest::Approx(0.2));

  const AtomTypeTable& t = AtomTypeTable::qm9();
  const SampleStats s = distribution_stats(parse_all({"CCO", "C1CC1"}), t);
  const auto same = compare(s, s);
  CHECK(same.size() == s.metrics.size());
  for (const MetricComparison& r : same) CHECK(r.delta == 0.0);

  const std::string csv = metrics_csv(same);
  CHECK(csv.rfind("name,samples_mean,samples_std,dataset_mean,dataset_std,delta,relative_delta\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == s.metrics.size() + 1);

  SampleStats renamed = one_metric(1.0);
  renamed.metrics[0].name = "ring_5";
  CHECK_THROWS_AS(compare(one_metric(1.0), renamed), UsageError);
  SampleStats longer = one_metric(1.0);
  longer.metrics.push_back({"ring_5", 0.0, 0.0});
  CHECK_THROWS_AS(compare(one_metric(1.0), longer), UsageError);
}
