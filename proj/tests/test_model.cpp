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

#include <cmath>
#include <random>

#include "cgvae/encoder.hpp"
#include "cgvae/errors.hpp"
#include "cgvae/grad_check.hpp"
#include "cgvae/model.hpp"
#include "cgvae/rng.hpp"
#include "support.hpp"

using namespace cgvae;
using cgvae::testing::random_molecule;
using cgvae::testing::random_permutation;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.latent_dim = 6;
  c.hidden_width = 12;
  c.propagation_steps = 3;
  return c;
}

Posterior make_posterior(ad::Tape& tape, const Tensor& mu, const Tensor& log_sigma) {
  return Posterior{tape.constant(mu), tape.constant(log_sigma)};
}

}  // namespace

TEST_CASE("model config JSON round-trips") {
  ModelConfig c = small_config();
  c.use_distance = false;
  c.independent_edges = true;
  const ModelConfig back = ModelConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(ModelConfig::from_json(nlohmann::json::object()), DataError);
}

TEST_CASE("parameter initialisation is seeded") {
  const Model a(AtomTypeTable::qm9(), small_config(), 5);
  const Model b(AtomTypeTable::qm9(), small_config(), 5);
  const Model c(AtomTypeTable::qm9(), small_config(), 6);
  const ParamId w = a.params().id("decoder/w_target");
  CHECK(a.params().value(w).cwiseEqual(b.params().value(w)).all());
  CHECK_FALSE(a.params().value(w).cwiseEqual(c.params().value(w)).all());
}

TEST_CASE("single-node encoding depends only on the type") {
  const Model m(AtomTypeTable::qm9(), small_config(), 1);
  ad::Tape tape(false);
  const Posterior p = encode(tape, m, MolecularGraph(std::vector<int>{2}));
  CHECK(p.num_nodes() == 1);
  CHECK(p.mu.cols() == 6);
  ad::Tape again(false);
  const Posterior q = encode(again, m, MolecularGraph(std::vector<int>{2}));
  CHECK(p.mu.value().cwiseEqual(q.mu.value()).all());
  ad::Tape other(false);
  const Posterior r = encode(other, m, MolecularGraph(std::vector<int>{0}));
  CHECK_FALSE(p.mu.value().cwiseEqual(r.mu.value()).all());
  for (const NodePosterior& np : posterior_values(p)) CHECK((np.sigma.array() > 0).all());
}

TEST_CASE("encoding rejects empty graphs and unknown types") {
  const Model m(AtomTypeTable::qm9(), small_config(), 1);
  ad::Tape tape(false);
  CHECK_THROWS_AS(encode(tape, m, MolecularGraph()), InvalidGraphError);
  CHECK_THROWS_AS(encode(tape, m, MolecularGraph(std::vector<int>{9})), InvalidGraphError);
}

TEST_CASE("encoder is permutation equivariant") {
  const Model m(AtomTypeTable::qm9(), small_config(), 2);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const MolecularGraph g = random_molecule(m.types(), rng);
    const std::vector<int> perm = random_permutation(g.num_nodes(), rng);
    ad::Tape t1(false);
    ad::Tape t2(false);
    const Tensor a = encode(t1, m, g).mu.value();
    const Tensor b = encode(t2, m, g.permuted(perm)).mu.value();
    for (int i = 0; i < g.num_nodes(); ++i) {
      CHECK((b.row(i) - a.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("encoding is bit-identical across runs") {
  const Model m(AtomTypeTable::qm9(), small_config(), 2);
  std::mt19937_64 rng(4);
  const MolecularGraph g = random_molecule(m.types(), rng, 5, 9);
  ad::Tape t1(false);
  ad::Tape t2(false);
  const Posterior a = encode(t1, m, g);
  const Posterior b = encode(t2, m, g);
  CHECK(a.mu.value().cwiseEqual(b.mu.value()).all());
  CHECK(a.log_sigma.value().cwiseEqual(b.log_sigma.value()).all());
}

TEST_CASE("KL identities") {
  ad::Tape tape;
  CHECK(kl_loss(tape, make_posterior(tape, Tensor::Zero(3, 4), Tensor::Zero(3, 4))).scalar() == 0.0);
  CHECK(kl_loss(tape, make_posterior(tape, Tensor::Ones(1, 1), Tensor::Zero(1, 1))).scalar() ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kl_divergence(Tensor::Ones(1, 1), Tensor::Ones(1, 1)) == doctest::Approx(0.5));
}

TEST_CASE("KL is non-negative and zero only at the prior") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    Tensor mu(2, 3);
    Tensor ls(2, 3);
    for (Eigen::Index k = 0; k < 6; ++k) {
      mu.data()[k] = u(rng);
      ls.data()[k] = u(rng);
    }
    ad::Tape tape;
    CHECK(kl_loss(tape, make_posterior(tape, mu, ls)).scalar() > 0.0);
  }
}

TEST_CASE("KL matches a Monte-Carlo estimate within 1%") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor mu(2, 3);
  Tensor ls(2, 3);
  for (Eigen::Index k = 0; k < 6; ++k) {
    mu.data()[k] = u(rng);
    ls.data()[k] = 0.5 * u(rng);
  }
  ad::Tape tape;
  const double exact = kl_loss(tape, make_posterior(tape, mu, ls)).scalar();
  const Tensor sigma = ls.array().exp().matrix();
  std::normal_distribution<double> n01(0.0, 1.0);
  const int draws = 1000000;
  double total = 0.0;
  for (int s = 0; s < draws; ++s) {
    double log_ratio = 0.0;
    for (Eigen::Index k = 0; k < 6; ++k) {
      const double e = n01(rng);
      const double z = mu.data()[k] + sigma.data()[k] * e;
      // log q(z) - log p(z), constants cancel
      log_ratio += -0.5 * e * e - std::log(sigma.data()[k]) + 0.5 * z * z;
    }
    total += log_ratio;
  }
  const double estimate = total / draws;
  CHECK(std::abs(estimate - exact) / exact < 0.01);
}

TEST_CASE("sampled latents follow the posterior") {
  Tensor mu(1, 4);
  mu << 0.3, -1.2, 2.0, 0.0;
  Tensor ls(1, 4);
  ls << 0.0, -0.5, 0.2, -1.0;
  std::mt19937_64 rng(12);
  const int draws = 10000;
  Tensor sum = Tensor::Zero(1, 4);
  for (int s = 0; s < draws; ++s) {
    ad::Tape tape(false);
    sum += sample_latents(tape, make_posterior(tape, mu, ls), rng).value();
  }
  const Tensor mean = sum / draws;
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(mean(0, k) - mu(0, k)) < 3.0 * std::exp(ls(0, k)) / std::sqrt(draws));
  }
}

TEST_CASE("tiny sigma makes sampling return the mean") {
  Tensor mu = Tensor::Constant(2, 3, 0.7);
  Tensor ls = Tensor::Constant(2, 3, std::log(ad::kLogFloor));
  std::mt19937_64 rng(1);
  ad::Tape tape(false);
  const Tensor z = sample_latents(tape, make_posterior(tape, mu, ls), rng).value();
  CHECK((z - mu).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("same seed gives identical draws") {
  auto a = derive_rng(3, {purpose(RngPurpose::kLatent)});
  auto b = derive_rng(3, {purpose(RngPurpose::kLatent)});
  ad::Tape t1(false);
  ad::Tape t2(false);
  const Tensor mu = Tensor::Zero(3, 2);
  const Tensor ls = Tensor::Zero(3, 2);
  CHECK(sample_latents(t1, make_posterior(t1, mu, ls), a)
            .value()
            .cwiseEqual(sample_latents(t2, make_posterior(t2, mu, ls), b).value())
            .all());
}

TEST_CASE("encoder, sampling and KL gradients match finite differences") {
  Model m(AtomTypeTable::qm9(), small_config(), 9);
  std::mt19937_64 rng(10);
  const MolecularGraph g = random_molecule(m.types(), rng, 4, 4);
  LossFn fn = [&](ad::Tape& tape, const ParameterSet&) {
    std::mt19937_64 eps(42);
    const Posterior p = encode(tape, m, g);
    ad::Var z = sample_latents(tape, p, eps);
    return ad::add(kl_loss(tape, p), ad::sum(ad::square(z)));
  };
  GradCheckOptions opts;
  opts.max_entries_per_param = 12;
  const GradCheckReport r = grad_check(fn, m.params(), opts);
  CHECK_MESSAGE(r.passed, r.worst);
}

TEST_CASE("message graph layout") {
  MolecularGraph g(std::vector<int>{0, 0, 2});
  g.add_edge(0, 1, 2);
  g.add_edge(1, 2, 1);
  const MessageGraph mg = message_graph(g, true);
  REQUIRE(mg.adjacency.size() == 5);
  CHECK(mg.total() == 4);
  CHECK(mg.adjacency[1](0, 1) == 1.0);
  CHECK(mg.adjacency[1](1, 0) == 1.0);
  CHECK(mg.adjacency[0](2, 1) == 1.0);
  CHECK(mg.adjacency[0](0, 1) == 0.0);
  CHECK(mg.adjacency[3](3, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(mg.adjacency[4](0, 3) == 1.0);
  CHECK(mg.adjacency[4].row(3).sum() == 0.0);
}
