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

#include "cgvae/encoder.hpp"

#include <cmath>

#include "cgvae/errors.hpp"
#include "cgvae/rng.hpp"

namespace cgvae {

Posterior encode(ad::Tape& tape, const Model& model, const MolecularGraph& graph) {
  if (graph.num_nodes() == 0) throw InvalidGraphError("encode: empty graph");
  const ParameterSet& ps = model.params();
  const EncoderIds& ids = model.encoder();
  std::vector<int> types(graph.types().begin(), graph.types().end());
  for (int t : types) {
    if (t < 0 || t >= model.num_types()) throw InvalidGraphError("encode: unknown atom type");
  }
  ad::Var initial = ad::gather_rows(tape.param(ps, ids.embed), types);
  ad::Var states = propagate(tape, ps, ids.ggnn, initial,
                             message_graph(graph, model.config().master_node),
                             model.config().propagation_steps);
  Posterior p;
  p.mu = ad::add_rowvec(ad::matmul(states, tape.param(ps, ids.mu_w)), tape.param(ps, ids.mu_b));
  p.log_sigma = ad::add_rowvec(ad::matmul(states, tape.param(ps, ids.log_sigma_w)),
                               tape.param(ps, ids.log_sigma_b));
  return p;
}

std::vector<NodePosterior> posterior_values(const Posterior& posterior) {
  const Tensor& mu = posterior.mu.value();
  const Tensor& ls = posterior.log_sigma.value();
  std::vector<NodePosterior> out(mu.rows());
  for (Eigen::Index v = 0; v < mu.rows(); ++v) {
    out[v].mu = mu.row(v);
    out[v].sigma = ls.row(v).array().exp().matrix();
  }
  return out;
}

ad::Var sample_latents(ad::Tape& tape, const Posterior& posterior, std::mt19937_64& rng) {
  ad::Var eps = tape.constant(standard_normal(posterior.mu.rows(), posterior.mu.cols(), rng));
  return ad::add(posterior.mu, ad::hadamard(ad::exp(posterior.log_sigma), eps));
}

ad::Var kl_loss(ad::Tape& tape, const Posterior& posterior) {
  (void)tape;
  // 0.5 * (mu^2 + sigma^2 - 1 - 2 log sigma)
  ad::Var var = ad::exp(ad::affine(posterior.log_sigma, 2.0));
  ad::Var inner = ad::add(ad::square(posterior.mu), ad::sub(var, ad::affine(posterior.log_sigma, 2.0, 1.0)));
  return ad::affine(ad::sum(inner), 0.5);
}

double kl_divergence(const Tensor& mu, const Tensor& sigma) {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols()) {
    throw DimensionError("kl_divergence: shape mismatch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double s = std::max(sigma.data()[i], ad::kLogFloor);
    total += 0.5 * (mu.data()[i] * mu.data()[i] + s * s - 1.0 - 2.0 * std::log(s));
  }
  return total;
}

}  // namespace cgvae
