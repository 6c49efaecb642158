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

#include "cgvae/propopt.hpp"

#include <algorithm>
#include <cmath>

#include "cgvae/errors.hpp"

namespace cgvae {

ad::Var predict(ad::Tape& tape, const Model& model, ad::Var z) {
  if (z.cols() != model.latent_dim()) throw DimensionError("predict: latent width mismatch");
  const ParameterSet& ps = model.params();
  const PropertyIds& ids = model.property();
  ad::Var gate = ad::sigmoid(
      ad::add_rowvec(ad::matmul(z, tape.param(ps, ids.gate_w)), tape.param(ps, ids.gate_b)));
  ad::Var value =
      ad::add_rowvec(ad::matmul(z, tape.param(ps, ids.value_w)), tape.param(ps, ids.value_b));
  return ad::sum(ad::hadamard(gate, value));
}

double predict_value(const Model& model, const Tensor& z) {
  ad::Tape tape(false);
  return predict(tape, model, tape.constant(z)).scalar();
}

ad::Var regression_loss(ad::Tape& tape, const Model& model, ad::Var z, double target) {
  return ad::square(ad::affine(predict(tape, model, z), 1.0, -target));
}

bool is_known_property(const std::string& name) {
  return name == "molecular_weight" || name == "ring56";
}

PropertyFn property_function(const std::string& name) {
  if (name == "molecular_weight") {
    return [](const MolecularGraph& g, const AtomTypeTable& t) { return molecular_weight(g, t); };
  }
  if (name == "ring56") {
    return [](const MolecularGraph& g, const AtomTypeTable&) {
      const CycleCounts c = count_cycles(g);
      return static_cast<double>(c[5] + c[6]);
    };
  }
  throw UsageError("unknown property '" + name + "' (expected molecular_weight or ring56)");
}

double PropertyScale::normalize(double raw) const {
  return hi > lo ? (raw - lo) / (hi - lo) : 0.0;
}

double PropertyScale::denormalize(double unit) const { return lo + unit * (hi - lo); }

nlohmann::json PropertyScale::to_json() const { return {{"name", name}, {"min", lo}, {"max", hi}}; }

PropertyScale PropertyScale::from_json(const nlohmann::json& j) {
  PropertyScale s;
  try {
    s.name = j.at("name").get<std::string>();
    s.lo = j.at("min").get<double>();
    s.hi = j.at("max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("property scale: ") + e.what());
  }
  return s;
}

PropertyScale PropertyScale::fit(const std::string& name, const std::vector<double>& raw) {
  if (raw.empty()) throw DataError("property scale: no values");
  PropertyScale s;
  s.name = name;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  s.lo = *lo;
  s.hi = *hi;
  return s;
}

namespace {

struct Evaluation {
  double predicted;
  double objective;
  Tensor gradient;
};

Evaluation evaluate(const LatentObjective& head, const Tensor& z, double rho, bool with_grad) {
  ad::Tape tape(with_grad);
  ad::Var zv = with_grad ? tape.variable(z) : tape.constant(z);
  ad::Var r = head(tape, zv);
  ad::Var obj = ad::sub(r, ad::affine(ad::sum(ad::square(zv)), rho));
  Evaluation e{r.scalar(), obj.scalar(), {}};
  if (with_grad) {
    tape.backward(obj);
    e.gradient = tape.grad(zv.id());
    if (e.gradient.size() == 0) e.gradient = Tensor::Zero(z.rows(), z.cols());
  }
  return e;
}

}  // namespace

std::vector<AscentPoint> optimize_latent(const LatentObjective& head, const Tensor& z0,
                                         const AscentConfig& config) {
  if (!(config.step > 0.0) || config.prior_weight < 0.0) {
    throw UsageError("optimize_latent: need step > 0 and prior weight >= 0");
  }
  std::vector<AscentPoint> path;
  Tensor z = z0;
  Evaluation cur = evaluate(head, z, config.prior_weight, true);
  path.push_back({z, cur.predicted, cur.objective});
  double eta = config.step;
  for (int it = 0; it < config.max_iters; ++it) {
    bool accepted = false;
    for (int halving = 0; halving <= config.max_halvings; ++halving) {
      const Tensor candidate = z + eta * cur.gradient;
      const Evaluation next = evaluate(head, candidate, config.prior_weight, false);
      if (std::isfinite(next.objective) && next.objective > cur.objective &&
          next.predicted >= cur.predicted) {
        const double gain = next.objective - cur.objective;
        z = candidate;
        cur = evaluate(head, z, config.prior_weight, true);
        path.push_back({z, cur.predicted, cur.objective});
        accepted = gain >= config.tolerance;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }
  return path;
}

std::vector<AscentPoint> optimize_latent(const Model& model, const Tensor& z0,
                                         const AscentConfig& config) {
  return optimize_latent([&model](ad::Tape& t, ad::Var z) { return predict(t, model, z); }, z0,
                         config);
}

std::vector<OptimizedMolecule> optimize_molecule(const Model& model, const Tensor& z0,
                                                 const AscentConfig& config,
                                                 const PropertyScale& scale, int points,
                                                 std::mt19937_64& rng) {
  if (points < 1) throw UsageError("optimize_molecule: need at least one decode point");
  const std::vector<AscentPoint> path = optimize_latent(model, z0, config);
  const PropertyFn truth = property_function(scale.name);
  const GenerateOptions argmax{ChoiceMode::kArgmax, ChoiceMode::kArgmax};
  std::vector<OptimizedMolecule> out;
  const int last = static_cast<int>(path.size()) - 1;
  for (int i = 0; i < points; ++i) {
    const int idx = points == 1 ? last
                                : static_cast<int>(std::lround(static_cast<double>(i) * last /
                                                               (points - 1)));
    OptimizedMolecule m;
    m.iteration = idx;
    m.molecule = generate(model, path[static_cast<std::size_t>(idx)].z, rng, argmax).molecule;
    m.predicted = scale.denormalize(path[static_cast<std::size_t>(idx)].predicted);
    m.true_value = truth(m.molecule, model.types());
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace cgvae
