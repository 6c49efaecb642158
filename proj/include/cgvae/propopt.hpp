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

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgvae/autodiff.hpp"
#include "cgvae/decoder.hpp"
#include "cgvae/graph.hpp"
#include "cgvae/model.hpp"

namespace cgvae {

// R(z) = sum_v sigmoid(g1(z_v)) * g2(z_v)
ad::Var predict(ad::Tape& tape, const Model& model, ad::Var z);
double predict_value(const Model& model, const Tensor& z);

// (R(z) - target)^2
ad::Var regression_loss(ad::Tape& tape, const Model& model, ad::Var z, double target);

// ---- surrogate properties ---------------------------------------------------

using PropertyFn = std::function<double(const MolecularGraph&, const AtomTypeTable&)>;

// "molecular_weight" or "ring56" (number of 5- and 6-membered cycles).
PropertyFn property_function(const std::string& name);
bool is_known_property(const std::string& name);

// Affine map of raw property values onto [0, 1] over the training set.
struct PropertyScale {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double normalize(double raw) const;
  [[nodiscard]] double denormalize(double unit) const;
  [[nodiscard]] nlohmann::json to_json() const;
  static PropertyScale from_json(const nlohmann::json& j);
  static PropertyScale fit(const std::string& name, const std::vector<double>& raw);
};

// ---- latent gradient ascent -------------------------------------------------

struct AscentConfig {
  double step = 0.5;
  int max_iters = 100;
  double prior_weight = 0.01;  // rho
  double tolerance = 1e-7;
  int max_halvings = 10;
};

struct AscentPoint {
  Tensor z;
  double predicted = 0.0;  // R(z)
  double objective = 0.0;  // R(z) - rho * ||z||^2
};

// Trajectory starting at z0. A step is kept only if it raises the penalised
// objective without lowering R; otherwise the step size is halved.
std::vector<AscentPoint> optimize_latent(const Model& model, const Tensor& z0,
                                         const AscentConfig& config);

// Same ascent with an arbitrary differentiable objective head; used for
// closed-form checks.
using LatentObjective = std::function<ad::Var(ad::Tape&, ad::Var)>;
std::vector<AscentPoint> optimize_latent(const LatentObjective& head, const Tensor& z0,
                                         const AscentConfig& config);

struct OptimizedMolecule {
  int iteration = 0;
  MolecularGraph molecule;
  double predicted = 0.0;   // in raw property units
  double true_value = 0.0;  // raw
};

// Runs the ascent from z0 and decodes `points` evenly spaced trajectory
// entries (first and last included) with argmax decoding.
std::vector<OptimizedMolecule> optimize_molecule(const Model& model, const Tensor& z0,
                                                 const AscentConfig& config,
                                                 const PropertyScale& scale, int points,
                                                 std::mt19937_64& rng);

}  // namespace cgvae
