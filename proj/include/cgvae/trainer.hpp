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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgvae/graph.hpp"
#include "cgvae/model.hpp"
#include "cgvae/optim.hpp"
#include "cgvae/propopt.hpp"

namespace cgvae {

struct TrainConfig {
  ModelConfig model;
  double lambda_latent = 0.3;
  double lambda_property = 10.0;
  std::string property;  // empty: no property head training
  double lr = 1e-3;
  int batch = 32;
  int epochs = 20;
  int traces = 1;
  bool kl_warmup = true;
  double warmup_fraction = 0.1;
  double clip_norm = 0.0;  // 0: no clipping
  std::uint64_t seed = 1;
  int threads = 1;

  // Recognised keys: d S hidden lambda1 lambda2 property lr batch epochs
  // traces kl_warmup warmup_fraction clip_norm seed threads master_node
  // ablation (none|A|B|C, comma separated) ablation_a ablation_b ablation_c.
  void set(const std::string& key, const std::string& value);
  // key = value lines, '#' comments.
  void apply_text(const std::string& text);

  [[nodiscard]] std::map<std::string, std::string> entries() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  void validate() const;
};

// Empirical distribution of heavy-atom counts, used to pick N at sampling.
struct NodeCountHistogram {
  std::vector<long> counts;  // counts[n] = molecules with n nodes

  static NodeCountHistogram fit(const std::vector<MolecularGraph>& graphs);
  [[nodiscard]] int sample(std::mt19937_64& rng) const;
  [[nodiscard]] nlohmann::json to_json() const;
  static NodeCountHistogram from_json(const nlohmann::json& j);
};

struct TrainState {
  int epoch = 0;       // completed epochs
  std::int64_t step = 0;
  AdamState adam;
};

struct EpochLog {
  int epoch = 0;
  double recon = 0.0;
  double latent = 0.0;
  double property = 0.0;
  double total = 0.0;
  double dropped_constants = 0.0;
  double seconds = 0.0;
};

// Trained model plus everything needed to sample or resume.
struct Checkpoint {
  TrainConfig config;
  Model model;
  NodeCountHistogram node_counts;
  std::optional<PropertyScale> property_scale;
  TrainState state;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

class Trainer {
 public:
  // Initialises a fresh model from the config and dataset.
  Trainer(const AtomTypeTable& types, const std::vector<MolecularGraph>& data, TrainConfig config);
  // Continues from a saved checkpoint; data must be the same training set.
  Trainer(Checkpoint checkpoint, const std::vector<MolecularGraph>& data);

  EpochLog run_epoch();
  // Runs until config().epochs epochs are complete.
  std::vector<EpochLog> run(const std::function<void(const EpochLog&)>& on_epoch = {});

  [[nodiscard]] const Checkpoint& checkpoint() const { return ckpt_; }
  [[nodiscard]] const Model& model() const { return ckpt_.model; }
  [[nodiscard]] const TrainConfig& config() const { return ckpt_.config; }

 private:
  void prepare();

  Checkpoint ckpt_;
  const std::vector<MolecularGraph>& data_;
  std::vector<double> targets_;
};

std::string epoch_csv_header();
std::string epoch_csv_row(const EpochLog& log);

// Draws `count` molecules from the prior, N from the histogram. Output does
// not depend on `threads`.
std::vector<MolecularGraph> sample_molecules(const Model& model, const NodeCountHistogram& counts,
                                             int count, std::uint64_t seed,
                                             const GenerateOptions& options = {}, int threads = 1);

}  // namespace cgvae
