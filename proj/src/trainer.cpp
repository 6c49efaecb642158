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

#include "cgvae/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "cgvae/checkpoint.hpp"
#include "cgvae/errors.hpp"
#include "cgvae/objective.hpp"
#include "cgvae/parallel.hpp"
#include "cgvae/rng.hpp"
#include "cgvae/traces.hpp"

namespace cgvae {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("config '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("config '" + key + "': expected a number, got '" + v + "'");
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("config '" + key + "': expected an integer, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---- config -------------------------------------------------------------------

void TrainConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "d") {
    model.latent_dim = static_cast<int>(parse_long(key, v));
  } else if (key == "S") {
    model.propagation_steps = static_cast<int>(parse_long(key, v));
  } else if (key == "hidden") {
    model.hidden_width = static_cast<int>(parse_long(key, v));
  } else if (key == "lambda1") {
    lambda_latent = parse_double(key, v);
  } else if (key == "lambda2") {
    lambda_property = parse_double(key, v);
  } else if (key == "property") {
    property = v == "none" ? "" : v;
  } else if (key == "lr") {
    lr = parse_double(key, v);
  } else if (key == "batch") {
    batch = static_cast<int>(parse_long(key, v));
  } else if (key == "epochs") {
    epochs = static_cast<int>(parse_long(key, v));
  } else if (key == "traces") {
    traces = static_cast<int>(parse_long(key, v));
  } else if (key == "kl_warmup") {
    kl_warmup = parse_bool(key, v);
  } else if (key == "warmup_fraction") {
    warmup_fraction = parse_double(key, v);
  } else if (key == "clip_norm") {
    clip_norm = parse_double(key, v);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_long(key, v));
  } else if (key == "threads") {
    threads = static_cast<int>(parse_long(key, v));
  } else if (key == "master_node") {
    model.master_node = parse_bool(key, v);
  } else if (key == "ablation_a") {
    model.use_distance = !parse_bool(key, v);
  } else if (key == "ablation_b") {
    model.independent_edges = parse_bool(key, v);
  } else if (key == "ablation_c") {
    model.decoder_ggnn = !parse_bool(key, v);
  } else if (key == "ablation") {
    model.use_distance = true;
    model.independent_edges = false;
    model.decoder_ggnn = true;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = trim(part);
      if (part == "A" || part == "a") {
        model.use_distance = false;
      } else if (part == "B" || part == "b") {
        model.independent_edges = true;
      } else if (part == "C" || part == "c") {
        model.decoder_ggnn = false;
      } else if (part != "none" && !part.empty()) {
        throw UsageError("config 'ablation': unknown flag '" + part + "'");
      }
    }
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void TrainConfig::apply_text(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

std::map<std::string, std::string> TrainConfig::entries() const {
  std::string ablation;
  if (!model.use_distance) ablation += "A,";
  if (model.independent_edges) ablation += "B,";
  if (!model.decoder_ggnn) ablation += "C,";
  ablation = ablation.empty() ? "none" : ablation.substr(0, ablation.size() - 1);
  return {{"d", std::to_string(model.latent_dim)},
          {"S", std::to_string(model.propagation_steps)},
          {"hidden", std::to_string(model.hidden_width)},
          {"lambda1", fmt(lambda_latent)},
          {"lambda2", fmt(lambda_property)},
          {"property", property.empty() ? "none" : property},
          {"lr", fmt(lr)},
          {"batch", std::to_string(batch)},
          {"epochs", std::to_string(epochs)},
          {"traces", std::to_string(traces)},
          {"kl_warmup", kl_warmup ? "true" : "false"},
          {"warmup_fraction", fmt(warmup_fraction)},
          {"clip_norm", fmt(clip_norm)},
          {"seed", std::to_string(seed)},
          {"threads", std::to_string(threads)},
          {"master_node", model.master_node ? "true" : "false"},
          {"ablation", ablation}};
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j;
  for (const auto& [k, v] : entries()) j[k] = v;
  j["max_distance"] = model.max_distance;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (!j.is_object()) throw DataError("train config: expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "max_distance") {
      c.model.max_distance = v.get<int>();
      continue;
    }
    if (!v.is_string()) throw DataError("train config: '" + k + "' is not a string");
    try {
      c.set(k, v.get<std::string>());
    } catch (const UsageError& e) {
      throw DataError(e.what());
    }
  }
  return c;
}

void TrainConfig::validate() const {
  if (model.latent_dim < 1 || model.hidden_width < 1 || model.propagation_steps < 0) {
    throw UsageError("config: d and hidden must be positive and S non-negative");
  }
  if (lambda_latent < 0 || lambda_property < 0) throw UsageError("config: lambdas must be >= 0");
  if (!(lr > 0)) throw UsageError("config: lr must be positive");
  if (batch < 1 || epochs < 0 || traces < 1 || threads < 1) {
    throw UsageError("config: batch, traces and threads must be positive");
  }
  if (warmup_fraction < 0 || warmup_fraction > 1) throw UsageError("config: warmup_fraction in [0,1]");
  if (!property.empty() && !is_known_property(property)) {
    throw UsageError("config: unknown property '" + property + "'");
  }
}

// ---- node counts --------------------------------------------------------------

NodeCountHistogram NodeCountHistogram::fit(const std::vector<MolecularGraph>& graphs) {
  NodeCountHistogram h;
  for (const MolecularGraph& g : graphs) {
    const auto n = static_cast<std::size_t>(g.num_nodes());
    if (h.counts.size() <= n) h.counts.resize(n + 1, 0);
    ++h.counts[n];
  }
  return h;
}

int NodeCountHistogram::sample(std::mt19937_64& rng) const {
  std::vector<double> w(counts.begin(), counts.end());
  if (!w.empty()) w[0] = 0.0;
  return sample_index(w.data(), static_cast<int>(w.size()), rng);
}

nlohmann::json NodeCountHistogram::to_json() const { return counts; }

NodeCountHistogram NodeCountHistogram::from_json(const nlohmann::json& j) {
  NodeCountHistogram h;
  try {
    h.counts = j.get<std::vector<long>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("node counts: ") + e.what());
  }
  return h;
}

// ---- checkpoint ---------------------------------------------------------------

void Checkpoint::save(const std::string& path) const {
  nlohmann::json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["config"] = config.to_json();
  j["model"] = model.config().to_json();
  j["atom_types"] = model.types().to_text();
  j["node_counts"] = node_counts.to_json();
  j["property_scale"] = property_scale ? property_scale->to_json() : nlohmann::json(nullptr);
  j["params"] = tensors_to_json(model.params());
  j["adam"] = adam_to_json(state.adam);
  j["epoch"] = state.epoch;
  j["step"] = state.step;
  write_json_file(path, j);
}

Checkpoint Checkpoint::load(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw DataError("checkpoint " + path + ": unsupported format_version");
    }
    TrainConfig config = TrainConfig::from_json(j.at("config"));
    config.model = ModelConfig::from_json(j.at("model"));
    Checkpoint c{config,
                 Model(AtomTypeTable::parse(j.at("atom_types").get<std::string>()), config.model, 0),
                 NodeCountHistogram::from_json(j.at("node_counts")),
                 std::nullopt,
                 {}};
    tensors_from_json(j.at("params"), c.model.params());
    if (!j.at("property_scale").is_null()) {
      c.property_scale = PropertyScale::from_json(j.at("property_scale"));
    }
    c.state.adam = adam_from_json(j.at("adam"), c.model.params());
    c.state.epoch = j.at("epoch").get<int>();
    c.state.step = j.at("step").get<std::int64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path + ": " + e.what());
  }
}

// ---- trainer ------------------------------------------------------------------

Trainer::Trainer(const AtomTypeTable& types, const std::vector<MolecularGraph>& data,
                 TrainConfig config)
    : ckpt_{config, Model(types, config.model, config.seed), NodeCountHistogram::fit(data),
            std::nullopt, {}},
      data_(data) {
  config.validate();
  ckpt_.state.adam = AdamState(ckpt_.model.params(), AdamConfig{config.lr});
  if (!config.property.empty() && !data.empty()) {
    const PropertyFn fn = property_function(config.property);
    std::vector<double> raw;
    raw.reserve(data.size());
    for (const MolecularGraph& g : data) raw.push_back(fn(g, types));
    ckpt_.property_scale = PropertyScale::fit(config.property, raw);
  }
  prepare();
}

Trainer::Trainer(Checkpoint checkpoint, const std::vector<MolecularGraph>& data)
    : ckpt_(std::move(checkpoint)), data_(data) {
  ckpt_.config.validate();
  prepare();
}

void Trainer::prepare() {
  if (data_.empty()) throw DataError("training set is empty");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!is_valid(data_[i], ckpt_.model.types())) {
      throw DataError("training molecule " + std::to_string(i) + " is not a valid molecule");
    }
  }
  targets_.clear();
  if (ckpt_.property_scale) {
    const PropertyFn fn = property_function(ckpt_.property_scale->name);
    for (const MolecularGraph& g : data_) {
      targets_.push_back(ckpt_.property_scale->normalize(fn(g, ckpt_.model.types())));
    }
  }
}

EpochLog Trainer::run_epoch() {
  const auto t0 = std::chrono::steady_clock::now();
  TrainConfig& cfg = ckpt_.config;
  Model& model = ckpt_.model;
  TrainState& st = ckpt_.state;
  const int epoch = st.epoch;
  const std::size_t n = data_.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch);
  const std::int64_t steps_per_epoch = static_cast<std::int64_t>((n + batch - 1) / batch);
  const double warmup_steps =
      cfg.kl_warmup ? cfg.warmup_fraction * static_cast<double>(steps_per_epoch * cfg.epochs) : 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng =
      derive_rng(cfg.seed, {purpose(RngPurpose::kShuffle), static_cast<std::uint64_t>(epoch)});
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  std::vector<GradientBuffer> grads(batch, GradientBuffer(model.params()));
  std::vector<LossTerms> terms(batch);
  std::vector<double> values(batch);
  std::vector<std::string> failures(batch);
  GradientBuffer total(model.params());
  EpochLog log;
  log.epoch = epoch + 1;

  for (std::size_t begin = 0; begin < n; begin += batch) {
    const std::size_t count = std::min(batch, n - begin);
    LossOptions opts;
    opts.lambda_property = cfg.property.empty() ? 0.0 : cfg.lambda_property;
    opts.lambda_latent = cfg.lambda_latent;
    if (warmup_steps > 0.0) {
      opts.lambda_latent *= std::min(1.0, static_cast<double>(st.step) / warmup_steps);
    }
    auto work = [&](std::size_t slot) {
      const std::size_t idx = order[begin + slot];
      try {
        std::mt19937_64 rng = derive_rng(
            cfg.seed, {purpose(RngPurpose::kTraces), static_cast<std::uint64_t>(epoch), idx});
        const std::vector<TraceSample> traces =
            model.config().independent_edges
                ? std::vector<TraceSample>{}
                : extract_traces(data_[idx], cfg.traces, rng, static_cast<int>(idx));
        std::optional<double> target;
        if (!targets_.empty()) target = targets_[idx];
        ad::Tape tape;
        LossTerms lt = total_loss(tape, model, data_[idx], traces, opts, target, rng);
        grads[slot].zero();
        tape.backward(lt.total, grads[slot]);
        values[slot] = lt.total.scalar();
        lt.total = {};
        terms[slot] = lt;
        failures[slot].clear();
      } catch (const std::exception& e) {
        failures[slot] = "molecule " + std::to_string(idx) + ": " + e.what();
      }
    };
    parallel_for(count, cfg.threads, work);

    total.zero();
    for (std::size_t s = 0; s < count; ++s) {
      if (!failures[s].empty()) {
        throw NumericError("epoch " + std::to_string(epoch + 1) + ", " + failures[s]);
      }
      const double value = values[s];
      if (!std::isfinite(value)) {
        throw NumericError("epoch " + std::to_string(epoch + 1) + ": non-finite loss on molecule " +
                           std::to_string(order[begin + s]));
      }
      total.add(grads[s]);
      log.recon += terms[s].recon;
      log.latent += terms[s].latent;
      log.property += terms[s].property;
      log.total += value;
      log.dropped_constants += terms[s].dropped_constants;
    }
    total.scale(1.0 / static_cast<double>(count));
    if (cfg.clip_norm > 0.0) {
      double sq = 0.0;
      for (std::size_t i = 0; i < total.size(); ++i) sq += total[i].squaredNorm();
      const double norm = std::sqrt(sq);
      if (norm > cfg.clip_norm) total.scale(cfg.clip_norm / norm);
    }
    adam_step(model.params(), total, st.adam);
    ++st.step;
  }
  const double inv = 1.0 / static_cast<double>(n);
  log.recon *= inv;
  log.latent *= inv;
  log.property *= inv;
  log.total *= inv;
  log.dropped_constants *= inv;
  ++st.epoch;
  log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

std::vector<EpochLog> Trainer::run(const std::function<void(const EpochLog&)>& on_epoch) {
  std::vector<EpochLog> logs;
  while (ckpt_.state.epoch < ckpt_.config.epochs) {
    logs.push_back(run_epoch());
    if (on_epoch) on_epoch(logs.back());
  }
  return logs;
}

std::string epoch_csv_header() {
  return "epoch,L_recon,L_latent,L_Q,L_total,dropped_constants,seconds";
}

std::string epoch_csv_row(const EpochLog& l) {
  std::ostringstream os;
  os << l.epoch << ',' << fmt(l.recon) << ',' << fmt(l.latent) << ',' << fmt(l.property) << ','
     << fmt(l.total) << ',' << fmt(l.dropped_constants) << ',' << std::setprecision(4) << l.seconds;
  return os.str();
}

std::vector<MolecularGraph> sample_molecules(const Model& model, const NodeCountHistogram& counts,
                                             int count, std::uint64_t seed,
                                             const GenerateOptions& options, int threads) {
  std::vector<MolecularGraph> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    std::mt19937_64 rng = derive_rng(seed, {purpose(RngPurpose::kSample), i});
    const int n = counts.sample(rng);
    const Tensor z = standard_normal(n, model.latent_dim(), rng);
    out[i] = generate(model, z, rng, options).molecule;
  });
  return out;
}

}  // namespace cgvae
