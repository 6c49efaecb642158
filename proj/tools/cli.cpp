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

#include "cgvae/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cgvae/canonical.hpp"
#include "cgvae/decoder.hpp"
#include "cgvae/encoder.hpp"
#include "cgvae/errors.hpp"
#include "cgvae/metrics.hpp"
#include "cgvae/parallel.hpp"
#include "cgvae/propopt.hpp"
#include "cgvae/rng.hpp"
#include "cgvae/smiles.hpp"
#include "cgvae/trainer.hpp"

namespace fs = std::filesystem;

namespace cgvae::cli {

std::string data_dir() {
  if (const char* env = std::getenv("CGVAE_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return CGVAE_DATA_DIR_DEFAULT;
}

std::string resolve_data_path(const std::string& path) {
  const fs::path p(path);
  if (fs::exists(p) || p.is_absolute()) return path;
  const fs::path in_data = fs::path(data_dir()) / p;
  if (fs::exists(in_data)) return in_data.string();
  return path;
}

namespace {

// ---- shared helpers ---------------------------------------------------------

using Settings = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string settings_text(const Settings& s) {
  std::string out;
  for (const auto& [k, v] : s) out += k + " = " + v + "\n";
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Echoes the resolved settings and stores them next to the outputs.
void echo_config(std::ostream& out, const std::string& dir, const std::string& text) {
  out << "# resolved config\n" << text;
  write_text(fs::path(dir) / "config.txt", text);
}

AtomTypeTable load_types(const std::string& path) {
  if (!path.empty()) return AtomTypeTable::load(resolve_data_path(path));
  const fs::path bundled = fs::path(data_dir()) / "qm9_types.txt";
  if (fs::exists(bundled)) return AtomTypeTable::load(bundled.string());
  return AtomTypeTable::qm9();
}

bool is_smiles_file(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  return ext == ".smi" || ext == ".txt";
}

// Reads molecules from JSONL, or from a SMILES file (first column) when the
// extension is .smi/.txt.
std::vector<MolecularGraph> read_molecules(const std::string& path, const AtomTypeTable& types) {
  const std::string resolved = resolve_data_path(path);
  if (!is_smiles_file(resolved)) return read_jsonl(resolved, types);
  std::ifstream in(resolved);
  if (!in) throw DataError("cannot open " + resolved);
  std::vector<MolecularGraph> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string smi;
    if (!(fields >> smi)) continue;
    try {
      out.push_back(parse_smiles(smi, types));
    } catch (const DataError& e) {
      throw DataError(resolved + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_smiles_file(const fs::path& path, const std::vector<MolecularGraph>& graphs,
                       const AtomTypeTable& types) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  for (const MolecularGraph& g : graphs) f << write_smiles(g, types) << '\n';
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// ---- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string output;
  std::string summary;
  std::string types;
  std::string columns;
  int max_atoms = 0;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  const AtomTypeTable types = load_types(a.types);
  const std::string input = resolve_data_path(a.input);
  std::ifstream in(input);
  if (!in) throw DataError("cannot read " + input);

  std::vector<std::string> column_names;
  if (!a.columns.empty()) {
    std::stringstream cs(a.columns);
    std::string name;
    while (std::getline(cs, name, ',')) column_names.push_back(name);
  }

  std::vector<MolecularGraph> records;
  nlohmann::json rejects = nlohmann::json::array();
  std::map<std::string, long> atom_hist;
  long lines = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string smi;
    if (!(fields >> smi)) continue;
    ++lines;
    auto reject = [&](const std::string& reason) {
      rejects.push_back({{"line", lineno}, {"smiles", smi}, {"reason", reason}});
      err << input << ":" << lineno << ": rejected '" << smi << "': " << reason << "\n";
    };
    try {
      MolecularGraph g = parse_smiles(smi, types);
      if (!is_valid(g, types)) {
        reject("not a valid molecule (valence or connectivity)");
        continue;
      }
      if (a.max_atoms > 0 && g.num_nodes() > a.max_atoms) {
        reject("more than " + std::to_string(a.max_atoms) + " heavy atoms");
        continue;
      }
      std::string value;
      for (std::size_t c = 0; fields >> value; ++c) {
        const std::string name = c < column_names.size() ? column_names[c] : "prop" + std::to_string(c + 1);
        try {
          std::size_t used = 0;
          g.props()[name] = std::stod(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          throw DataError("property column '" + name + "' is not a number: " + value);
        }
      }
      for (int v = 0; v < g.num_nodes(); ++v) ++atom_hist[types[g.type(v)].symbol];
      records.push_back(std::move(g));
    } catch (const DataError& e) {
      reject(e.what());
    }
  }
  if (lines == 0) throw DataError(input + ": no molecules (empty file)");
  if (records.empty()) throw DataError(input + ": every line was rejected");
  if (2 * static_cast<long>(rejects.size()) > lines) {
    err << "warning: rejected " << rejects.size() << " of " << lines << " molecules\n";
  }
  write_jsonl(a.output, records, types);

  const NodeCountHistogram counts = NodeCountHistogram::fit(records);
  nlohmann::json summary;
  summary["input"] = input;
  summary["records"] = records.size();
  summary["rejected"] = rejects.size();
  summary["atom_types"] = atom_hist;
  summary["node_counts"] = counts.counts;
  summary["rejects"] = rejects;
  const std::string summary_path = a.summary.empty() ? a.output + ".summary.json" : a.summary;
  write_text(summary_path, summary.dump(2) + "\n");

  out << "records " << records.size() << "\nrejected " << rejects.size() << "\n";
  for (const auto& [sym, c] : atom_hist) out << "atoms " << sym << " " << c << "\n";
  for (std::size_t n = 0; n < counts.counts.size(); ++n) {
    if (counts.counts[n] > 0) out << "nodes " << n << " " << counts.counts[n] << "\n";
  }
  return kExitOk;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out_dir;
  std::string config_file;
  std::string types;
  std::string resume;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // flag-backed config keys
  int checkpoint_every = 1;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const std::string data_path = resolve_data_path(a.data);
  if (is_smiles_file(data_path)) {
    throw UsageError("train expects a JSONL dataset; convert " + data_path + " with `cgvae ingest` first");
  }
  ensure_dir(a.out_dir);

  auto apply_overrides = [&](TrainConfig& c) {
    for (const auto& [k, v] : a.flags) c.set(k, v);
    for (const std::string& kv : a.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      c.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
  };

  std::optional<Checkpoint> resumed;
  TrainConfig config;
  if (!a.resume.empty()) {
    resumed = Checkpoint::load(a.resume);
    config = resumed->config;
    TrainConfig probe = config;
    apply_overrides(probe);
    if (probe.model.to_json() != config.model.to_json()) {
      throw UsageError("--resume: model settings cannot change when resuming");
    }
    config = probe;
    resumed->config = config;
  } else {
    if (!a.config_file.empty()) config.apply_text(read_text(resolve_data_path(a.config_file)));
    apply_overrides(config);
  }
  config.validate();

  const AtomTypeTable types = resumed ? resumed->model.types() : load_types(a.types);
  const std::vector<MolecularGraph> data = read_jsonl(data_path, types);
  std::string text = "# data = " + data_path + "\n";
  if (resumed) text += "# resume = " + a.resume + "\n";
  text += config.to_text();
  echo_config(out, a.out_dir, text);

  Trainer trainer = resumed ? Trainer(std::move(*resumed), data) : Trainer(types, data, config);
  const fs::path ckpt_path = fs::path(a.out_dir) / "checkpoint.json";
  const fs::path csv_path = fs::path(a.out_dir) / "losses.csv";
  std::ofstream csv(csv_path, resumed ? std::ios::app : std::ios::trunc);
  if (!csv) throw DataError("cannot write " + csv_path.string());
  if (!resumed || fs::file_size(csv_path) == 0) csv << epoch_csv_header() << "\n";
  out << epoch_csv_header() << "\n";
  trainer.run([&](const EpochLog& log) {
    csv << epoch_csv_row(log) << "\n" << std::flush;
    out << epoch_csv_row(log) << "\n" << std::flush;
    if (a.checkpoint_every > 0 && log.epoch % a.checkpoint_every == 0) trainer.checkpoint().save(ckpt_path.string());
  });
  trainer.checkpoint().save(ckpt_path.string());
  err << "checkpoint written to " << ckpt_path.string() << "\n";
  return kExitOk;
}

// ---- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string checkpoint;
  std::string out_dir;
  int n = 100;
  std::uint64_t seed = 1;
  int threads = 1;
};

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream&) {
  if (a.n < 1) throw UsageError("--n must be positive");
  const Checkpoint ck = Checkpoint::load(a.checkpoint);
  ensure_dir(a.out_dir);
  const Settings s{{"checkpoint", a.checkpoint}, {"n", std::to_string(a.n)},
                   {"seed", std::to_string(a.seed)}, {"threads", std::to_string(a.threads)}};
  echo_config(out, a.out_dir, settings_text(s));
  const std::vector<MolecularGraph> samples =
      sample_molecules(ck.model, ck.node_counts, a.n, a.seed, {}, a.threads);
  write_jsonl((fs::path(a.out_dir) / "samples.jsonl").string(), samples, ck.model.types());
  write_smiles_file(fs::path(a.out_dir) / "samples.smi", samples, ck.model.types());
  out << "samples " << samples.size() << "\nvalid " << pct_valid(samples, ck.model.types()) << "\n";
  return kExitOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string samples;
  std::string data;
  std::string out_dir;
  std::string types;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  const AtomTypeTable types = load_types(a.types);
  const std::vector<MolecularGraph> samples = read_molecules(a.samples, types);
  const std::vector<MolecularGraph> data = read_molecules(a.data, types);
  if (data.empty()) throw DataError("evaluate: reference dataset is empty");
  ensure_dir(a.out_dir);
  echo_config(out, a.out_dir,
              settings_text({{"samples", resolve_data_path(a.samples)}, {"data", resolve_data_path(a.data)}}));

  const double valid = pct_valid(samples, types);
  const double novel = pct_novel(samples, canonical_keys(data));
  const double unique = pct_unique(samples);
  const auto rows = compare(distribution_stats(samples, types), distribution_stats(data, types));
  write_text(fs::path(a.out_dir) / "metrics.csv", metrics_csv(rows));
  nlohmann::json summary{{"n_samples", samples.size()},
                         {"pct_valid", valid},
                         {"pct_novel", novel},
                         {"pct_unique", unique}};
  write_text(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");
  out << "samples " << samples.size() << "\npct_valid " << num(valid) << "\npct_novel " << num(novel)
      << "\npct_unique " << num(unique) << "\n";
  return kExitOk;
}

// ---- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  std::string checkpoint;
  std::string out_dir;
  std::string start;
  int trajectories = 20;
  int points = 6;
  std::uint64_t seed = 1;
  AscentConfig ascent;
  int threads = 1;
};

Tensor posterior_mean(const Model& model, const MolecularGraph& g) {
  ad::Tape tape(false);
  return encode(tape, model, g).mu.value();
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream&) {
  if (a.trajectories < 1 || a.points < 1) throw UsageError("--trajectories and --points must be positive");
  const Checkpoint ck = Checkpoint::load(a.checkpoint);
  if (!ck.property_scale) {
    throw UsageError("checkpoint " + a.checkpoint + " was trained without a property; set property=...");
  }
  ensure_dir(a.out_dir);
  const Settings s{{"checkpoint", a.checkpoint},
                   {"property", ck.property_scale->name},
                   {"start", a.start.empty() ? "prior" : a.start},
                   {"trajectories", std::to_string(a.trajectories)},
                   {"points", std::to_string(a.points)},
                   {"seed", std::to_string(a.seed)},
                   {"step", num(a.ascent.step)},
                   {"iters", std::to_string(a.ascent.max_iters)},
                   {"rho", num(a.ascent.prior_weight)},
                   {"tolerance", num(a.ascent.tolerance)},
                   {"threads", std::to_string(a.threads)}};
  echo_config(out, a.out_dir, settings_text(s));

  std::optional<MolecularGraph> start;
  if (!a.start.empty()) start = parse_smiles(a.start, ck.model.types());
  std::vector<std::vector<OptimizedMolecule>> runs(static_cast<std::size_t>(a.trajectories));
  parallel_for(runs.size(), a.threads, [&](std::size_t t) {
    std::mt19937_64 rng = derive_rng(a.seed, {purpose(RngPurpose::kOptimize), t});
    const Tensor z0 = start ? posterior_mean(ck.model, *start)
                            : standard_normal(ck.node_counts.sample(rng), ck.model.latent_dim(), rng);
    runs[t] = optimize_molecule(ck.model, z0, a.ascent, *ck.property_scale, a.points, rng);
  });

  std::ostringstream csv;
  csv << "trajectory,step,predicted,true,smiles\n";
  for (std::size_t t = 0; t < runs.size(); ++t) {
    for (const OptimizedMolecule& m : runs[t]) {
      csv << t << ',' << m.iteration << ',' << num(m.predicted) << ',' << num(m.true_value) << ','
          << csv_field(write_smiles(m.molecule, ck.model.types())) << '\n';
    }
  }
  write_text(fs::path(a.out_dir) / "trajectory.csv", csv.str());
  out << csv.str();
  return kExitOk;
}

// ---- reconstruct ------------------------------------------------------------

struct ReconstructArgs {
  std::string checkpoint;
  std::string input;
  std::string out_dir;
  int n = 0;
  std::uint64_t seed = 1;
  bool sample = false;
  int threads = 1;
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream&) {
  const Checkpoint ck = Checkpoint::load(a.checkpoint);
  const AtomTypeTable& types = ck.model.types();
  std::vector<MolecularGraph> inputs = read_molecules(a.input, types);
  if (inputs.empty()) throw DataError("reconstruct: no input molecules");
  if (a.n > 0 && static_cast<std::size_t>(a.n) < inputs.size()) inputs.resize(static_cast<std::size_t>(a.n));
  ensure_dir(a.out_dir);
  echo_config(out, a.out_dir,
              settings_text({{"checkpoint", a.checkpoint},
                             {"input", resolve_data_path(a.input)},
                             {"n", std::to_string(inputs.size())},
                             {"seed", std::to_string(a.seed)},
                             {"decode", a.sample ? "sample" : "argmax"}}));

  const GenerateOptions mode = a.sample ? GenerateOptions{} : GenerateOptions{ChoiceMode::kArgmax, ChoiceMode::kArgmax};
  std::vector<MolecularGraph> decoded(inputs.size());
  parallel_for(inputs.size(), a.threads, [&](std::size_t i) {
    std::mt19937_64 rng = derive_rng(a.seed, {purpose(RngPurpose::kSample), i});
    ad::Tape tape(false);
    const Posterior p = encode(tape, ck.model, inputs[i]);
    const Tensor z = a.sample ? sample_latents(tape, p, rng).value() : p.mu.value();
    decoded[i] = generate(ck.model, z, rng, mode).molecule;
  });

  std::ostringstream csv;
  csv << "index,input,decoded,match\n";
  std::size_t matches = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const bool same = canonical_key(inputs[i]) == canonical_key(decoded[i]);
    matches += same ? 1 : 0;
    csv << i << ',' << csv_field(write_smiles(inputs[i], types)) << ','
        << csv_field(write_smiles(decoded[i], types)) << ',' << (same ? 1 : 0) << '\n';
  }
  write_text(fs::path(a.out_dir) / "reconstruct.csv", csv.str());
  out << "molecules " << inputs.size() << "\nexact " << matches << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained graph VAE for molecules", "cgvae"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert a SMILES file into JSONL graph records");
  c_ingest->add_option("--input,-i", ingest.input, "SMILES file, one molecule per line")->required();
  c_ingest->add_option("--output,-o", ingest.output, "JSONL output path")->required();
  c_ingest->add_option("--summary", ingest.summary, "summary JSON path (default <output>.summary.json)");
  c_ingest->add_option("--types", ingest.types, "atom type table");
  c_ingest->add_option("--columns", ingest.columns, "comma-separated names of property columns");
  c_ingest->add_option("--max-atoms", ingest.max_atoms, "reject molecules with more heavy atoms (0: no limit)");

  TrainArgs train;
  int train_threads = 0;
  auto* c_train = app.add_subcommand("train", "Train a model on a JSONL dataset");
  c_train->add_option("--data,-d", train.data, "JSONL dataset")->required();
  c_train->add_option("--out,-o", train.out_dir, "output directory")->required();
  c_train->add_option("--config,-c", train.config_file, "key = value config file");
  c_train->add_option("--set", train.sets, "config override key=value (repeatable)");
  c_train->add_option("--types", train.types, "atom type table");
  c_train->add_option("--resume", train.resume, "continue from a checkpoint");
  c_train->add_option("--checkpoint-every", train.checkpoint_every, "epochs between checkpoints (0: end only)");
  c_train->add_option("--threads", train_threads, "worker threads");
  const std::vector<std::pair<std::string, std::string>> train_flags{
      {"epochs", "epochs"},   {"seed", "seed"},         {"batch", "batch"},
      {"lr", "lr"},           {"traces", "traces"},     {"ablation", "ablation"},
      {"property", "property"}, {"lambda1", "lambda1"}, {"lambda2", "lambda2"},
      {"latent-dim", "d"},    {"steps", "S"}};
  std::map<std::string, std::string> flag_values;
  for (const auto& [flag, key] : train_flags) {
    c_train->add_option("--" + flag, flag_values[flag], "config key " + key);
  }

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Sample molecules from a trained model");
  c_sample->add_option("--checkpoint,-m", sample.checkpoint, "checkpoint JSON")->required();
  c_sample->add_option("--out,-o", sample.out_dir, "output directory")->required();
  c_sample->add_option("--n", sample.n, "number of molecules");
  c_sample->add_option("--seed", sample.seed, "sampling seed");
  c_sample->add_option("--threads", sample.threads, "worker threads");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Compare samples with a dataset and write metrics.csv");
  c_eval->add_option("--samples,-s", evaluate.samples, "samples (JSONL or .smi)")->required();
  c_eval->add_option("--data,-d", evaluate.data, "reference dataset (JSONL or .smi)")->required();
  c_eval->add_option("--out,-o", evaluate.out_dir, "output directory")->required();
  c_eval->add_option("--types", evaluate.types, "atom type table");

  OptimizeArgs optimize;
  auto* c_opt = app.add_subcommand("optimize", "Gradient ascent on the property head in latent space");
  c_opt->add_option("--checkpoint,-m", optimize.checkpoint, "checkpoint trained with a property")->required();
  c_opt->add_option("--out,-o", optimize.out_dir, "output directory")->required();
  c_opt->add_option("--start", optimize.start, "SMILES to start from (default: prior samples)");
  c_opt->add_option("--trajectories", optimize.trajectories, "number of trajectories");
  c_opt->add_option("--points", optimize.points, "decoded points per trajectory");
  c_opt->add_option("--seed", optimize.seed, "seed");
  c_opt->add_option("--step", optimize.ascent.step, "initial step size");
  c_opt->add_option("--iters", optimize.ascent.max_iters, "iteration cap");
  c_opt->add_option("--rho", optimize.ascent.prior_weight, "prior penalty weight");
  c_opt->add_option("--tolerance", optimize.ascent.tolerance, "minimum objective gain per step");
  c_opt->add_option("--threads", optimize.threads, "worker threads");

  ReconstructArgs recon;
  auto* c_rec = app.add_subcommand("reconstruct", "Encode and decode molecules");
  c_rec->add_option("--checkpoint,-m", recon.checkpoint, "checkpoint JSON")->required();
  c_rec->add_option("--input,-i", recon.input, "molecules (JSONL or .smi)")->required();
  c_rec->add_option("--out,-o", recon.out_dir, "output directory")->required();
  c_rec->add_option("--n", recon.n, "use the first n molecules (0: all)");
  c_rec->add_option("--seed", recon.seed, "seed");
  c_rec->add_flag("--sample", recon.sample, "sample latents and choices instead of argmax decoding");
  c_rec->add_option("--threads", recon.threads, "worker threads");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, out, err);
    if (c_train->parsed()) {
      for (const auto& [flag, key] : train_flags) {
        if (c_train->count("--" + flag) > 0) train.flags[key] = flag_values[flag];
      }
      if (train_threads > 0) train.flags["threads"] = std::to_string(train_threads);
      return cmd_train(train, out, err);
    }
    if (c_sample->parsed()) return cmd_sample(sample, out, err);
    if (c_eval->parsed()) return cmd_evaluate(evaluate, out, err);
    if (c_opt->parsed()) return cmd_optimize(optimize, out, err);
    if (c_rec->parsed()) return cmd_reconstruct(recon, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace cgvae::cli
