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

#include "cgvae/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "cgvae/canonical.hpp"
#include "cgvae/errors.hpp"

namespace cgvae {

double pct_valid(const std::vector<MolecularGraph>& samples, const AtomTypeTable& table) {
  if (samples.empty()) throw UsageError("pct_valid: empty sample set");
  std::size_t ok = 0;
  for (const MolecularGraph& g : samples) ok += is_valid(g, table) ? 1 : 0;
  return 100.0 * static_cast<double>(ok) / static_cast<double>(samples.size());
}

std::unordered_set<std::string> canonical_keys(const std::vector<MolecularGraph>& graphs) {
  std::unordered_set<std::string> keys;
  for (const MolecularGraph& g : graphs) keys.insert(canonical_key(g));
  return keys;
}

double pct_novel(const std::vector<MolecularGraph>& samples,
                 const std::unordered_set<std::string>& training_keys) {
  if (samples.empty()) return 0.0;
  std::size_t novel = 0;
  for (const MolecularGraph& g : samples) novel += training_keys.count(canonical_key(g)) ? 0 : 1;
  return 100.0 * static_cast<double>(novel) / static_cast<double>(samples.size());
}

double pct_unique(const std::vector<MolecularGraph>& samples) {
  if (samples.empty()) return 0.0;
  return 100.0 * static_cast<double>(canonical_keys(samples).size()) /
         static_cast<double>(samples.size());
}

const MetricSummary& SampleStats::at(const std::string& name) const {
  for (const MetricSummary& m : metrics) {
    if (m.name == name) return m;
  }
  throw UsageError("no metric named '" + name + "'");
}

SampleStats distribution_stats(const std::vector<MolecularGraph>& samples,
                               const AtomTypeTable& table) {
  std::vector<std::string> names;
  for (std::size_t t = 0; t < table.size(); ++t) names.push_back("atom_" + table[t].symbol);
  for (const char* b : {"bond_single", "bond_double", "bond_triple"}) names.emplace_back(b);
  for (int r = 3; r <= 6; ++r) names.push_back("ring_" + std::to_string(r));
  for (const char* p : {"molecular_weight", "h_donors", "h_acceptors"}) names.emplace_back(p);

  const std::size_t k = names.size();
  std::vector<double> sum(k, 0.0);
  std::vector<double> sq(k, 0.0);
  std::vector<double> row(k);
  for (const MolecularGraph& g : samples) {
    std::fill(row.begin(), row.end(), 0.0);
    for (int v = 0; v < g.num_nodes(); ++v) row[static_cast<std::size_t>(g.type(v))] += 1.0;
    std::size_t at = table.size();
    for (const Edge& e : g.edges()) row[at + static_cast<std::size_t>(e.order - 1)] += 1.0;
    at += 3;
    const CycleCounts c = count_cycles(g);
    for (int r = 3; r <= 6; ++r) row[at++] = static_cast<double>(c[r]);
    row[at++] = molecular_weight(g, table);
    row[at++] = h_donor_count(g, table);
    row[at++] = h_acceptor_count(g, table);
    for (std::size_t i = 0; i < k; ++i) {
      sum[i] += row[i];
      sq[i] += row[i] * row[i];
    }
  }
  SampleStats s;
  s.n_samples = samples.size();
  const double n = static_cast<double>(std::max<std::size_t>(samples.size(), 1));
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / n;
    const double var = std::max(0.0, sq[i] / n - mean * mean);
    s.metrics.push_back({names[i], mean, std::sqrt(var)});
  }
  return s;
}

std::vector<MetricComparison> compare(const SampleStats& samples, const SampleStats& dataset) {
  if (samples.metrics.size() != dataset.metrics.size()) {
    throw UsageError("compare: metric schemas differ in size");
  }
  std::vector<MetricComparison> out;
  for (std::size_t i = 0; i < samples.metrics.size(); ++i) {
    const MetricSummary& a = samples.metrics[i];
    const MetricSummary& b = dataset.metrics[i];
    if (a.name != b.name) throw UsageError("compare: metric '" + a.name + "' vs '" + b.name + "'");
    MetricComparison c{a.name, a.mean, a.std, b.mean, b.std, std::abs(a.mean - b.mean), 0.0};
    if (b.mean != 0.0) {
      c.relative_delta = c.delta / std::abs(b.mean);
    } else if (c.delta != 0.0) {
      c.relative_delta = std::numeric_limits<double>::infinity();
    }
    out.push_back(c);
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricComparison>& rows) {
  std::ostringstream os;
  os << "name,samples_mean,samples_std,dataset_mean,dataset_std,delta,relative_delta\n";
  os << std::setprecision(10);
  for (const MetricComparison& r : rows) {
    os << r.name << ',' << r.samples_mean << ',' << r.samples_std << ',' << r.dataset_mean << ','
       << r.dataset_std << ',' << r.delta << ',' << r.relative_delta << '\n';
  }
  return os.str();
}

}  // namespace cgvae
