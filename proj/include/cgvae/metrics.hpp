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

#include <string>
#include <unordered_set>
#include <vector>

#include "cgvae/atom_types.hpp"
#include "cgvae/graph.hpp"

namespace cgvae {

double pct_valid(const std::vector<MolecularGraph>& samples, const AtomTypeTable& table);
double pct_novel(const std::vector<MolecularGraph>& samples,
                 const std::unordered_set<std::string>& training_keys);
double pct_unique(const std::vector<MolecularGraph>& samples);

std::unordered_set<std::string> canonical_keys(const std::vector<MolecularGraph>& graphs);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// Per-molecule counts (atom types, bond orders, cycles of length 3-6) and
// descriptors (molecular weight, H donors, H acceptors), averaged.
struct SampleStats {
  std::size_t n_samples = 0;
  std::vector<MetricSummary> metrics;

  [[nodiscard]] const MetricSummary& at(const std::string& name) const;
};

SampleStats distribution_stats(const std::vector<MolecularGraph>& samples,
                               const AtomTypeTable& table);

struct MetricComparison {
  std::string name;
  double samples_mean = 0.0;
  double samples_std = 0.0;
  double dataset_mean = 0.0;
  double dataset_std = 0.0;
  double delta = 0.0;           // |samples_mean - dataset_mean|
  double relative_delta = 0.0;  // delta / |dataset_mean|; 0 or +inf when that is 0
};

// Throws UsageError when the two sets have different metric names.
std::vector<MetricComparison> compare(const SampleStats& samples, const SampleStats& dataset);

std::string metrics_csv(const std::vector<MetricComparison>& rows);

}  // namespace cgvae
