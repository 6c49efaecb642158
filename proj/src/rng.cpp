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

#include "cgvae/rng.hpp"

#include "cgvae/errors.hpp"

namespace cgvae {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix(seed);
  for (std::uint64_t p : path) h = mix(h ^ mix(p + 0x632be59bd9b4e019ULL));
  return std::mt19937_64(h);
}

Tensor standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Tensor t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

int sample_index(const double* weights, int n, std::mt19937_64& rng) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += weights[i];
  if (!(total > 0.0)) throw NoLegalChoiceError("sample_index: no positive weight");
  std::uniform_real_distribution<double> u(0.0, total);
  const double r = u(rng);
  double acc = 0.0;
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (r < acc) return i;
  }
  return last;
}

}  // namespace cgvae
