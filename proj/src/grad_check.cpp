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

#include "cgvae/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace cgvae {

namespace {

struct Eval {
  double value;
  std::uint64_t fingerprint;
};

Eval evaluate(const LossFn& fn, const ParameterSet& params) {
  ad::Tape tape(false);
  ad::Var loss = fn(tape, params);
  return {loss.scalar(), tape.branch_fingerprint()};
}

std::vector<Eigen::Index> pick_entries(Eigen::Index size, std::size_t limit, std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (idx.size() > limit) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace

GradCheckReport compare_gradients(const LossFn& fn, ParameterSet& params,
                                  const GradientBuffer& analytic, const GradCheckOptions& opts) {
  GradCheckReport report;
  const Eval base = evaluate(fn, params);
  std::mt19937_64 rng(opts.seed);
  for (ParamId p = 0; p < params.size(); ++p) {
    Tensor& value = params.value(p);
    for (Eigen::Index k : pick_entries(value.size(), opts.max_entries_per_param, rng)) {
      double& x = value.data()[k];
      const double saved = x;
      double h = opts.step;
      bool smooth = false;
      double numeric = 0.0;
      for (int attempt = 0; attempt < 3 && !smooth; ++attempt, h /= 10.0) {
        x = saved + h;
        const Eval up = evaluate(fn, params);
        x = saved - h;
        const Eval down = evaluate(fn, params);
        x = saved;
        smooth = up.fingerprint == base.fingerprint && down.fingerprint == base.fingerprint;
        numeric = (up.value - down.value) / (2.0 * h);
      }
      if (!smooth) {
        ++report.skipped;
        continue;
      }
      const double a = analytic[p].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = params[p].name + "[" + std::to_string(k) + "] analytic=" +
                       std::to_string(a) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  report.passed = report.max_rel_error < opts.tolerance;
  return report;
}

GradCheckReport grad_check(const LossFn& fn, ParameterSet& params, const GradCheckOptions& opts) {
  GradientBuffer analytic(params);
  {
    ad::Tape tape(true);
    ad::Var loss = fn(tape, params);
    tape.backward(loss, analytic);
  }
  return compare_gradients(fn, params, analytic, opts);
}

}  // namespace cgvae
