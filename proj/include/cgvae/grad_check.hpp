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
#include <limits>
#include <string>

#include "cgvae/autodiff.hpp"

namespace cgvae {

using LossFn = std::function<ad::Var(ad::Tape&, const ParameterSet&)>;

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-4;
  // Entries checked per parameter tensor; the rest are skipped. Entries are
  // chosen with `seed` when a tensor is larger than this.
  std::size_t max_entries_per_param = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Entries whose difference quotient straddled a ReLU kink or clamp even
  // after shrinking the step.
  std::size_t skipped = 0;
  std::string worst;
};

// Compares backward() of `fn` against central differences.
GradCheckReport grad_check(const LossFn& fn, ParameterSet& params, const GradCheckOptions& opts = {});

// Same comparison against a caller-supplied gradient.
GradCheckReport compare_gradients(const LossFn& fn, ParameterSet& params,
                                  const GradientBuffer& analytic, const GradCheckOptions& opts = {});

}  // namespace cgvae
