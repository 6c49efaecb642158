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

#include "cgvae/masking.hpp"

#include <algorithm>

#include "cgvae/errors.hpp"

namespace cgvae {

bool edge_allowed(const MaskContext& ctx, int u) {
  if (u == kStopTarget) return true;
  const int v = ctx.focus;
  if (u < 0 || u >= ctx.graph.num_nodes() || u == v) return false;
  if (ctx.ledger.closed[static_cast<std::size_t>(u)]) return false;
  if (ctx.ledger.remaining(v) <= 0 || ctx.ledger.remaining(u) <= 0) return false;
  return !ctx.graph.has_edge(v, u);
}

bool label_allowed(const MaskContext& ctx, int u, int order) {
  if (order < 1 || order > kMaxBondOrder || !edge_allowed(ctx, u) || u == kStopTarget) return false;
  return order <= std::min(ctx.ledger.remaining(ctx.focus), ctx.ledger.remaining(u));
}

std::vector<std::uint8_t> target_mask(const MaskContext& ctx) {
  const int n = ctx.graph.num_nodes();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) + 1, 0);
  for (int u = 0; u < n; ++u) mask[static_cast<std::size_t>(u)] = edge_allowed(ctx, u) ? 1 : 0;
  mask[static_cast<std::size_t>(n)] = 1;
  return mask;
}

std::vector<std::uint8_t> label_mask(const MaskContext& ctx, int u) {
  std::vector<std::uint8_t> mask(kMaxBondOrder, 0);
  for (int order = 1; order <= kMaxBondOrder; ++order) {
    mask[static_cast<std::size_t>(order - 1)] = label_allowed(ctx, u, order) ? 1 : 0;
  }
  return mask;
}

std::vector<EdgeChoice> legal_choices(const MaskContext& ctx) {
  std::vector<EdgeChoice> out;
  for (int u = 0; u < ctx.graph.num_nodes(); ++u) {
    for (int order = 1; order <= kMaxBondOrder; ++order) {
      if (label_allowed(ctx, u, order)) out.push_back({u, order});
    }
  }
  out.push_back(EdgeChoice::stop());
  return out;
}

void apply_choice(MolecularGraph& graph, BondLedger& ledger, int focus, const EdgeChoice& choice) {
  if (choice.is_stop()) {
    ledger.closed[static_cast<std::size_t>(focus)] = 1;
    return;
  }
  if (!label_allowed(MaskContext{graph, ledger, focus}, choice.target, choice.order)) {
    throw InvalidGraphError("apply_choice: masked edge");
  }
  graph.add_edge(focus, choice.target, choice.order);
  ledger.add_bond(focus, choice.target, choice.order);
}

}  // namespace cgvae
