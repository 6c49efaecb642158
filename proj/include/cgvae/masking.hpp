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

#include <compare>
#include <cstdint>
#include <vector>

#include "cgvae/graph.hpp"

namespace cgvae {

inline constexpr int kStopTarget = -1;
inline constexpr int kMaxBondOrder = 3;

// One decoder decision at the current focus: connect to `target` with bond
// `order`, or stop (target == kStopTarget).
struct EdgeChoice {
  int target = kStopTarget;
  int order = 0;

  [[nodiscard]] bool is_stop() const { return target == kStopTarget; }
  friend bool operator==(const EdgeChoice&, const EdgeChoice&) = default;
  friend auto operator<=>(const EdgeChoice&, const EdgeChoice&) = default;

  static EdgeChoice stop() { return {}; }
};

struct MaskContext {
  const MolecularGraph& graph;
  const BondLedger& ledger;
  int focus;
};

// Whether an edge focus-u may be proposed at all. The stop target is always
// allowed.
bool edge_allowed(const MaskContext& ctx, int u);
// Whether bond order `order` fits the remaining capacity of both endpoints.
bool label_allowed(const MaskContext& ctx, int u, int order);

// N + 1 entries; the last one is the stop target.
std::vector<std::uint8_t> target_mask(const MaskContext& ctx);
// kMaxBondOrder entries, index order - 1.
std::vector<std::uint8_t> label_mask(const MaskContext& ctx, int u);

// Every legal (target, order) pair followed by stop.
std::vector<EdgeChoice> legal_choices(const MaskContext& ctx);

// Adds the bond to both the graph and the ledger after checking the masks.
// Throws InvalidGraphError if the choice is illegal.
void apply_choice(MolecularGraph& graph, BondLedger& ledger, int focus, const EdgeChoice& choice);

}  // namespace cgvae
