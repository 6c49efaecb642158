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
#include <vector>

#include "cgvae/graph.hpp"

namespace cgvae {

struct CanonicalForm {
  // Byte string equal for two graphs iff they are isomorphic (types, bond
  // orders and structure; hydrogens and props are ignored).
  std::string key;
  // order[i] is the node placed at canonical position i.
  std::vector<int> order;
};

// Colour refinement, then individualisation with backtracking over the
// remaining symmetric cells; the lexicographically smallest certificate wins.
CanonicalForm canonical_form(const MolecularGraph& g);

inline std::string canonical_key(const MolecularGraph& g) { return canonical_form(g).key; }

}  // namespace cgvae
