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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cgvae/errors.hpp"
#include "cgvae/graph.hpp"

namespace cgvae {

// Grammar: atoms (bare organic-subset or bracketed with charge and
// optional H count), bonds - = #, branches, ring closures 1-9 and %nn.
// No aromatic atoms, stereo, isotopes, atom classes or '.'.

struct SmilesToken {
  enum class Kind { kAtom, kBond, kBranchOpen, kBranchClose, kRingBond };
  Kind kind;
  std::size_t offset = 0;
  std::string symbol;  // atom: type-table symbol
  int hydrogens = -1;  // atom: bracket H count, -1 when unspecified
  int order = 0;       // bond
  int digit = 0;       // ring bond
};

class SmilesError : public DataError {
 public:
  SmilesError(const std::string& what, std::size_t offset)
      : DataError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::vector<SmilesToken> tokenize_smiles(std::string_view smiles, const AtomTypeTable& table);

// Returns the heavy-atom graph with hydrogens completed.
MolecularGraph parse_smiles(std::string_view smiles, const AtomTypeTable& table);

// Requires is_valid(g); throws InvalidGraphError otherwise. Output is a
// deterministic function of the isomorphism class.
std::string write_smiles(const MolecularGraph& g, const AtomTypeTable& table);

}  // namespace cgvae
