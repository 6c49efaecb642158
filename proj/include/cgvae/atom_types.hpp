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
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cgvae {

struct AtomType {
  std::string symbol;   // e.g. "C", "O-", "N+"
  std::string element;  // symbol without charge suffix
  int valence = 0;      // b*: bond units the atom can carry
  double mass = 0.0;    // isotope-averaged atomic mass
  int charge = 0;
  int index = 0;        // position in the table, i.e. one-hot index
};

// Atom type table loaded from a whitespace-separated config file:
//
//   # symbol valence mass charge
//   C  4 12.011  0
//   O- 1 15.999 -1
class AtomTypeTable {
 public:
  AtomTypeTable() = default;
  explicit AtomTypeTable(std::vector<AtomType> types);

  static AtomTypeTable parse(std::string_view text);
  static AtomTypeTable load(const std::string& path);
  // C, N, O, F.
  static AtomTypeTable qm9();

  [[nodiscard]] std::string to_text() const;

  [[nodiscard]] int size() const { return static_cast<int>(types_.size()); }
  [[nodiscard]] const AtomType& operator[](int i) const { return types_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] bool contains(std::string_view symbol) const;
  // Throws DataError for unknown symbols.
  [[nodiscard]] int index_of(std::string_view symbol) const;
  [[nodiscard]] int valence(int index) const { return (*this)[index].valence; }

  auto begin() const { return types_.begin(); }
  auto end() const { return types_.end(); }

 private:
  std::vector<AtomType> types_;
  std::unordered_map<std::string, int> index_;
};

// b* of a symbol.
int valence_of(const AtomTypeTable& table, std::string_view symbol);

// "O" with charge -1 -> "O-", charge +2 -> "N+2".
std::string charged_symbol(std::string_view element, int charge);

}  // namespace cgvae
