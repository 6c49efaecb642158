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

#include "cgvae/atom_types.hpp"

#include <fstream>
#include <sstream>

#include "cgvae/errors.hpp"

namespace cgvae {

std::string charged_symbol(std::string_view element, int charge) {
  std::string s(element);
  if (charge == 0) return s;
  s += charge > 0 ? '+' : '-';
  const int mag = charge > 0 ? charge : -charge;
  if (mag > 1) s += std::to_string(mag);
  return s;
}

AtomTypeTable::AtomTypeTable(std::vector<AtomType> types) : types_(std::move(types)) {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    AtomType& t = types_[i];
    t.index = static_cast<int>(i);
    if (t.valence < 1) throw DataError("atom type " + t.symbol + ": valence must be >= 1");
    if (t.element.empty()) t.element = t.symbol;
    if (!index_.emplace(t.symbol, t.index).second) {
      throw DataError("atom type table: duplicate symbol " + t.symbol);
    }
  }
}

AtomTypeTable AtomTypeTable::parse(std::string_view text) {
  std::vector<AtomType> types;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    AtomType t;
    std::string element;
    if (!(fields >> element)) continue;
    if (!(fields >> t.valence >> t.mass >> t.charge)) {
      throw DataError("atom type table line " + std::to_string(lineno) +
                      ": expected 'element valence mass charge'");
    }
    t.element = element;
    t.symbol = charged_symbol(element, t.charge);
    types.push_back(std::move(t));
  }
  if (types.empty()) throw DataError("atom type table is empty");
  return AtomTypeTable(std::move(types));
}

AtomTypeTable AtomTypeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open atom type table " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

AtomTypeTable AtomTypeTable::qm9() {
  return parse(
      "C 4 12.011 0\n"
      "N 3 14.007 0\n"
      "O 2 15.999 0\n"
      "F 1 18.998 0\n");
}

std::string AtomTypeTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : types_) {
    out << t.element << ' ' << t.valence << ' ' << t.mass << ' ' << t.charge << '\n';
  }
  return out.str();
}

bool AtomTypeTable::contains(std::string_view symbol) const {
  return index_.contains(std::string(symbol));
}

int AtomTypeTable::index_of(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) throw DataError("unknown atom type: " + std::string(symbol));
  return it->second;
}

int valence_of(const AtomTypeTable& table, std::string_view symbol) {
  return table.valence(table.index_of(symbol));
}

}  // namespace cgvae
