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

#include "cgvae/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "cgvae/canonical.hpp"

namespace cgvae {

namespace {

constexpr std::array<std::string_view, 10> kOrganicSubset = {"B", "C", "N", "O", "P",
                                                             "S", "F", "Cl", "Br", "I"};

bool in_organic_subset(std::string_view element) {
  return std::find(kOrganicSubset.begin(), kOrganicSubset.end(), element) != kOrganicSubset.end();
}

class Lexer {
 public:
  Lexer(std::string_view s, const AtomTypeTable& table) : s_(s), table_(table) {}

  std::vector<SmilesToken> run() {
    std::vector<SmilesToken> out;
    while (pos_ < s_.size()) out.push_back(next());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw SmilesError(what, at); }

  SmilesToken next() {
    const std::size_t at = pos_;
    const char c = s_[pos_];
    SmilesToken t{SmilesToken::Kind::kAtom, at};
    switch (c) {
      case '-':
      case '=':
      case '#':
        ++pos_;
        t.kind = SmilesToken::Kind::kBond;
        t.order = c == '-' ? 1 : c == '=' ? 2 : 3;
        return t;
      case '(':
        ++pos_;
        t.kind = SmilesToken::Kind::kBranchOpen;
        return t;
      case ')':
        ++pos_;
        t.kind = SmilesToken::Kind::kBranchClose;
        return t;
      case '%': {
        if (pos_ + 2 >= s_.size() + 0 || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
          fail("'%' must be followed by two digits", at);
        }
        t.kind = SmilesToken::Kind::kRingBond;
        t.digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
        pos_ += 3;
        return t;
      }
      case '[':
        return bracket_atom();
      case '.':
        fail("disconnected structures ('.') are not supported", at);
      case ':':
        fail("aromatic bonds (':') are not supported", at);
      case '/':
      case '\\':
        fail("bond stereo markers are not supported", at);
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (c == '0') fail("ring bond digit 0 is not allowed", at);
      ++pos_;
      t.kind = SmilesToken::Kind::kRingBond;
      t.digit = c - '0';
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      fail("aromatic atom '" + std::string(1, c) + "' is outside the kekulized subset", at);
    }
    if (!std::isupper(static_cast<unsigned char>(c))) fail("unexpected character '" + std::string(1, c) + "'", at);
    // two-letter organic symbols first (Cl, Br)
    std::string element(1, c);
    if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
      std::string two = element + s_[pos_ + 1];
      if (in_organic_subset(two)) element = two;
    }
    if (!in_organic_subset(element)) fail("atom '" + element + "' must be bracketed", at);
    if (!table_.contains(element)) fail("unknown atom symbol '" + element + "'", at);
    pos_ += element.size();
    t.symbol = element;
    return t;
  }

  SmilesToken bracket_atom() {
    const std::size_t at = pos_;
    SmilesToken t{SmilesToken::Kind::kAtom, at};
    ++pos_;
    auto peek = [&]() -> char { return pos_ < s_.size() ? s_[pos_] : '\0'; };
    if (std::isdigit(static_cast<unsigned char>(peek()))) fail("isotopes are not supported", pos_);
    if (std::islower(static_cast<unsigned char>(peek()))) fail("aromatic atoms are outside the kekulized subset", pos_);
    if (!std::isupper(static_cast<unsigned char>(peek()))) fail("expected element symbol in bracket atom", pos_);
    std::string element(1, peek());
    ++pos_;
    if (std::islower(static_cast<unsigned char>(peek()))) {
      element += peek();
      ++pos_;
    }
    if (peek() == '@') fail("chirality markers are not supported", pos_);
    if (peek() == 'H') {
      ++pos_;
      t.hydrogens = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        t.hydrogens = peek() - '0';
        ++pos_;
      }
    }
    int charge = 0;
    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      int mag = 0;
      while (peek() == sign) {
        ++mag;
        ++pos_;
      }
      if (mag == 1 && std::isdigit(static_cast<unsigned char>(peek()))) {
        mag = peek() - '0';
        ++pos_;
      }
      charge = sign == '+' ? mag : -mag;
    }
    if (peek() == ':') fail("atom classes are not supported", pos_);
    if (peek() != ']') fail("unterminated bracket atom", at);
    ++pos_;
    const std::string symbol = charged_symbol(element, charge);
    if (!table_.contains(symbol)) fail("unknown atom symbol '" + symbol + "'", at);
    t.symbol = symbol;
    return t;
  }

  std::string_view s_;
  const AtomTypeTable& table_;
  std::size_t pos_ = 0;
};

struct OpenRing {
  int atom;
  int order;  // 0 when unspecified
  std::size_t offset;
};

}  // namespace

std::vector<SmilesToken> tokenize_smiles(std::string_view smiles, const AtomTypeTable& table) {
  return Lexer(smiles, table).run();
}

MolecularGraph parse_smiles(std::string_view smiles, const AtomTypeTable& table) {
  const std::vector<SmilesToken> tokens = tokenize_smiles(smiles, table);
  if (tokens.empty()) throw SmilesError("empty SMILES", 0);
  MolecularGraph g;
  std::vector<int> bracket_h;
  std::vector<std::size_t> atom_offset;
  std::vector<std::pair<int, std::size_t>> branches;
  std::map<int, OpenRing> rings;
  int prev = -1;
  int pending = 0;
  std::size_t pending_at = 0;

  auto connect = [&](int a, int b, int order, std::size_t at) {
    try {
      g.add_edge(a, b, order);
    } catch (const InvalidGraphError& e) {
      throw SmilesError(e.what(), at);
    }
  };

  for (const SmilesToken& t : tokens) {
    switch (t.kind) {
      case SmilesToken::Kind::kAtom: {
        const int id = g.add_node(table.index_of(t.symbol));
        bracket_h.push_back(t.hydrogens);
        atom_offset.push_back(t.offset);
        if (prev >= 0) {
          connect(prev, id, pending ? pending : 1, t.offset);
        } else if (pending) {
          throw SmilesError("bond without a preceding atom", pending_at);
        }
        prev = id;
        pending = 0;
        break;
      }
      case SmilesToken::Kind::kBond:
        if (prev < 0) throw SmilesError("bond without a preceding atom", t.offset);
        if (pending) throw SmilesError("two consecutive bond symbols", t.offset);
        pending = t.order;
        pending_at = t.offset;
        break;
      case SmilesToken::Kind::kBranchOpen:
        if (prev < 0) throw SmilesError("branch without a preceding atom", t.offset);
        if (pending) throw SmilesError("bond symbol before '('", pending_at);
        branches.emplace_back(prev, t.offset);
        break;
      case SmilesToken::Kind::kBranchClose:
        if (branches.empty()) throw SmilesError("unmatched ')'", t.offset);
        if (pending) throw SmilesError("dangling bond before ')'", pending_at);
        prev = branches.back().first;
        branches.pop_back();
        break;
      case SmilesToken::Kind::kRingBond: {
        if (prev < 0) throw SmilesError("ring bond without a preceding atom", t.offset);
        auto it = rings.find(t.digit);
        if (it == rings.end()) {
          rings.emplace(t.digit, OpenRing{prev, pending, t.offset});
        } else {
          const OpenRing open = it->second;
          rings.erase(it);
          if (open.order && pending && open.order != pending) {
            throw SmilesError("conflicting ring-closure bond orders", t.offset);
          }
          const int order = pending ? pending : (open.order ? open.order : 1);
          if (open.atom == prev) throw SmilesError("ring closure onto the same atom", t.offset);
          connect(open.atom, prev, order, t.offset);
        }
        pending = 0;
        break;
      }
    }
  }
  if (pending) throw SmilesError("dangling bond at end of string", pending_at);
  if (!branches.empty()) throw SmilesError("unclosed branch", branches.back().second);
  if (!rings.empty()) throw SmilesError("unclosed ring bond " + std::to_string(rings.begin()->first), rings.begin()->second.offset);

  for (int v = 0; v < g.num_nodes(); ++v) {
    const int free = table.valence(g.type(v)) - g.used_valence(v);
    if (free < 0) throw SmilesError("valence violation on atom " + table[g.type(v)].symbol, atom_offset[static_cast<std::size_t>(v)]);
    const int h = bracket_h[static_cast<std::size_t>(v)];
    if (h >= 0 && h != free) {
      throw SmilesError("bracket hydrogen count disagrees with valence", atom_offset[static_cast<std::size_t>(v)]);
    }
  }
  return complete_hydrogens(g, table);
}

namespace {

std::string atom_text(const AtomType& t) {
  if (t.charge == 0 && in_organic_subset(t.element)) return t.element;
  return "[" + t.symbol + "]";
}

const char* bond_text(int order) { return order == 2 ? "=" : order == 3 ? "#" : ""; }

struct Writer {
  const MolecularGraph& g;
  const AtomTypeTable& table;
  std::vector<int> rank;
  std::vector<std::uint8_t> visited;
  std::vector<std::vector<int>> children;
  // ring bonds per atom: (partner, opens here)
  std::vector<std::vector<std::pair<int, bool>>> ring_bonds;
  std::map<std::pair<int, int>, int> ring_digit;
  std::vector<std::uint8_t> digit_used = std::vector<std::uint8_t>(100, 0);
  std::string out;

  std::vector<int> ordered_neighbors(int v) const {
    std::vector<int> nb;
    for (const Neighbor& n : g.neighbors(v)) nb.push_back(n.node);
    std::sort(nb.begin(), nb.end(), [&](int a, int b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });
    return nb;
  }

  void discover(int v, int parent) {
    visited[static_cast<std::size_t>(v)] = 1;
    for (int u : ordered_neighbors(v)) {
      if (u == parent) continue;
      if (!visited[static_cast<std::size_t>(u)]) {
        children[static_cast<std::size_t>(v)].push_back(u);
        discover(u, v);
      } else if (!ring_digit.contains({std::min(u, v), std::max(u, v)})) {
        ring_digit[{std::min(u, v), std::max(u, v)}] = -1;
        ring_bonds[static_cast<std::size_t>(u)].emplace_back(v, true);
        ring_bonds[static_cast<std::size_t>(v)].emplace_back(u, false);
      }
    }
  }

  void emit(int v) {
    out += atom_text(table[g.type(v)]);
    for (const auto& [partner, opens] : ring_bonds[static_cast<std::size_t>(v)]) {
      const std::pair<int, int> key{std::min(v, partner), std::max(v, partner)};
      int digit;
      if (opens) {
        digit = 1;
        while (digit_used[static_cast<std::size_t>(digit)]) ++digit;
        digit_used[static_cast<std::size_t>(digit)] = 1;
        ring_digit[key] = digit;
        out += bond_text(g.bond_order(v, partner));
      } else {
        digit = ring_digit[key];
        digit_used[static_cast<std::size_t>(digit)] = 0;
      }
      out += digit < 10 ? std::to_string(digit) : "%" + std::to_string(digit);
    }
    const auto& kids = children[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool last = i + 1 == kids.size();
      if (!last) out += '(';
      out += bond_text(g.bond_order(v, kids[i]));
      emit(kids[i]);
      if (!last) out += ')';
    }
  }
};

}  // namespace

std::string write_smiles(const MolecularGraph& g, const AtomTypeTable& table) {
  if (!is_valid(g, table)) throw InvalidGraphError("write_smiles: graph is not a valid molecule");
  const CanonicalForm form = canonical_form(g);
  Writer w{g, table, std::vector<int>(static_cast<std::size_t>(g.num_nodes())),
           std::vector<std::uint8_t>(static_cast<std::size_t>(g.num_nodes()), 0),
           std::vector<std::vector<int>>(static_cast<std::size_t>(g.num_nodes())),
           std::vector<std::vector<std::pair<int, bool>>>(static_cast<std::size_t>(g.num_nodes())),
           {}};
  for (std::size_t i = 0; i < form.order.size(); ++i) w.rank[static_cast<std::size_t>(form.order[i])] = static_cast<int>(i);
  const int root = form.order.front();
  w.discover(root, -1);
  w.emit(root);
  return w.out;
}

}  // namespace cgvae
