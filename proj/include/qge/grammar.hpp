// Copyright 2026 The qge Authors
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
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qge::grammar {

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SymbolKind { terminal, nonterminal };

struct GrammarSymbol {
  SymbolKind kind = SymbolKind::terminal;
  /// Nonterminals are stored without angle brackets; terminals keep their spelling.
  std::string name;

  bool is_nonterminal() const { return kind == SymbolKind::nonterminal; }
  friend bool operator==(const GrammarSymbol&, const GrammarSymbol&) = default;
};

GrammarSymbol terminal(std::string name);
GrammarSymbol nonterminal(std::string name);

struct ProductionRule {
  std::string lhs;
  std::vector<GrammarSymbol> rhs;
  std::size_t index = 0;

  friend bool operator==(const ProductionRule&, const ProductionRule&) = default;
};

/// A validated BNF grammar (N, T, P, S). Immutable once built.
///
/// Nonterminals also get dense integer ids (in order of first definition) so
/// that the mapper can work without string lookups on its hot path.
class Grammar {
 public:
  using Alternatives = std::vector<std::vector<GrammarSymbol>>;

  /// Builds and validates a grammar. `definitions` lists each nonterminal with
  /// its alternatives in index order; the first definition order is kept.
  /// Throws GrammarError when an invariant does not hold.
  Grammar(std::string start,
          std::vector<std::pair<std::string, Alternatives>> definitions);

  const std::string& start() const { return start_; }
  const std::set<std::string>& nonterminals() const { return nonterminals_; }
  const std::set<std::string>& terminals() const { return terminals_; }

  /// Alternatives of `nt` in index order. Throws GrammarError for unknown names.
  std::span<const ProductionRule> rules_for(std::string_view nt) const;

  /// Nonterminal names in definition order; position is the nonterminal id.
  const std::vector<std::string>& definition_order() const { return order_; }
  std::size_t nonterminal_id(std::string_view nt) const;
  std::span<const ProductionRule> rules_for(std::size_t id) const { return rules_[id]; }
  std::size_t start_id() const { return start_id_; }

  friend bool operator==(const Grammar& a, const Grammar& b) {
    return a.start_ == b.start_ && a.order_ == b.order_ && a.rules_ == b.rules_;
  }

 private:
  std::string start_;
  std::size_t start_id_ = 0;
  std::set<std::string> nonterminals_;
  std::set<std::string> terminals_;
  std::vector<std::string> order_;
  std::vector<std::vector<ProductionRule>> rules_;
  std::map<std::string, std::size_t, std::less<>> ids_;
};

/// Parses BNF source text.
///
/// Syntax: `<lhs> ::= alt | alt ...`, with further alternatives allowed on
/// continuation lines that begin with `|`. Repeating an lhs appends
/// alternatives. Anything outside angle brackets is a terminal; parentheses
/// are always single-character terminals. An alternative may end in a
/// sequence number such as `(3)`, which must equal the computed index. A
/// bare `S ::= <name>` line designates the start symbol; otherwise the first
/// defined nonterminal is the start.
Grammar parse_grammar(std::string_view text);

/// Serializes to text accepted by parse_grammar (no sequence numbers).
std::string to_bnf(const Grammar& g);

enum class BuiltinVariant { paper, x_only };

/// The expression grammar over digits, x/y/z, + - * /, sin cos exp log sqrt
/// and the four radial basis functions BRF1..BRF4. `x_only` restricts <var>
/// to the single alternative x.
const Grammar& builtin_grammar(BuiltinVariant variant);

/// BNF source of the builtin grammar, with sequence numbers.
std::string_view builtin_grammar_source(BuiltinVariant variant);

}  // namespace qge::grammar
