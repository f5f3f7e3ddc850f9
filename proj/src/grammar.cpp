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

#include "qge/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace qge::grammar {

GrammarSymbol terminal(std::string name) {
  return {SymbolKind::terminal, std::move(name)};
}

GrammarSymbol nonterminal(std::string name) {
  return {SymbolKind::nonterminal, std::move(name)};
}

Grammar::Grammar(std::string start,
                 std::vector<std::pair<std::string, Alternatives>> definitions)
    : start_(std::move(start)) {
  for (auto& [lhs, alternatives] : definitions) {
    if (lhs.empty()) throw GrammarError("nonterminal with empty name");
    if (ids_.contains(lhs)) throw GrammarError("nonterminal <" + lhs + "> defined twice");
    if (alternatives.empty()) throw GrammarError("nonterminal <" + lhs + "> has no alternatives");
    ids_.emplace(lhs, order_.size());
    order_.push_back(lhs);
    nonterminals_.insert(lhs);

    std::vector<ProductionRule> rules;
    rules.reserve(alternatives.size());
    for (auto& rhs : alternatives) {
      if (rhs.empty()) throw GrammarError("empty alternative for <" + lhs + ">");
      for (const auto& sym : rhs) {
        if (sym.name.empty()) throw GrammarError("empty symbol in a rule for <" + lhs + ">");
        if (!sym.is_nonterminal()) {
          if (sym.name.find_first_of("<>") != std::string::npos)
            throw GrammarError("terminal '" + sym.name + "' contains angle brackets");
          terminals_.insert(sym.name);
        }
      }
      rules.push_back({lhs, std::move(rhs), rules.size()});
    }
    rules_.push_back(std::move(rules));
  }

  for (const auto& rules : rules_)
    for (const auto& rule : rules)
      for (const auto& sym : rule.rhs)
        if (sym.is_nonterminal() && !ids_.contains(sym.name))
          throw GrammarError("undefined nonterminal <" + sym.name + "> referenced by <" +
                             rule.lhs + ">");

  auto it = ids_.find(start_);
  if (it == ids_.end()) throw GrammarError("start symbol <" + start_ + "> is not defined");
  start_id_ = it->second;
}

std::size_t Grammar::nonterminal_id(std::string_view nt) const {
  auto it = ids_.find(nt);
  if (it == ids_.end()) throw GrammarError("unknown nonterminal <" + std::string(nt) + ">");
  return it->second;
}

std::span<const ProductionRule> Grammar::rules_for(std::string_view nt) const {
  return rules_[nonterminal_id(nt)];
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct ParsedAlternative {
  std::vector<GrammarSymbol> symbols;
  std::optional<std::size_t> sequence_number;
};

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw GrammarError("line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::size_t line_;
};

// `(123)` at the very end of an alternative, separated from earlier symbols by
// whitespace, is a sequence number rather than three terminals.
std::optional<std::size_t> sequence_number_at(std::string_view s, std::size_t i,
                                              bool have_symbols) {
  if (!have_symbols || i == 0 || !is_space(s[i - 1])) return std::nullopt;
  std::size_t j = i + 1;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  if (j == i + 1 || j >= s.size() || s[j] != ')') return std::nullopt;
  if (!trim(s.substr(j + 1)).empty()) return std::nullopt;
  return std::stoul(std::string(s.substr(i + 1, j - i - 1)));
}

ParsedAlternative tokenize_alternative(std::string_view s, const LineError& err) {
  ParsedAlternative out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '<') {
      auto close = s.find('>', i);
      if (close == std::string_view::npos) err.fail("unterminated nonterminal");
      auto name = s.substr(i + 1, close - i - 1);
      if (name.empty() || std::any_of(name.begin(), name.end(),
                                      [](char ch) { return is_space(ch) || ch == '<'; }))
        err.fail("malformed nonterminal '<" + std::string(name) + ">'");
      out.symbols.push_back(nonterminal(std::string(name)));
      i = close + 1;
    } else if (c == '(') {
      if (auto seq = sequence_number_at(s, i, !out.symbols.empty())) {
        out.sequence_number = seq;
        break;
      }
      out.symbols.push_back(terminal("("));
      ++i;
    } else if (c == ')') {
      out.symbols.push_back(terminal(")"));
      ++i;
    } else if (c == '>') {
      err.fail("stray '>'");
    } else {
      std::size_t j = i;
      while (j < s.size() && !is_space(s[j]) && s[j] != '<' && s[j] != '(' && s[j] != ')' &&
             s[j] != '>')
        ++j;
      out.symbols.push_back(terminal(std::string(s.substr(i, j - i))));
      i = j;
    }
  }
  return out;
}

std::vector<std::string_view> split_alternatives(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|') {
      parts.push_back(s.substr(begin, i - begin));
      begin = i + 1;
    }
  }
  return parts;
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  if (trim(text).empty()) throw GrammarError("empty grammar text");

  std::vector<std::pair<std::string, Grammar::Alternatives>> definitions;
  std::optional<std::string> start;
  // Index into `definitions` of the rule receiving continuation lines; -1
  // while inside a start-symbol designation.
  std::optional<std::ptrdiff_t> current;

  auto definition_for = [&](const std::string& lhs) -> std::size_t {
    for (std::size_t i = 0; i < definitions.size(); ++i)
      if (definitions[i].first == lhs) return i;
    definitions.emplace_back(lhs, Grammar::Alternatives{});
    return definitions.size() - 1;
  };

  auto add_alternatives = [&](std::string_view body, const LineError& err) {
    for (auto part : split_alternatives(body)) {
      auto alt = tokenize_alternative(part, err);
      if (alt.symbols.empty()) err.fail("empty alternative");
      if (*current < 0) {
        if (alt.symbols.size() != 1 || !alt.symbols[0].is_nonterminal() || start)
          err.fail("start designation must name exactly one nonterminal");
        if (alt.sequence_number && *alt.sequence_number != 0)
          err.fail("start designation has sequence number " +
                   std::to_string(*alt.sequence_number));
        start = alt.symbols[0].name;
        continue;
      }
      auto& alternatives = definitions[static_cast<std::size_t>(*current)].second;
      if (alt.sequence_number && *alt.sequence_number != alternatives.size())
        err.fail("sequence number (" + std::to_string(*alt.sequence_number) +
                 ") does not match position " + std::to_string(alternatives.size()));
      alternatives.push_back(std::move(alt.symbols));
    }
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    LineError err(line_no);
    auto line = trim(raw);
    if (line.empty()) continue;

    if (auto def = line.find("::="); def != std::string_view::npos) {
      auto lhs = trim(line.substr(0, def));
      if (lhs.size() >= 3 && lhs.front() == '<' && lhs.back() == '>') {
        auto name = lhs.substr(1, lhs.size() - 2);
        if (name.find_first_of("<> \t") != std::string_view::npos || name.empty())
          err.fail("malformed left-hand side");
        current = static_cast<std::ptrdiff_t>(definition_for(std::string(name)));
      } else if (lhs == "S") {
        current = -1;
      } else {
        err.fail("malformed left-hand side '" + std::string(lhs) + "'");
      }
      add_alternatives(line.substr(def + 3), err);
    } else if (line.front() == '|') {
      if (!current) err.fail("continuation line without a rule");
      add_alternatives(line.substr(1), err);
    } else {
      err.fail("expected '<name> ::= ...' or a '|' continuation");
    }
  }

  if (definitions.empty()) throw GrammarError("grammar defines no rules");
  std::string start_name = start ? *start : definitions.front().first;
  return Grammar(std::move(start_name), std::move(definitions));
}

std::string to_bnf(const Grammar& g) {
  std::ostringstream out;
  out << "S ::= <" << g.start() << ">\n";
  for (std::size_t id = 0; id < g.definition_order().size(); ++id) {
    out << '<' << g.definition_order()[id] << "> ::=";
    bool first = true;
    for (const auto& rule : g.rules_for(id)) {
      out << (first ? " " : " | ");
      first = false;
      for (std::size_t i = 0; i < rule.rhs.size(); ++i) {
        if (i) out << ' ';
        const auto& sym = rule.rhs[i];
        if (sym.is_nonterminal())
          out << '<' << sym.name << '>';
        else
          out << sym.name;
      }
    }
    out << '\n';
  }
  return out.str();
}

namespace {

constexpr std::string_view kPaperHead = R"(S ::= <expr> (0)
<var> ::= x (0)
  | y (1)
  | z (2)
)";

constexpr std::string_view kXOnlyHead = R"(S ::= <expr> (0)
<var> ::= x (0)
)";

constexpr std::string_view kTail = R"(<operand> ::= 0 (0)
  | 1 (1)
  | 2 (2)
  | 3 (3)
  | 4 (4)
  | 5 (5)
  | 6 (6)
  | 7 (7)
  | 8 (8)
  | 9 (9)
  | <var> (10)
<op> ::= + (0)
  | - (1)
  | * (2)
  | / (3)
<func> ::= sin (0)
  | cos (1)
  | exp (2)
  | log (3)
  | sqrt (4)
  | BRF1 (5)
  | BRF2 (6)
  | BRF3 (7)
  | BRF4 (8)
<expr> ::= <expr> <op> <expr> (0)
  | (<expr>) (1)
  | <func> (<expr>) (2)
  | <operand> (3)
)";

const std::string& source_for(BuiltinVariant variant) {
  static const std::string paper = std::string(kPaperHead) + std::string(kTail);
  static const std::string x_only = std::string(kXOnlyHead) + std::string(kTail);
  return variant == BuiltinVariant::paper ? paper : x_only;
}

}  // namespace

std::string_view builtin_grammar_source(BuiltinVariant variant) {
  return source_for(variant);
}

const Grammar& builtin_grammar(BuiltinVariant variant) {
  static const Grammar paper = parse_grammar(source_for(BuiltinVariant::paper));
  static const Grammar x_only = parse_grammar(source_for(BuiltinVariant::x_only));
  return variant == BuiltinVariant::paper ? paper : x_only;
}

}  // namespace qge::grammar
