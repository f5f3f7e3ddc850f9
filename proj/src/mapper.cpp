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

#include "qge/mapper.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace qge::mapper {

Chromosome parse_codons(std::string_view text) {
  Chromosome c;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  while (i < text.size()) {
    Codon v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
    if (ec != std::errc())
      throw std::invalid_argument("codon list: expected a non-negative integer at offset " +
                                  std::to_string(i));
    c.codons.push_back(v);
    i = static_cast<std::size_t>(ptr - text.data());
    skip();
    if (i < text.size()) {
      if (text[i] != ',') throw std::invalid_argument("codon list: expected ','");
      ++i;
      skip();
      if (i == text.size()) throw std::invalid_argument("codon list: trailing ','");
    }
  }
  if (c.empty()) throw std::invalid_argument("codon list is empty");
  return c;
}

std::string format_codons(const Chromosome& c) {
  std::string out;
  for (std::size_t i = 0; i < c.codons.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c.codons[i]);
  }
  return out;
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::wrap_limit_exceeded: return "wrap limit";
    case RejectReason::invalid_phenotype: return "invalid phenotype";
  }
  return "?";
}

namespace {

std::string sentential_form(const std::string& text,
                            const std::vector<const grammar::GrammarSymbol*>& stack) {
  std::string form = text;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    if ((*it)->is_nonterminal()) {
      form += '<';
      form += (*it)->name;
      form += '>';
    } else {
      form += (*it)->name;
    }
  }
  return form;
}

}  // namespace

MappingOutcome map_genotype(const grammar::Grammar& g, const Chromosome& c,
                            std::size_t max_wraps, TraceDetail detail) {
  if (c.empty()) throw std::invalid_argument("cannot map an empty chromosome");
  const bool full = detail == TraceDetail::full;

  MappingOutcome out;
  out.trace.codons = c.codons;

  const grammar::GrammarSymbol start = grammar::nonterminal(g.start());
  std::vector<const grammar::GrammarSymbol*> stack{&start};
  std::string text;
  std::size_t pos = 0;
  std::size_t wraps = 0;

  while (!stack.empty()) {
    const grammar::GrammarSymbol* sym = stack.back();
    if (!sym->is_nonterminal()) {
      text += sym->name;
      stack.pop_back();
      continue;
    }
    if (pos == c.size()) {
      if (wraps == max_wraps) {
        out.reject_reason = RejectReason::wrap_limit_exceeded;
        if (full) out.trace.final_form = sentential_form(text, stack);
        return out;
      }
      ++wraps;
      pos = 0;
    }
    const std::size_t id = g.nonterminal_id(sym->name);
    const auto rules = g.rules_for(id);
    MappingStep step;
    if (full) step.form = sentential_form(text, stack);
    step.position = pos;
    step.codon = c.codons[pos];
    step.rule_count = rules.size();
    step.chosen = step.codon % rules.size();
    step.wraps = wraps;
    step.nonterminal = id;
    out.trace.steps.push_back(std::move(step));
    ++pos;

    stack.pop_back();
    const auto& rhs = rules[out.trace.steps.back().chosen].rhs;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) stack.push_back(&*it);
  }

  if (full) out.trace.final_form = text;
  try {
    out.expression = expr::parse_expression(text);
  } catch (const expr::ExpressionError&) {
    out.reject_reason = RejectReason::invalid_phenotype;
    return out;
  }
  out.mapped = true;
  out.text = std::move(text);
  return out;
}

std::string format_trace(const MappingTrace& t) {
  std::string out = "String_BNF\tChromosome\tOperation\n";
  for (const auto& s : t.steps) {
    out += s.form;
    out += '\t';
    for (std::size_t i = s.position; i < t.codons.size(); ++i) {
      if (i != s.position) out += ',';
      out += std::to_string(t.codons[i]);
    }
    out += '\t';
    out += std::to_string(s.codon) + " mod " + std::to_string(s.rule_count) + "=" +
           std::to_string(s.chosen);
    out += '\n';
  }
  return out;
}

}  // namespace qge::mapper
