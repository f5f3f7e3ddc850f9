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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qge/expr.hpp"
#include "qge/grammar.hpp"

namespace qge::mapper {

using Codon = std::uint32_t;

/// Integer genotype. Length and codon range are enforced by the evolution
/// engine; the mapper accepts any non-empty codon list.
struct Chromosome {
  std::vector<Codon> codons;

  std::size_t size() const { return codons.size(); }
  bool empty() const { return codons.empty(); }
  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Parses "10,4,8" (whitespace tolerated). Throws std::invalid_argument.
Chromosome parse_codons(std::string_view text);
std::string format_codons(const Chromosome& c);

struct MappingStep {
  /// Sentential form before this step; empty unless full tracing was requested.
  std::string form;
  std::size_t position = 0;  ///< codon index that was read
  Codon codon = 0;
  std::size_t rule_count = 0;  ///< R
  std::size_t chosen = 0;  ///< codon % R
  std::size_t wraps = 0;  ///< wrapping events before this read
  std::size_t nonterminal = 0;  ///< grammar nonterminal id being rewritten
};

struct MappingTrace {
  std::vector<MappingStep> steps;
  /// Codon list the trace was produced from (for the "remaining" column).
  std::vector<Codon> codons;
  /// Final (or, when rejected, last partial) sentential form. Only set with
  /// full tracing.
  std::string final_form;
};

enum class RejectReason {
  wrap_limit_exceeded,
  /// The derivation completed but its text is not an expression (only
  /// possible with user-supplied grammars).
  invalid_phenotype,
};

std::string_view to_string(RejectReason r);

struct MappingOutcome {
  bool mapped = false;
  expr::Expression expression;  ///< set when mapped
  std::string text;  ///< derivation string; set when mapped
  std::optional<RejectReason> reject_reason;
  MappingTrace trace;
};

enum class TraceDetail { compact, full };

/// Leftmost derivation from the grammar's start symbol, consuming one codon
/// per rewrite (also when R == 1) and choosing alternative codon % R. When
/// the codons run out reading restarts at codon 0; a derivation needing more
/// than `max_wraps` such restarts is rejected.
MappingOutcome map_genotype(const grammar::Grammar& g, const Chromosome& c,
                            std::size_t max_wraps = 2, TraceDetail detail = TraceDetail::full);

/// Table with one row per step: sentential form, remaining codons and
/// "V mod R=i", tab separated under the header "String_BNF\tChromosome\tOperation".
/// Needs a trace produced with TraceDetail::full.
std::string format_trace(const MappingTrace& t);

}  // namespace qge::mapper
