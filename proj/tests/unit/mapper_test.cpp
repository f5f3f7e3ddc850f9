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


#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "qge/expr.hpp"
#include "qge/grammar.hpp"
#include "qge/mapper.hpp"
#include "support.hpp"

using namespace qge;
using mapper::Chromosome;
using mapper::map_genotype;

namespace {

const grammar::Grammar& paper() { return grammar::builtin_grammar(grammar::BuiltinVariant::paper); }
const grammar::Grammar& x_only() { return grammar::builtin_grammar(grammar::BuiltinVariant::x_only); }

Chromosome random_chromosome(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<mapper::Codon> d(0, 255);
  Chromosome c;
  for (std::size_t i = 0; i < n; ++i) c.codons.push_back(d(rng));
  return c;
}

}  // namespace

TEST_SUITE("mapper") {
  TEST_CASE("worked derivation of sqrt(3/x)") {
    auto c = mapper::parse_codons("10,4,8,15,3,7,19,21,9");
    auto m = map_genotype(paper(), c);
    REQUIRE(m.mapped);
    CHECK(m.text == "sqrt(3/x)");
    REQUIRE(m.trace.steps.size() == 9);

    struct Row {
      const char* form;
      std::size_t r, chosen;
    };
    const Row rows[] = {
        {"<expr>", 4, 2},
        {"<func>(<expr>)", 9, 4},
        {"sqrt(<expr>)", 4, 0},
        {"sqrt(<expr><op><expr>)", 4, 3},
        {"sqrt(<operand><op><expr>)", 11, 3},
        {"sqrt(3<op><expr>)", 4, 3},
        {"sqrt(3/<expr>)", 4, 3},
        {"sqrt(3/<operand>)", 11, 10},
        {"sqrt(3/<var>)", 3, 0},
    };
    for (std::size_t i = 0; i < 9; ++i) {
      CAPTURE(i);
      const auto& s = m.trace.steps[i];
      CHECK(s.form == rows[i].form);
      CHECK(s.rule_count == rows[i].r);
      CHECK(s.chosen == rows[i].chosen);
      CHECK(s.position == i);
      CHECK(s.wraps == 0);
    }
    CHECK(m.trace.final_form == "sqrt(3/x)");

    auto expected = expr::parse_expression("sqrt(3/x)");
    CHECK(m.expression == expected);
  }

  TEST_CASE("trace table text") {
    auto m = map_genotype(paper(), mapper::parse_codons("10,4,8,15,3,7,19,21,9"));
    auto t = mapper::format_trace(m.trace);
    CHECK(t.rfind("String_BNF\tChromosome\tOperation\n", 0) == 0);
    CHECK(t.find("<expr>\t10,4,8,15,3,7,19,21,9\t10 mod 4=2\n") != std::string::npos);
    CHECK(t.find("sqrt(3/<var>)\t9\t9 mod 3=0\n") != std::string::npos);
  }

  TEST_CASE("a single-codon operand derivation") {
    auto m = map_genotype(paper(), Chromosome{{3, 5}});
    REQUIRE(m.mapped);
    CHECK(m.text == "5");
    CHECK(m.trace.steps.size() == 2);
    CHECK(m.expression.is_constant(5.0));
  }

  TEST_CASE("a codon is consumed even for single-alternative rules") {
    auto g = grammar::parse_grammar("<s> ::= (<v>)\n<v> ::= x | y\n");
    auto m = map_genotype(g, Chromosome{{7, 1}});
    REQUIRE(m.mapped);
    CHECK(m.text == "(y)");
    CHECK(m.trace.steps.size() == 2);
    CHECK(m.trace.steps[0].rule_count == 1);
  }

  TEST_CASE("endless recursion is rejected after two wraps") {
    auto m = map_genotype(paper(), Chromosome{{0}});
    CHECK_FALSE(m.mapped);
    REQUIRE(m.reject_reason.has_value());
    CHECK(*m.reject_reason == mapper::RejectReason::wrap_limit_exceeded);
    CHECK(mapper::to_string(*m.reject_reason) == "wrap limit");
    REQUIRE(m.trace.steps.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(m.trace.steps[i].wraps == i);
    CHECK(m.expression.empty());
  }

  TEST_CASE("wrap budget is configurable") {
    // expr -> operand, then operand needs the same codon again.
    Chromosome c{{3}};
    CHECK_FALSE(map_genotype(paper(), c, 0).mapped);
    auto once = map_genotype(paper(), c, 1);
    REQUIRE(once.mapped);
    CHECK(once.text == "3");
    CHECK(once.trace.steps.back().wraps == 1);
  }

  TEST_CASE("spelling RBF maps to the same function as BRF") {
    auto g = grammar::parse_grammar("<e> ::= RBF2(<v>)\n<v> ::= x\n");
    auto m = map_genotype(g, Chromosome{{0, 0}});
    REQUIRE(m.mapped);
    CHECK(m.expression == expr::parse_expression("BRF2(x)"));
  }

  TEST_CASE("a grammar yielding non-expressions is rejected as invalid phenotype") {
    auto g = grammar::parse_grammar("<e> ::= x + | x\n");
    auto m = map_genotype(g, Chromosome{{0}});
    CHECK_FALSE(m.mapped);
    REQUIRE(m.reject_reason.has_value());
    CHECK(*m.reject_reason == mapper::RejectReason::invalid_phenotype);
  }

  TEST_CASE("codon list parsing") {
    CHECK(mapper::parse_codons("1,2,3").codons == std::vector<mapper::Codon>{1, 2, 3});
    CHECK(mapper::parse_codons(" 1 , 2,3 ").codons == std::vector<mapper::Codon>{1, 2, 3});
    CHECK(mapper::format_codons(Chromosome{{4, 0, 255}}) == "4,0,255");
    CHECK_THROWS_AS(mapper::parse_codons(""), std::invalid_argument);
    CHECK_THROWS_AS(mapper::parse_codons("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS(mapper::parse_codons("1,2,"), std::invalid_argument);
    CHECK_THROWS_AS(mapper::parse_codons("-1"), std::invalid_argument);
    CHECK_THROWS_AS(mapper::parse_codons("1;2"), std::invalid_argument);
  }

  TEST_CASE("property: each step picks codon mod R and wraps never decrease") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      auto c = random_chromosome(rng, 1 + trial % 60);
      auto m = map_genotype(paper(), c);
      std::size_t last_wraps = 0;
      for (const auto& s : m.trace.steps) {
        CHECK(s.chosen == s.codon % s.rule_count);
        CHECK(s.codon == c.codons[s.position]);
        CHECK(s.wraps >= last_wraps);
        CHECK(s.wraps <= 2);
        last_wraps = s.wraps;
      }
      if (m.mapped) {
        CHECK(m.text.find('<') == std::string::npos);
        CHECK_FALSE(m.reject_reason.has_value());
      } else {
        CHECK(m.reject_reason.has_value());
      }
    }
  }

  TEST_CASE("property: mapping is deterministic and compact traces agree with full ones") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      auto c = random_chromosome(rng, 50);
      auto a = map_genotype(x_only(), c);
      auto b = map_genotype(x_only(), c, 2, mapper::TraceDetail::compact);
      REQUIRE(a.mapped == b.mapped);
      CHECK(a.text == b.text);
      REQUIRE(a.trace.steps.size() == b.trace.steps.size());
      for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
        CHECK(a.trace.steps[i].chosen == b.trace.steps[i].chosen);
        CHECK(b.trace.steps[i].form.empty());
      }
      if (a.mapped) CHECK(a.expression == b.expression);
    }
  }

  TEST_CASE("property: derivation text re-parses to an equal-valued expression") {
    std::mt19937_64 rng(13);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
      auto c = random_chromosome(rng, 50);
      auto m = map_genotype(x_only(), c);
      if (!m.mapped) continue;
      auto again = expr::parse_expression(m.text);
      for (double x : {0.1, 0.37, 0.8}) {
        auto u = expr::evaluate_at(m.expression, x);
        auto v = expr::evaluate_at(again, x);
        REQUIRE(u.ok() == v.ok());
        if (u.ok() && !std::isnan(*u)) CHECK(*u == *v);
      }
      ++checked;
    }
    CHECK(checked > 100);
  }
}
