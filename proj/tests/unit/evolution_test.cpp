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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "qge/evolution.hpp"
#include "qge/grammar.hpp"
#include "qge/mapper.hpp"
#include "qge/quantum.hpp"

using namespace qge;
using namespace qge::evolution;

namespace {

const grammar::Grammar& paper() { return grammar::builtin_grammar(grammar::BuiltinVariant::paper); }
const grammar::Grammar& x_only() { return grammar::builtin_grammar(grammar::BuiltinVariant::x_only); }

Individual make(std::vector<Codon> codons) {
  Individual ind;
  ind.chromosome.codons = std::move(codons);
  return ind;
}

Individual random_individual(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<Codon> d(0, 255);
  Individual ind;
  for (std::size_t i = 0; i < n; ++i) ind.chromosome.codons.push_back(d(rng));
  return ind;
}

EvolutionConfig small_config(std::uint64_t seed, int gens) {
  EvolutionConfig cfg;
  cfg.population_size = 40;
  cfg.max_generations = gens;
  cfg.rng_seed = seed;
  return cfg;
}

bool same_stats(const RunReport& a, const RunReport& b) {
  if (a.stats.size() != b.stats.size()) return false;
  for (std::size_t i = 0; i < a.stats.size(); ++i) {
    const auto &x = a.stats[i], &y = b.stats[i];
    if (x.best_total != y.best_total || x.mean_total != y.mean_total ||
        x.worst_total != y.worst_total || x.best_expression != y.best_expression || x.pc != y.pc ||
        x.invalid_count != y.invalid_count)
      return false;
  }
  return a.best.chromosome == b.best.chromosome;
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("configuration defaults and validation") {
    EvolutionConfig cfg;
    CHECK(cfg.population_size == 200);
    CHECK(cfg.chromosome_length == 50);
    CHECK(cfg.tournament_size == 4);
    CHECK(cfg.pc0 == 0.9);
    CHECK(cfg.max_wraps == 2);
    CHECK_NOTHROW(cfg.validate());
    auto bad = [](auto mutate) {
      EvolutionConfig c;
      mutate(c);
      return c;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.population_size = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.pc0 = 1.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.pc0 = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.tournament_size = 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.gamma = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.threads = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) {
                      c.init_mode = InitMode::permutation;
                      c.codon_max = 10;
                    }).validate(),
                    ConfigError);
    try {
      bad([](auto& c) { c.population_size = 1; }).validate();
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("population_size") != std::string::npos);
    }
    CHECK(pc_form_from_name("paper-literal") == PcForm::paper_literal);
    CHECK(init_mode_from_name("permutation") == InitMode::permutation);
    CHECK_THROWS_AS(pc_form_from_name("other"), ConfigError);
  }

  TEST_CASE("seeded initialization is reproducible") {
    EvolutionConfig cfg;
    cfg.rng_seed = 7;
    Rng r1(7), r2(7);
    auto a = init_population(cfg, r1);
    auto b = init_population(cfg, r2);
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].chromosome == b[i].chromosome);
      CHECK(a[i].chromosome.size() == 50);
      CHECK_FALSE(a[i].fitness.has_value());
      for (Codon c : a[i].chromosome.codons) CHECK(c <= 255);
    }
  }

  TEST_CASE("permutation initialization") {
    EvolutionConfig cfg;
    cfg.init_mode = InitMode::permutation;
    Rng rng(3);
    auto pop = init_population(cfg, rng);
    std::vector<Codon> expected(50);
    std::iota(expected.begin(), expected.end(), Codon{1});
    for (const auto& ind : pop) {
      auto c = ind.chromosome.codons;
      std::sort(c.begin(), c.end());
      CHECK(c == expected);
    }
    CHECK(pop[0].chromosome != pop[1].chromosome);
  }

  TEST_CASE("minimum population") {
    EvolutionConfig cfg;
    cfg.population_size = 2;
    cfg.tournament_size = 2;
    Rng rng(1);
    CHECK(init_population(cfg, rng).size() == 2);
  }

  TEST_CASE("tournament examples") {
    Rng rng(5);
    std::vector<double> totals{5, 1, 3, 2};
    for (int i = 0; i < 100; ++i) CHECK(tournament_select(totals, 4, rng) == 1);
    CHECK_THROWS_AS((void)tournament_select(totals, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS((void)tournament_select(totals, 5, rng), std::invalid_argument);
    // Equal totals: the winner is whichever competitor was drawn first.
    std::vector<double> flat(6, 1.0);
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 6000; ++i) ++hits[tournament_select(flat, 3, rng)];
    for (int h : hits) CHECK(h > 700);
    for (int i = 0; i < 1000; ++i) {
      auto d = tournament_draw(6, 4, rng);
      REQUIRE(d.size() == 4);
      std::sort(d.begin(), d.end());
      CHECK(std::adjacent_find(d.begin(), d.end()) == d.end());
      CHECK(d.back() < 6);
    }
  }

  TEST_CASE("property: tournament win rates follow distinct-draw combinatorics") {
    // With k = 2 distinct competitors out of n, the r-th best (0-based) wins
    // with probability (n - 1 - r) / C(n, 2).
    const std::size_t n = 10;
    std::vector<double> totals{9, 3, 7, 1, 8, 0, 6, 2, 5, 4};
    Rng rng(11);
    std::vector<int> wins(n, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++wins[tournament_select(totals, 2, rng)];
    for (std::size_t i = 0; i < n; ++i) {
      const double rank = totals[i];
      const double p = (n - 1 - rank) / 45.0;
      CAPTURE(i);
      CHECK(std::abs(wins[i] / double(draws) - p) < 0.006);
    }
    CHECK(wins[0] == 0);  // the worst never wins
  }

  TEST_CASE("region of similarity") {
    auto a = make({10, 4, 8, 15, 3, 7, 19, 21, 9});
    auto b = make({10, 4, 8, 15, 3, 7, 18, 21, 9});
    auto ta = mapper::map_genotype(paper(), a.chromosome).trace;
    auto tb = mapper::map_genotype(paper(), b.chromosome).trace;
    CHECK(similarity_length(ta, tb) == 6);
    CHECK(similarity_length(ta, ta) == 9);
    // 11 mod 4 differs from 10 mod 4 at the first step.
    auto c = make({11, 4, 8, 15, 3, 7, 19, 21, 9});
    CHECK(similarity_length(ta, mapper::map_genotype(paper(), c.chromosome).trace) == 0);
  }

  TEST_CASE("identical parents give identical offspring") {
    EvolutionConfig cfg;
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      auto p = random_individual(rng, 50);
      auto [c1, c2] = homologous_crossover(p, p, x_only(), cfg, rng);
      CHECK(c1 == p.chromosome);
      CHECK(c2 == p.chromosome);
    }
  }

  TEST_CASE("crossover keeps the shared prefix of the derivation") {
    EvolutionConfig cfg;
    cfg.chromosome_length = 9;
    Rng rng(2);
    auto a = make({10, 4, 8, 15, 3, 7, 19, 21, 9});
    auto b = make({10, 4, 8, 15, 3, 7, 18, 21, 9});
    for (int trial = 0; trial < 200; ++trial) {
      auto [c1, c2] = homologous_crossover(a, b, paper(), cfg, rng);
      for (std::size_t i = 0; i < 6; ++i) {
        CHECK(c1.codons[i] == a.chromosome.codons[i]);
        CHECK(c2.codons[i] == b.chromosome.codons[i]);
      }
      CHECK(c1.size() == 9);
      CHECK(c2.size() == 9);
    }
  }

  TEST_CASE("property: crossover offspring are valid chromosomes") {
    EvolutionConfig cfg;
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
      auto p1 = random_individual(rng, 50);
      auto p2 = random_individual(rng, 50);
      auto [c1, c2] = homologous_crossover(p1, p2, x_only(), cfg, rng);
      REQUIRE(c1.size() == 50);
      REQUIRE(c2.size() == 50);
      for (Codon c : c1.codons) CHECK(c <= cfg.codon_max);
      for (Codon c : c2.codons) CHECK(c <= cfg.codon_max);
    }
  }

  TEST_CASE("inversion examples") {
    Chromosome c{{1, 2, 3, 4, 5}};
    CHECK(invert_segment(c, 1, 2, 0).codons == std::vector<Codon>{3, 2, 1, 4, 5});
    CHECK(invert_segment(c, 0, 5, 0).codons == std::vector<Codon>{5, 4, 3, 2, 1});
    CHECK(invert_segment(c, 4, 1, 0).codons == std::vector<Codon>{5, 1, 2, 3, 4});
    CHECK(invert_segment(c, 0, 2, 3).codons == std::vector<Codon>{3, 4, 5, 2, 1});
    CHECK(invert_segment(c, 2, 0, 1) == c);
    CHECK_THROWS_AS((void)invert_segment(c, 4, 2, 0), std::out_of_range);
    CHECK_THROWS_AS((void)invert_segment(c, 0, 2, 4), std::out_of_range);
    Rng rng(1);
    CHECK_THROWS_AS((void)inversion_mutation(Chromosome{}, rng), std::invalid_argument);
  }

  TEST_CASE("property: inversion mutation preserves length and multiset") {
    Rng rng(4);
    for (int trial = 0; trial < 2000; ++trial) {
      auto p = random_individual(rng, 1 + trial % 50).chromosome;
      auto m = inversion_mutation(p, rng, trial % 7 == 0 ? SIZE_MAX : 1 + trial % 13);
      REQUIRE(m.size() == p.size());
      auto x = p.codons, y = m.codons;
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      CHECK(x == y);
    }
  }

  TEST_CASE("mutation draws its slice from the expressed prefix") {
    // With one expressed codon the slice is codon 0 alone, so the rest keep
    // their relative order.
    Rng rng(6);
    Chromosome c{{10, 20, 30, 40, 50}};
    for (int trial = 0; trial < 100; ++trial) {
      auto m = inversion_mutation(c, rng, 1);
      std::vector<Codon> rest;
      for (Codon v : m.codons)
        if (v != 10) rest.push_back(v);
      CHECK(rest == std::vector<Codon>{20, 30, 40, 50});
    }
  }

  TEST_CASE("crossover probability update") {
    CHECK(update_pc_with(0.5, 0.5, 0.0, PcForm::standard) == doctest::Approx(0.5));
    CHECK(update_pc_with(0.8, 0.5, 0.0, PcForm::standard) == doctest::Approx(0.8));
    CHECK(update_pc_with(0.8, 0.5, 0.0, PcForm::paper_literal) == doctest::Approx(0.2));
    // Positive noise raises pc under the standard form.
    CHECK(update_pc_with(0.5, 0.5, 1.0, PcForm::standard) > 0.5);
    CHECK(update_pc_with(0.5, 0.5, 1e6, PcForm::standard) == kPcMax);
    CHECK(update_pc_with(0.5, 0.5, -1e6, PcForm::standard) == kPcMin);
    // Logistic identity: logit(next) = logit(pc) + gamma z.
    const double pc = 0.3, g = 0.7, z = 0.4;
    const double next = update_pc_with(pc, g, z, PcForm::standard);
    CHECK(std::log(next / (1 - next)) == doctest::Approx(std::log(pc / (1 - pc)) + g * z));
  }

  TEST_CASE("property: pc stays inside (0, 1) for both forms") {
    for (PcForm form : {PcForm::standard, PcForm::paper_literal}) {
      Rng rng(9);
      double pc = 0.9;
      for (int i = 0; i < 1000000; ++i) {
        pc = update_pc(pc, 0.5, rng, form);
        if (!(pc >= kPcMin && pc <= kPcMax)) {
          FAIL("pc left its range at iteration " << i);
          break;
        }
      }
    }
  }
}

TEST_SUITE("engine") {
  TEST_CASE("zero generations records generation zero only") {
    auto r = evolve(quantum::box_preset(), x_only(), small_config(1, 0));
    REQUIRE(r.stats.size() == 1);
    CHECK(r.stats[0].generation == 0);
    CHECK(r.stats[0].pc == 0.9);
    CHECK(r.termination == Termination::max_generations);
  }

  TEST_CASE("elitism keeps the best total non-increasing and stats ordered") {
    auto r = evolve(quantum::box_preset(), x_only(), small_config(2, 40));
    REQUIRE(r.stats.size() == 41);
    for (std::size_t i = 1; i < r.stats.size(); ++i) CHECK(r.stats[i].best_total <= r.stats[i - 1].best_total);
    for (const auto& s : r.stats) {
      CHECK(s.best_total <= s.mean_total);
      CHECK(s.mean_total <= s.worst_total);
      CHECK(s.pc >= kPcMin);
      CHECK(s.pc <= kPcMax);
      CHECK(s.invalid_count >= 0);
      CHECK(s.invalid_count <= 40);
    }
    CHECK(r.best.fitness.value() == r.stats.back().best_total);
  }

  TEST_CASE("runs are reproducible and independent of the worker count") {
    auto cfg = small_config(3, 25);
    auto a = evolve(quantum::box_preset(), x_only(), cfg);
    auto b = evolve(quantum::box_preset(), x_only(), cfg);
    CHECK(same_stats(a, b));
    cfg.threads = 3;
    auto c = evolve(quantum::box_preset(), x_only(), cfg);
    CHECK(same_stats(a, c));
    auto other = small_config(4, 25);
    auto d = evolve(quantum::box_preset(), x_only(), other);
    CHECK_FALSE(same_stats(a, d));
  }

  TEST_CASE("kernel backends do not change the run") {
    auto cfg = small_config(5, 15);
    EvolveOptions scalar;
    scalar.kernels = &simd::scalar_kernels();
    auto a = evolve(quantum::box_preset(), x_only(), cfg, scalar);
    for (auto b : simd::available_backends()) {
      EvolveOptions o;
      o.kernels = &simd::kernels_for(b);
      CHECK(same_stats(a, evolve(quantum::box_preset(), x_only(), cfg, o)));
    }
  }

  TEST_CASE("an injected individual is never lost") {
    auto seed_run = evolve(quantum::box_preset(), x_only(), small_config(6, 30));
    const double target = seed_run.stats.back().best_total;
    EvolveOptions o;
    o.injected.push_back(seed_run.best.chromosome);
    auto r = evolve(quantum::box_preset(), x_only(), small_config(7, 10), o);
    CHECK(r.stats[0].best_total <= target);
    CHECK(r.stats.back().best_total <= target);
  }

  TEST_CASE("rejected chromosomes receive the penalty") {
    EvolveOptions o;
    o.injected.push_back(Chromosome{std::vector<Codon>(50, 0)});
    std::vector<GenerationStats> seen;
    o.on_generation = [&](const GenerationStats& s) { seen.push_back(s); };
    auto r = evolve(quantum::box_preset(), paper(), small_config(8, 2), o);
    CHECK(seen.size() == 3);
    CHECK(seen[0].invalid_count >= 1);
  }

  TEST_CASE("tolerance stops the run early") {
    auto cfg = small_config(9, 50);
    cfg.fitness_tolerance = 1e9;  // any valid candidate qualifies
    auto r = evolve(quantum::box_preset(), x_only(), cfg);
    CHECK(r.termination == Termination::tolerance_reached);
    CHECK(r.stats.size() == 1);
  }

  TEST_CASE("cached fitness equals a fresh evaluation") {
    auto cfg = small_config(10, 20);
    auto r = evolve(quantum::box_preset(), x_only(), cfg);
    auto m = mapper::map_genotype(x_only(), r.best.chromosome);
    double fresh = m.mapped ? quantum::fitness(m.expression, quantum::box_preset()).total : 1e10;
    CHECK(*r.best.fitness == fresh);
    CHECK(r.best.phenotype_text == (m.mapped ? m.text : std::string()));
    CHECK(r.stats.back().best_expression == r.best.phenotype_text);
  }
}
