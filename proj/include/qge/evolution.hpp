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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qge/grammar.hpp"
#include "qge/mapper.hpp"
#include "qge/quantum.hpp"

namespace qge::evolution {

using mapper::Chromosome;
using mapper::Codon;
using Rng = std::mt19937_64;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class InitMode { random, permutation };
enum class PcForm { standard, paper_literal };

std::string_view to_string(InitMode m);
std::string_view to_string(PcForm f);
InitMode init_mode_from_name(std::string_view name);
PcForm pc_form_from_name(std::string_view name);

struct EvolutionConfig {
  int population_size = 200;
  int chromosome_length = 50;
  Codon codon_max = 255;
  InitMode init_mode = InitMode::random;
  int tournament_size = 4;
  double pc0 = 0.9;
  double gamma = 0.5;
  PcForm pc_form = PcForm::standard;
  int max_generations = 1000;
  double fitness_tolerance = 1e-8;
  int max_wraps = 2;
  int elitism_count = 1;
  int crossover_retries = 3;
  std::uint64_t rng_seed = 1;
  /// Fitness workers; 1 evaluates on the calling thread.
  int threads = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct Individual {
  Chromosome chromosome;
  /// Fitness total; empty until evaluated.
  std::optional<double> fitness;
  quantum::FitnessReport report;
  bool mapped = false;
  std::string phenotype_text;  ///< derivation string when mapped
  /// Most recent mapping trace (compact: no sentential forms).
  mapper::MappingTrace trace;
};

struct GenerationStats {
  int generation = 0;
  double best_total = 0.0;
  double mean_total = 0.0;
  double worst_total = 0.0;
  std::string best_expression;
  double pc = 0.0;
  int invalid_count = 0;
};

enum class Termination { max_generations, tolerance_reached };
std::string_view to_string(Termination t);

struct RunReport {
  EvolutionConfig config;
  std::vector<GenerationStats> stats;
  Individual best;
  Termination termination = Termination::max_generations;
  double wall_seconds = 0.0;
};

std::vector<Individual> init_population(const EvolutionConfig& cfg, Rng& rng);

/// k distinct indices in [0, n), uniform over sets and over draw order.
/// Throws std::invalid_argument unless 2 <= k <= n.
std::vector<std::size_t> tournament_draw(std::size_t n, int k, Rng& rng);

/// Runs tournament_draw and returns the competitor with the lowest total
/// (first drawn on ties).
std::size_t tournament_select(std::span<const double> totals, int k, Rng& rng);

/// Length of the common prefix of two traces, comparing (nonterminal, chosen
/// rule) over the steps taken before the first wrap.
std::size_t similarity_length(const mapper::MappingTrace& a, const mapper::MappingTrace& b);

/// Two-point crossover between homologous points. Parents without a trace are
/// mapped with `g` first. Offspring are truncated to cfg.chromosome_length or
/// padded with uniform codons.
std::pair<Chromosome, Chromosome> homologous_crossover(const Individual& p1, const Individual& p2,
                                                       const grammar::Grammar& g,
                                                       const EvolutionConfig& cfg, Rng& rng);

/// Removes codons [start, start + length) and reinserts them reversed so the
/// slice begins at `insert_at` in the result.
Chromosome invert_segment(const Chromosome& c, std::size_t start, std::size_t length,
                          std::size_t insert_at);
/// The slice is drawn from the first `expressed` codons (those the last
/// mapping read before wrapping; the whole chromosome by default) and
/// reinserted anywhere.
Chromosome inversion_mutation(const Chromosome& c, Rng& rng,
                              std::size_t expressed = static_cast<std::size_t>(-1));

/// pc stays within [kPcMin, kPcMax].
inline constexpr double kPcMin = 0.01;
inline constexpr double kPcMax = 0.99;
double update_pc_with(double pc, double gamma, double z, PcForm form);
double update_pc(double pc, double gamma, Rng& rng, PcForm form);

struct EvolveOptions {
  expr::RbfConfig rbf;
  const simd::KernelTable* kernels = nullptr;  ///< active_kernels() when null
  /// Placed at the front of the initial population.
  std::vector<Chromosome> injected;
  /// Called after each generation's stats are recorded.
  std::function<void(const GenerationStats&)> on_generation;
};

RunReport evolve(const quantum::ProblemSpec& problem, const grammar::Grammar& g,
                 const EvolutionConfig& cfg, const EvolveOptions& options = {});

}  // namespace qge::evolution
