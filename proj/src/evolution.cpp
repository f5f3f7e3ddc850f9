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

#include "qge/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace qge::evolution {

std::string_view to_string(InitMode m) {
  return m == InitMode::random ? "random" : "permutation";
}

std::string_view to_string(PcForm f) {
  return f == PcForm::standard ? "standard" : "paper_literal";
}

std::string_view to_string(Termination t) {
  return t == Termination::max_generations ? "max_generations" : "tolerance_reached";
}

InitMode init_mode_from_name(std::string_view name) {
  if (name == "random") return InitMode::random;
  if (name == "permutation") return InitMode::permutation;
  throw ConfigError("init_mode must be random or permutation");
}

PcForm pc_form_from_name(std::string_view name) {
  if (name == "standard") return PcForm::standard;
  if (name == "paper_literal" || name == "paper-literal") return PcForm::paper_literal;
  throw ConfigError("pc_form must be standard or paper_literal");
}

void EvolutionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(population_size >= 2, "population_size must be >= 2");
  require(chromosome_length >= 1, "chromosome_length must be >= 1");
  require(codon_max >= 1, "codon_max must be >= 1");
  if (init_mode == InitMode::permutation)
    require(static_cast<Codon>(chromosome_length) <= codon_max,
            "codon_max must be >= chromosome_length in permutation mode");
  require(tournament_size >= 2 && tournament_size <= population_size,
          "tournament_size must lie in [2, population_size]");
  require(pc0 > 0.0 && pc0 < 1.0, "pc0 must lie in (0, 1)");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(max_generations >= 0, "max_generations must be >= 0");
  require(std::isfinite(fitness_tolerance), "fitness_tolerance must be finite");
  require(max_wraps >= 0, "max_wraps must be >= 0");
  require(elitism_count >= 0 && elitism_count < population_size,
          "elitism_count must lie in [0, population_size)");
  require(crossover_retries >= 0, "crossover_retries must be >= 0");
  require(threads >= 1, "threads must be >= 1");
}

namespace {

Codon random_codon(Codon max, Rng& rng) {
  return std::uniform_int_distribution<Codon>(0, max)(rng);
}

std::size_t pre_wrap_steps(const mapper::MappingTrace& t) {
  std::size_t n = 0;
  while (n < t.steps.size() && t.steps[n].wraps == 0) ++n;
  return n;
}

void normalize_length(Chromosome& c, const EvolutionConfig& cfg, Rng& rng) {
  const auto len = static_cast<std::size_t>(cfg.chromosome_length);
  if (c.codons.size() > len) c.codons.resize(len);
  while (c.codons.size() < len) c.codons.push_back(random_codon(cfg.codon_max, rng));
}

}  // namespace

std::vector<Individual> init_population(const EvolutionConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Individual> pop(static_cast<std::size_t>(cfg.population_size));
  const auto len = static_cast<std::size_t>(cfg.chromosome_length);
  for (auto& ind : pop) {
    auto& codons = ind.chromosome.codons;
    codons.resize(len);
    if (cfg.init_mode == InitMode::random) {
      for (auto& c : codons) c = random_codon(cfg.codon_max, rng);
    } else {
      std::iota(codons.begin(), codons.end(), Codon{1});
      std::shuffle(codons.begin(), codons.end(), rng);
    }
  }
  return pop;
}

std::vector<std::size_t> tournament_draw(std::size_t n, int k, Rng& rng) {
  if (k < 2 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("tournament size out of range");
  // Redraw on repeats; k is tiny next to n in practice, and unlike Floyd's
  // method the draw order stays uniform, which matters for tie-breaking.
  std::vector<std::size_t> drawn;
  drawn.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (drawn.size() < static_cast<std::size_t>(k)) {
    const std::size_t t = pick(rng);
    if (std::find(drawn.begin(), drawn.end(), t) == drawn.end()) drawn.push_back(t);
  }
  return drawn;
}

std::size_t tournament_select(std::span<const double> totals, int k, Rng& rng) {
  const auto drawn = tournament_draw(totals.size(), k, rng);
  std::size_t best = drawn.front();
  for (std::size_t i : drawn)
    if (totals[i] < totals[best]) best = i;
  return best;
}

std::size_t similarity_length(const mapper::MappingTrace& a, const mapper::MappingTrace& b) {
  const std::size_t n = std::min(pre_wrap_steps(a), pre_wrap_steps(b));
  std::size_t s = 0;
  while (s < n && a.steps[s].nonterminal == b.steps[s].nonterminal &&
         a.steps[s].chosen == b.steps[s].chosen)
    ++s;
  return s;
}

std::pair<Chromosome, Chromosome> homologous_crossover(const Individual& p1, const Individual& p2,
                                                       const grammar::Grammar& g,
                                                       const EvolutionConfig& cfg, Rng& rng) {
  auto trace_of = [&](const Individual& p) {
    if (!p.trace.steps.empty()) return p.trace;
    return mapper::map_genotype(g, p.chromosome, static_cast<std::size_t>(cfg.max_wraps),
                                mapper::TraceDetail::compact)
        .trace;
  };
  const mapper::MappingTrace t1 = trace_of(p1);
  const mapper::MappingTrace t2 = trace_of(p2);
  const auto& a = p1.chromosome.codons;
  const auto& b = p2.chromosome.codons;
  const std::size_t s = similarity_length(t1, t2);
  const std::size_t n1 = std::min(pre_wrap_steps(t1), a.size());
  const std::size_t n2 = std::min(pre_wrap_steps(t2), b.size());

  auto splice = [&](std::size_t i, std::size_t j1, std::size_t j2) {
    Chromosome c1, c2;
    c1.codons.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
    c1.codons.insert(c1.codons.end(), b.begin() + static_cast<std::ptrdiff_t>(i),
                     b.begin() + static_cast<std::ptrdiff_t>(j2));
    c1.codons.insert(c1.codons.end(), a.begin() + static_cast<std::ptrdiff_t>(j1), a.end());
    c2.codons.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(i));
    c2.codons.insert(c2.codons.end(), a.begin() + static_cast<std::ptrdiff_t>(i),
                     a.begin() + static_cast<std::ptrdiff_t>(j1));
    c2.codons.insert(c2.codons.end(), b.begin() + static_cast<std::ptrdiff_t>(j2), b.end());
    normalize_length(c1, cfg, rng);
    normalize_length(c2, cfg, rng);
    return std::pair{std::move(c1), std::move(c2)};
  };

  for (int attempt = 0; attempt <= cfg.crossover_retries; ++attempt) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, s)(rng);
    if (s >= n1 || s >= n2) {
      // One trace is a prefix of the other: no dissimilar region to pair up,
      // so the second point sits at the same index in both parents.
      const std::size_t hi = std::min(a.size(), b.size());
      if (i >= hi) continue;
      const std::size_t j = std::uniform_int_distribution<std::size_t>(i + 1, hi)(rng);
      return splice(i, j, j);
    }
    const std::size_t j1 = std::uniform_int_distribution<std::size_t>(s, n1 - 1)(rng);
    const std::size_t kind = t1.steps[j1].nonterminal;
    for (std::size_t j2 = s; j2 < n2; ++j2)
      if (t2.steps[j2].nonterminal == kind) return splice(i, j1, j2);
  }
  Chromosome c1 = p1.chromosome, c2 = p2.chromosome;
  normalize_length(c1, cfg, rng);
  normalize_length(c2, cfg, rng);
  return {std::move(c1), std::move(c2)};
}

Chromosome invert_segment(const Chromosome& c, std::size_t start, std::size_t length,
                          std::size_t insert_at) {
  const std::size_t n = c.size();
  if (start > n || length > n - start || insert_at > n - length)
    throw std::out_of_range("inversion segment out of range");
  const auto first = c.codons.begin() + static_cast<std::ptrdiff_t>(start);
  const auto last = first + static_cast<std::ptrdiff_t>(length);
  std::vector<Codon> slice(first, last);
  std::reverse(slice.begin(), slice.end());
  std::vector<Codon> rest(c.codons.begin(), first);
  rest.insert(rest.end(), last, c.codons.end());
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(insert_at), slice.begin(), slice.end());
  return Chromosome{std::move(rest)};
}

Chromosome inversion_mutation(const Chromosome& c, Rng& rng, std::size_t expressed) {
  if (c.empty()) throw std::invalid_argument("cannot mutate an empty chromosome");
  const std::size_t n = c.size();
  const std::size_t used = std::clamp<std::size_t>(expressed, 1, n);
  const std::size_t start = std::uniform_int_distribution<std::size_t>(0, used - 1)(rng);
  const std::size_t length = std::uniform_int_distribution<std::size_t>(1, used - start)(rng);
  const std::size_t at = std::uniform_int_distribution<std::size_t>(0, n - length)(rng);
  return invert_segment(c, start, length, at);
}

double update_pc_with(double pc, double gamma, double z, PcForm form) {
  const double step = 1.0 / (1.0 + ((1.0 - pc) / pc) * std::exp(-gamma * z));
  const double next = form == PcForm::standard ? step : 1.0 - step;
  if (std::isnan(next)) return pc;
  return std::clamp(next, kPcMin, kPcMax);
}

double update_pc(double pc, double gamma, Rng& rng, PcForm form) {
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return update_pc_with(pc, gamma, z, form);
}

namespace {

class Engine {
 public:
  Engine(const quantum::ProblemSpec& problem, const grammar::Grammar& g,
         const EvolutionConfig& cfg, const EvolveOptions& options)
      : g_(g),
        cfg_(cfg),
        evaluator_(problem, options.rbf,
                   options.kernels ? *options.kernels : simd::active_kernels()) {
    for (int t = 0; t < cfg.threads; ++t) workspaces_.push_back(evaluator_.make_workspace());
  }

  // Maps and scores every unevaluated individual. Distinct new phenotypes are
  // scored in parallel; results are committed in population order.
  void evaluate(std::vector<Individual>& pop) {
    std::vector<std::size_t> todo;
    std::vector<expr::Expression> pending;
    std::vector<std::string> pending_text;
    std::unordered_map<std::string, std::size_t> pending_index;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      auto& ind = pop[i];
      if (ind.fitness) continue;
      auto m = mapper::map_genotype(g_, ind.chromosome, static_cast<std::size_t>(cfg_.max_wraps),
                                    mapper::TraceDetail::compact);
      ind.trace = std::move(m.trace);
      ind.mapped = m.mapped;
      if (!m.mapped) {
        ind.phenotype_text.clear();
        ind.report = evaluator_.penalty(std::string("mapping rejected: ") +
                                        std::string(mapper::to_string(*m.reject_reason)));
        ind.fitness = ind.report.total;
        continue;
      }
      ind.phenotype_text = m.text;
      todo.push_back(i);
      if (!cache_.contains(m.text) && !pending_index.contains(m.text)) {
        pending_index.emplace(m.text, pending.size());
        pending.push_back(std::move(m.expression));
        pending_text.push_back(std::move(m.text));
      }
    }

    std::vector<quantum::FitnessReport> results(pending.size());
    const std::size_t workers =
        std::min<std::size_t>(workspaces_.size(), std::max<std::size_t>(pending.size(), 1));
    if (workers <= 1) {
      for (std::size_t j = 0; j < pending.size(); ++j)
        results[j] = evaluator_.evaluate(pending[j], workspaces_[0]);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t j = next++; j < pending.size(); j = next++)
            results[j] = evaluator_.evaluate(pending[j], workspaces_[w]);
        });
    }
    for (std::size_t j = 0; j < pending.size(); ++j)
      cache_.emplace(std::move(pending_text[j]), std::move(results[j]));

    for (std::size_t i : todo) {
      auto& ind = pop[i];
      ind.report = cache_.at(ind.phenotype_text);
      ind.fitness = ind.report.total;
    }
  }

 private:
  const grammar::Grammar& g_;
  const EvolutionConfig& cfg_;
  quantum::FitnessEvaluator evaluator_;
  std::vector<quantum::FitnessEvaluator::Workspace> workspaces_;
  std::unordered_map<std::string, quantum::FitnessReport> cache_;
};

std::size_t best_index(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (*pop[i].fitness < *pop[best].fitness) best = i;
  return best;
}

GenerationStats summarize(const std::vector<Individual>& pop, int t, double pc) {
  GenerationStats s;
  s.generation = t;
  s.pc = pc;
  const std::size_t best = best_index(pop);
  s.best_total = *pop[best].fitness;
  s.best_expression = pop[best].phenotype_text;
  double sum = 0.0;
  std::size_t valid = 0;
  double worst = s.best_total;
  for (const auto& ind : pop) {
    if (!ind.report.valid) {
      ++s.invalid_count;
      continue;
    }
    ++valid;
    sum += *ind.fitness;
    worst = std::max(worst, *ind.fitness);
  }
  s.mean_total = valid ? sum / static_cast<double>(valid) : s.best_total;
  s.worst_total = worst;
  return s;
}

}  // namespace

RunReport evolve(const quantum::ProblemSpec& problem, const grammar::Grammar& g,
                 const EvolutionConfig& cfg, const EvolveOptions& options) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(cfg.rng_seed);
  Engine engine(problem, g, cfg, options);

  std::vector<Individual> pop = init_population(cfg, rng);
  for (std::size_t i = 0; i < options.injected.size() && i < pop.size(); ++i) {
    pop[i] = Individual{};
    pop[i].chromosome = options.injected[i];
  }
  engine.evaluate(pop);

  RunReport report;
  report.config = cfg;
  double pc = cfg.pc0;
  auto record = [&](int t) {
    report.stats.push_back(summarize(pop, t, pc));
    if (options.on_generation) options.on_generation(report.stats.back());
  };
  record(0);

  const auto n = static_cast<std::size_t>(cfg.population_size);
  std::vector<double> totals(n);
  for (int t = 1; t <= cfg.max_generations; ++t) {
    if (report.stats.back().best_total <= cfg.fitness_tolerance) {
      report.termination = Termination::tolerance_reached;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) totals[i] = *pop[i].fitness;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return totals[x] < totals[y]; });
    std::vector<Individual> next;
    next.reserve(n);
    for (int e = 0; e < cfg.elitism_count; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (next.size() < n) {
      const auto& p1 = pop[tournament_select(totals, cfg.tournament_size, rng)];
      const auto& p2 = pop[tournament_select(totals, cfg.tournament_size, rng)];
      Chromosome c1, c2;
      if (unit(rng) < pc) {
        std::tie(c1, c2) = homologous_crossover(p1, p2, g, cfg, rng);
      } else {
        c1 = p1.chromosome;
        c2 = p2.chromosome;
      }
      for (Chromosome* c : {&c1, &c2}) {
        if (unit(rng) < 1.0 - pc) {
          const auto m = mapper::map_genotype(g, *c, static_cast<std::size_t>(cfg.max_wraps),
                                              mapper::TraceDetail::compact);
          *c = inversion_mutation(*c, rng, pre_wrap_steps(m.trace));
        }
        if (next.size() < n) {
          Individual child;
          child.chromosome = std::move(*c);
          next.push_back(std::move(child));
        }
      }
    }
    pop = std::move(next);
    engine.evaluate(pop);
    pc = update_pc(pc, cfg.gamma, rng, cfg.pc_form);
    record(t);
  }
  if (report.termination != Termination::tolerance_reached &&
      report.stats.back().best_total <= cfg.fitness_tolerance)
    report.termination = Termination::tolerance_reached;

  report.best = pop[best_index(pop)];
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace qge::evolution
