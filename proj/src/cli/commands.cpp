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

#include <charconv>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qge/cli.hpp"
#include "qge/mapper.hpp"

namespace qge::cli {
namespace {

double parse_number(std::string_view text, const char* flag) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ValidationError(std::string(flag) + ": expected a number, got '" + std::string(text) + "'");
  return v;
}

grammar::BuiltinVariant variant_from_name(const std::string& name) {
  if (name == "paper") return grammar::BuiltinVariant::paper;
  if (name == "x_only" || name == "x-only") return grammar::BuiltinVariant::x_only;
  throw ValidationError("--builtin: expected paper or x_only");
}

struct ProblemFlags {
  std::optional<std::string> config, problem, potential_expr, domain, energy, norm, kernel;
  std::optional<double> c;
  bool residual_abs = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run configuration (flags override it)");
    app->add_option("--problem", problem, "Preset: box, harmonic or harmonic-paper");
    app->add_option("--potential-expr", potential_expr, "Custom potential V(x)");
    app->add_option("--domain", domain, "Interval as a,b");
    app->add_option("--energy", energy, "Fixed energy value or 'rayleigh'");
    app->add_option("--norm", norm, "psi_squared or psi_literal");
    app->add_flag("--residual-abs", residual_abs, "Sum absolute residuals instead of squares");
    app->add_option("--c", c, "Radial basis shape constant");
    app->add_option("--kernel", kernel, "auto, scalar, avx2 or neon");
  }

  RunConfig build() const {
    RunConfig cfg = config ? load_config(*config) : RunConfig{};
    if (problem) {
      try {
        cfg.problem = quantum::preset(*problem);
      } catch (const quantum::ProblemError& e) {
        throw ValidationError(std::string("--problem: ") + e.what());
      }
      cfg.preset = *problem;
    }
    auto& p = cfg.problem;
    if (potential_expr) {
      expr::Expression v;
      try {
        v = expr::parse_expression(*potential_expr);
      } catch (const expr::ExpressionError& e) {
        throw ValidationError(std::string("--potential-expr: ") + e.what());
      }
      p.potential = quantum::CustomPotential{v};
      cfg.preset = "custom";
    }
    if (domain) {
      const auto comma = domain->find(',');
      if (comma == std::string::npos) throw ValidationError("--domain: expected a,b");
      p.a = parse_number(std::string_view(*domain).substr(0, comma), "--domain");
      p.b = parse_number(std::string_view(*domain).substr(comma + 1), "--domain");
    }
    if (energy) {
      if (*energy == "rayleigh")
        p.energy = quantum::RayleighEnergy{};
      else
        p.energy = quantum::FixedEnergy{parse_number(*energy, "--energy")};
    }
    if (norm) {
      if (*norm == "psi_squared") p.norm_convention = quantum::NormConvention::psi_squared;
      else if (*norm == "psi_literal") p.norm_convention = quantum::NormConvention::psi_literal;
      else throw ValidationError("--norm: expected psi_squared or psi_literal");
    }
    if (residual_abs) p.residual_norm = quantum::ResidualNorm::absolute;
    if (c) cfg.rbf.c = *c;
    if (kernel) cfg.kernel = *kernel;
    return cfg;
  }
};

struct EvolutionFlags {
  std::optional<int> pop, gens, k, threads, max_wraps, length;
  std::optional<std::uint64_t> seed;
  std::optional<double> pc0, gamma, tolerance;
  std::optional<std::string> pc_form, init_mode, grammar, builtin, out;
  bool verbose = false;

  void attach(CLI::App* app) {
    app->add_option("--pop", pop, "Population size");
    app->add_option("--gens", gens, "Maximum generations");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--k", k, "Tournament size");
    app->add_option("--pc0", pc0, "Initial crossover probability");
    app->add_option("--gamma", gamma, "Crossover-probability learning rate");
    app->add_option("--pc-form", pc_form, "standard or paper_literal");
    app->add_option("--init-mode", init_mode, "random or permutation");
    app->add_option("--tolerance", tolerance, "Stop once the best total is at or below this");
    app->add_option("--threads", threads, "Fitness worker threads");
    app->add_option("--length", length, "Chromosome length");
    app->add_option("--max-wraps", max_wraps, "Wrapping limit for the mapper");
    app->add_option("--grammar", grammar, "BNF grammar file");
    app->add_option("--builtin", builtin, "Builtin grammar variant when --grammar is absent");
    app->add_option("--out", out, "Directory for report.json and trace.csv");
    app->add_flag("--verbose", verbose, "Print per-generation statistics to stderr");
  }

  void apply(RunConfig& cfg) const {
    auto& e = cfg.evolution;
    if (pop) e.population_size = *pop;
    if (gens) e.max_generations = *gens;
    if (seed) e.rng_seed = *seed;
    if (k) e.tournament_size = *k;
    if (pc0) e.pc0 = *pc0;
    if (gamma) e.gamma = *gamma;
    if (tolerance) e.fitness_tolerance = *tolerance;
    if (threads) e.threads = *threads;
    if (length) e.chromosome_length = *length;
    if (max_wraps) e.max_wraps = *max_wraps;
    try {
      if (pc_form) e.pc_form = evolution::pc_form_from_name(*pc_form);
      if (init_mode) e.init_mode = evolution::init_mode_from_name(*init_mode);
    } catch (const evolution::ConfigError& err) {
      throw ValidationError(err.what());
    }
    if (grammar) cfg.grammar_path = *grammar;
    if (builtin) cfg.builtin = variant_from_name(*builtin);
  }
};

void select_kernel(const RunConfig& cfg) {
  if (cfg.kernel == "auto") return;
  try {
    simd::select_kernels(simd::backend_from_name(cfg.kernel));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("--kernel: ") + e.what());
  }
}

int cmd_solve(const ProblemFlags& pf, const EvolutionFlags& ef, std::ostream& out,
              std::ostream& err) {
  RunConfig cfg = pf.build();
  ef.apply(cfg);
  cfg.validate();
  select_kernel(cfg);
  const grammar::Grammar g = load_grammar(cfg);

  evolution::EvolveOptions opts;
  opts.rbf = cfg.rbf;
  if (ef.verbose)
    opts.on_generation = [&err](const evolution::GenerationStats& s) {
      err << "gen " << s.generation << " best " << format_double(s.best_total) << " pc "
          << format_double(s.pc) << " invalid " << s.invalid_count << " " << s.best_expression
          << '\n';
    };
  const auto report = evolution::evolve(cfg.problem, g, cfg.evolution, opts);
  if (ef.out) write_outputs(*ef.out, cfg, report);

  const auto& b = report.best;
  out << "best: " << (b.mapped ? b.phenotype_text : std::string("(none)")) << '\n';
  out << "total: " << format_double(b.report.total) << '\n';
  out << "residual_sse: " << format_double(b.report.residual_sse) << '\n';
  out << "norm_penalty: " << format_double(b.report.norm_penalty) << '\n';
  out << "boundary_penalty: " << format_double(b.report.boundary_penalty) << '\n';
  out << "energy: " << format_double(b.report.energy_used) << '\n';
  out << "generations: " << report.stats.back().generation << '\n';
  out << "termination: " << evolution::to_string(report.termination) << '\n';
  return 0;
}

int cmd_map(const std::string& codons, const std::optional<std::string>& grammar_path,
            const std::string& builtin, int max_wraps, std::ostream& out) {
  mapper::Chromosome c;
  try {
    c = mapper::parse_codons(codons);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("--codons: ") + e.what());
  }
  if (max_wraps < 0) throw ValidationError("--max-wraps must be >= 0");
  RunConfig cfg;
  cfg.builtin = variant_from_name(builtin);
  if (grammar_path) cfg.grammar_path = *grammar_path;
  const grammar::Grammar g = load_grammar(cfg);
  const auto m = mapper::map_genotype(g, c, static_cast<std::size_t>(max_wraps));
  out << mapper::format_trace(m.trace);
  if (m.mapped) {
    out << m.text << '\n';
  } else {
    out << "partial: " << m.trace.final_form << '\n';
    out << "REJECTED: " << mapper::to_string(*m.reject_reason) << '\n';
  }
  return 0;
}

int cmd_eval(const ProblemFlags& pf, const std::string& text, const std::optional<double>& at,
             std::ostream& out) {
  RunConfig cfg = pf.build();
  cfg.validate();
  select_kernel(cfg);
  expr::Expression psi;
  try {
    psi = expr::parse_expression(text);
  } catch (const expr::ExpressionError& e) {
    throw ValidationError(std::string("--expr: ") + e.what());
  }
  const auto r = quantum::FitnessEvaluator(cfg.problem, cfg.rbf)(psi);
  out << "expression: " << expr::print_expression(psi) << '\n';
  out << "residual_sse: " << format_double(r.residual_sse) << '\n';
  out << "norm_penalty: " << format_double(r.norm_penalty) << '\n';
  out << "boundary_penalty: " << format_double(r.boundary_penalty) << '\n';
  out << "total: " << format_double(r.total) << '\n';
  out << "energy: " << format_double(r.energy_used) << '\n';
  out << "valid: " << (r.valid ? "true" : "false") << '\n';
  if (!r.valid) out << "failure: " << r.failure << '\n';
  if (at) {
    auto show = [&](const char* name, const expr::Result<double>& v) {
      out << name << "(" << format_double(*at) << "): ";
      if (v) out << format_double(*v) << '\n';
      else out << "error: " << v.error().message() << '\n';
    };
    show("psi", expr::evaluate_at(psi, *at, cfg.rbf));
    if (*at > cfg.problem.a && *at < cfg.problem.b) {
      show("H_psi", quantum::apply_hamiltonian(psi, cfg.problem, *at, cfg.rbf));
      if (r.valid) show("residual", quantum::residual(psi, cfg.problem, r.energy_used, *at, cfg.rbf));
    }
  }
  return 0;
}

int cmd_oracle(const ProblemFlags& pf, int n, int index, std::ostream& out) {
  RunConfig cfg = pf.build();
  cfg.validate();
  const auto e = quantum::fd_eigenpair(cfg.problem, n, index);
  out << "E" << index << " = " << format_double(e.energy) << '\n';
  return 0;
}

int cmd_grammar_check(const std::optional<std::string>& path, const std::string& builtin,
                      std::ostream& out) {
  RunConfig cfg;
  cfg.builtin = variant_from_name(builtin);
  if (path) cfg.grammar_path = *path;
  const grammar::Grammar g = load_grammar(cfg);
  out << grammar::to_bnf(g);
  out << "start: " << g.start() << '\n';
  for (const auto& nt : g.definition_order())
    out << "<" << nt << ">: " << g.rules_for(nt).size() << " alternatives\n";
  out << "ok\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grammatical evolution solver for 1-D Schrodinger eigenproblems", "qge"};
  app.require_subcommand(1);

  ProblemFlags solve_pf, eval_pf, oracle_pf;
  EvolutionFlags solve_ef;
  auto* solve = app.add_subcommand("solve", "Evolve a trial wavefunction");
  solve_pf.attach(solve);
  solve_ef.attach(solve);

  std::string codons, map_builtin = "paper";
  std::optional<std::string> map_grammar;
  int map_wraps = 2;
  auto* map = app.add_subcommand("map", "Map a codon list through a grammar and print the trace");
  map->add_option("--codons", codons, "Comma-separated codons")->required();
  map->add_option("--grammar", map_grammar, "BNF grammar file");
  map->add_option("--builtin", map_builtin, "Builtin grammar variant (default paper)");
  map->add_option("--max-wraps", map_wraps, "Wrapping limit");

  std::string expr_text;
  std::optional<double> at;
  auto* eval = app.add_subcommand("eval", "Score an expression as a trial wavefunction");
  eval->add_option("--expr", expr_text, "Expression in x")->required();
  eval->add_option("--at", at, "Also print psi, H psi and the residual at this x");
  eval_pf.attach(eval);

  int points = 2000, index = 0;
  auto* oracle = app.add_subcommand("oracle", "Finite-difference reference eigenvalue");
  oracle_pf.attach(oracle);
  oracle->add_option("-N,--points", points, "Interior grid points");
  oracle->add_option("--index", index, "Eigenvalue index (0 = ground state)");

  std::optional<std::string> check_grammar;
  std::string check_builtin = "x_only";
  auto* check = app.add_subcommand("grammar-check", "Validate and print a grammar");
  check->add_option("--grammar", check_grammar, "BNF grammar file");
  check->add_option("--builtin", check_builtin, "Builtin grammar variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_pf, solve_ef, out, err);
    if (map->parsed()) return cmd_map(codons, map_grammar, map_builtin, map_wraps, out);
    if (eval->parsed()) return cmd_eval(eval_pf, expr_text, at, out);
    if (oracle->parsed()) return cmd_oracle(oracle_pf, points, index, out);
    if (check->parsed()) return cmd_grammar_check(check_grammar, check_builtin, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const grammar::GrammarError& e) {
    err << "grammar error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qge::cli
