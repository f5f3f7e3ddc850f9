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
#include <fstream>
#include <set>
#include <sstream>

#include "qge/cli.hpp"

namespace qge::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads the keys of one JSON object, remembering which were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail("", "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (auto* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    if (auto* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else {
          fail(key, "expected a non-negative integer");
        }
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const char* key, std::string& out) {
    if (auto* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw ValidationError(qualify(key) + ": " + std::string(what));
  }

  std::string qualify(std::string_view key) const {
    if (path_.empty()) return std::string(key);
    if (key.empty()) return path_;
    return path_ + "." + std::string(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw ValidationError("unknown key '" + qualify(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* norm_name(quantum::NormConvention n) {
  return n == quantum::NormConvention::psi_squared ? "psi_squared" : "psi_literal";
}

const char* residual_name(quantum::ResidualNorm n) {
  return n == quantum::ResidualNorm::squared ? "squared" : "absolute";
}

const char* variant_name(grammar::BuiltinVariant v) {
  return v == grammar::BuiltinVariant::paper ? "paper" : "x_only";
}

template <class F>
auto rethrow_as_validation(F&& f) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  } catch (const expr::ExpressionError& e) {
    throw ValidationError(e.what());
  }
}

void read_problem(const json& j, RunConfig& cfg) {
  ObjectReader r(j, "problem");
  std::string preset = cfg.preset;
  r.string("preset", preset);
  if (preset != cfg.preset) {
    if (preset != "custom")
      cfg.problem = rethrow_as_validation([&] { return quantum::preset(preset); });
    cfg.preset = preset;
  }
  auto& p = cfg.problem;
  r.number("a", p.a);
  r.number("b", p.b);
  if (auto* v = r.take("potential")) {
    ObjectReader pr(*v, "problem.potential");
    std::string kind;
    pr.string("kind", kind);
    if (kind == "infinite_well") {
      p.potential = quantum::InfiniteWell{};
    } else if (kind == "harmonic") {
      quantum::Harmonic h;
      pr.number("omega", h.omega);
      p.potential = h;
    } else if (kind == "custom") {
      std::string text;
      pr.string("expr", text);
      if (text.empty()) pr.fail("expr", "required for a custom potential");
      p.potential = quantum::CustomPotential{
          rethrow_as_validation([&] { return expr::parse_expression(text); })};
    } else {
      pr.fail("kind", "expected infinite_well, harmonic or custom");
    }
    pr.finish();
  }
  if (auto* v = r.take("energy")) {
    if (v->is_number()) {
      p.energy = quantum::FixedEnergy{v->get<double>()};
    } else if (v->is_string() && v->get<std::string>() == "rayleigh") {
      p.energy = quantum::RayleighEnergy{};
    } else {
      r.fail("energy", "expected a number or \"rayleigh\"");
    }
  }
  r.number("hbar", p.hbar);
  r.number("mass", p.mass);
  r.integer("collocation_count", p.collocation_count);
  r.number("lambda_norm", p.lambda_norm);
  r.number("mu_boundary", p.mu_boundary);
  r.number("penalty_fitness", p.penalty_fitness);
  r.integer("quadrature_panels", p.quadrature_panels);
  std::string s;
  if (r.has("norm_convention")) {
    r.string("norm_convention", s);
    if (s == "psi_squared") p.norm_convention = quantum::NormConvention::psi_squared;
    else if (s == "psi_literal") p.norm_convention = quantum::NormConvention::psi_literal;
    else r.fail("norm_convention", "expected psi_squared or psi_literal");
  }
  if (r.has("residual_norm")) {
    r.string("residual_norm", s);
    if (s == "squared") p.residual_norm = quantum::ResidualNorm::squared;
    else if (s == "absolute") p.residual_norm = quantum::ResidualNorm::absolute;
    else r.fail("residual_norm", "expected squared or absolute");
  }
  r.finish();
}

void read_evolution(const json& j, evolution::EvolutionConfig& e) {
  ObjectReader r(j, "evolution");
  r.integer("population_size", e.population_size);
  r.integer("chromosome_length", e.chromosome_length);
  r.integer("codon_max", e.codon_max);
  std::string s;
  if (r.has("init_mode")) {
    r.string("init_mode", s);
    e.init_mode = rethrow_as_validation([&] { return evolution::init_mode_from_name(s); });
  }
  r.integer("tournament_size", e.tournament_size);
  r.number("pc0", e.pc0);
  r.number("gamma", e.gamma);
  if (r.has("pc_form")) {
    r.string("pc_form", s);
    e.pc_form = rethrow_as_validation([&] { return evolution::pc_form_from_name(s); });
  }
  r.integer("max_generations", e.max_generations);
  r.number("fitness_tolerance", e.fitness_tolerance);
  r.integer("max_wraps", e.max_wraps);
  r.integer("elitism_count", e.elitism_count);
  r.integer("crossover_retries", e.crossover_retries);
  r.integer("rng_seed", e.rng_seed);
  r.integer("threads", e.threads);
  r.finish();
}

}  // namespace

void RunConfig::validate() const {
  rethrow_as_validation([&] {
    problem.validate();
    evolution.validate();
    rbf.validate();
    if (kernel != "auto") simd::backend_from_name(kernel);
    return 0;
  });
}

ordered_json to_json(const RunConfig& cfg) {
  const auto& p = cfg.problem;
  ordered_json pj;
  pj["preset"] = cfg.preset;
  pj["a"] = p.a;
  pj["b"] = p.b;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, quantum::InfiniteWell>) {
          pj["potential"] = {{"kind", "infinite_well"}};
        } else if constexpr (std::is_same_v<T, quantum::Harmonic>) {
          pj["potential"] = {{"kind", "harmonic"}, {"omega", v.omega}};
        } else {
          pj["potential"] = {{"kind", "custom"}, {"expr", expr::print_expression(v.v)}};
        }
      },
      p.potential);
  if (auto* e = std::get_if<quantum::FixedEnergy>(&p.energy))
    pj["energy"] = e->value;
  else
    pj["energy"] = "rayleigh";
  pj["hbar"] = p.hbar;
  pj["mass"] = p.mass;
  pj["collocation_count"] = p.collocation_count;
  pj["lambda_norm"] = p.lambda_norm;
  pj["mu_boundary"] = p.mu_boundary;
  pj["penalty_fitness"] = p.penalty_fitness;
  pj["norm_convention"] = norm_name(p.norm_convention);
  pj["residual_norm"] = residual_name(p.residual_norm);
  pj["quadrature_panels"] = p.quadrature_panels;

  const auto& e = cfg.evolution;
  ordered_json ej;
  ej["population_size"] = e.population_size;
  ej["chromosome_length"] = e.chromosome_length;
  ej["codon_max"] = e.codon_max;
  ej["init_mode"] = evolution::to_string(e.init_mode);
  ej["tournament_size"] = e.tournament_size;
  ej["pc0"] = e.pc0;
  ej["gamma"] = e.gamma;
  ej["pc_form"] = evolution::to_string(e.pc_form);
  ej["max_generations"] = e.max_generations;
  ej["fitness_tolerance"] = e.fitness_tolerance;
  ej["max_wraps"] = e.max_wraps;
  ej["elitism_count"] = e.elitism_count;
  ej["crossover_retries"] = e.crossover_retries;
  ej["rng_seed"] = e.rng_seed;
  ej["threads"] = e.threads;

  ordered_json j;
  j["problem"] = pj;
  j["evolution"] = ej;
  j["rbf"] = {{"c", cfg.rbf.c}};
  j["grammar"] = {{"path", cfg.grammar_path}, {"builtin", variant_name(cfg.builtin)}};
  j["kernel"] = cfg.kernel;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  ObjectReader r(j, "");
  if (auto* v = r.take("problem")) read_problem(*v, cfg);
  if (auto* v = r.take("evolution")) read_evolution(*v, cfg.evolution);
  if (auto* v = r.take("rbf")) {
    ObjectReader rr(*v, "rbf");
    rr.number("c", cfg.rbf.c);
    rr.finish();
  }
  if (auto* v = r.take("grammar")) {
    ObjectReader gr(*v, "grammar");
    gr.string("path", cfg.grammar_path);
    std::string variant = variant_name(cfg.builtin);
    gr.string("builtin", variant);
    if (variant == "paper") cfg.builtin = grammar::BuiltinVariant::paper;
    else if (variant == "x_only") cfg.builtin = grammar::BuiltinVariant::x_only;
    else gr.fail("builtin", "expected paper or x_only");
    gr.finish();
  }
  r.string("kernel", cfg.kernel);
  r.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  // Reports embed the config they ran with; accept them directly.
  if (j.is_object() && j.contains("config") && j.contains("termination")) return config_from_json(j["config"]);
  return config_from_json(j);
}

grammar::Grammar load_grammar(const RunConfig& cfg) {
  if (cfg.grammar_path.empty()) return grammar::builtin_grammar(cfg.builtin);
  std::ifstream in(cfg.grammar_path);
  if (!in) throw ValidationError("cannot open grammar file " + cfg.grammar_path);
  std::ostringstream text;
  text << in.rdbuf();
  return grammar::parse_grammar(text.str());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ordered_json report_to_json(const RunConfig& cfg, const evolution::RunReport& r) {
  ordered_json j;
  j["config"] = to_json(cfg);
  const auto& b = r.best;
  ordered_json best;
  best["expression"] = b.phenotype_text;
  best["mapped"] = b.mapped;
  best["chromosome"] = b.chromosome.codons;
  best["valid"] = b.report.valid;
  best["total"] = b.report.total;
  best["residual_sse"] = b.report.residual_sse;
  best["norm_penalty"] = b.report.norm_penalty;
  best["boundary_penalty"] = b.report.boundary_penalty;
  best["energy"] = b.report.energy_used;
  if (!b.report.valid) best["failure"] = b.report.failure;
  j["best"] = best;
  j["generations"] = r.stats.empty() ? 0 : r.stats.back().generation;
  j["termination"] = evolution::to_string(r.termination);
  j["kernel"] = simd::to_string(simd::active_kernels().backend);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::string trace_csv(const evolution::RunReport& r) {
  std::string out = "t,best,mean,worst,pc,invalid_count\n";
  for (const auto& s : r.stats) {
    out += std::to_string(s.generation);
    for (double v : {s.best_total, s.mean_total, s.worst_total, s.pc}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += std::to_string(s.invalid_count);
    out += '\n';
  }
  return out;
}

void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg,
                   const evolution::RunReport& r) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "report.json");
    f << report_to_json(cfg, r).dump(2) << '\n';
    if (!f) throw std::runtime_error("failed to write " + (dir / "report.json").string());
  }
  std::ofstream f(dir / "trace.csv", std::ios::binary);
  f << trace_csv(r);
  if (!f) throw std::runtime_error("failed to write " + (dir / "trace.csv").string());
}

}  // namespace qge::cli
