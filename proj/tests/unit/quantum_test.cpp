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

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "qge/expr.hpp"
#include "qge/quantum.hpp"
#include "qge/simd.hpp"
#include "support.hpp"

using namespace qge;
using namespace qge::quantum;
using expr::parse_expression;
using std::numbers::pi;

namespace {

double ok(const Result<double>& r) {
  REQUIRE_MESSAGE(r.ok(), r.error().message());
  return *r;
}

// Straight-line restatement of the fitness contract using only tree
// evaluation and the standalone quadrature.
FitnessReport reference_fitness(const Expression& psi, const ProblemSpec& p, const RbfConfig& rbf) {
  FitnessReport r;
  r.total = p.penalty_fitness;
  auto f = [&](double x) { return expr::evaluate_at(psi, x, rbf); };
  double energy = 0.0;
  if (std::holds_alternative<RayleighEnergy>(p.energy)) {
    auto e = rayleigh_energy(psi, p, rbf);
    if (!e) return r;
    energy = *e;
  } else {
    energy = std::get<FixedEnergy>(p.energy).value;
  }
  double sse = 0.0;
  for (double x : collocation_points(p.a, p.b, p.collocation_count)) {
    auto res = residual(psi, p, energy, x, rbf);
    if (!res) return r;
    sse += p.residual_norm == ResidualNorm::squared ? *res * *res : std::abs(*res);
  }
  auto q = quadrature(
      [&](double x) -> Result<double> {
        auto v = f(x);
        if (!v) return v;
        return p.norm_convention == NormConvention::psi_squared ? *v * *v : *v;
      },
      p.a, p.b, p.quadrature_panels);
  if (!q) return r;
  double boundary = 0.0;
  if (p.has_walls()) {
    auto lo = f(p.a), hi = f(p.b);
    if (!lo || !hi) return r;
    boundary = p.mu_boundary * (*lo * *lo + *hi * *hi);
  }
  r.residual_sse = sse;
  r.norm_penalty = p.lambda_norm * (*q - 1.0) * (*q - 1.0);
  r.boundary_penalty = boundary;
  r.total = sse + r.norm_penalty + boundary;
  r.energy_used = energy;
  r.valid = std::isfinite(r.total) && r.total < p.penalty_fitness;
  if (!r.valid) r.total = p.penalty_fitness;
  return r;
}

void check_close(double a, double b, double rel) {
  CHECK(std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300}) + 1e-18);
}

const Expression& box_ground() {
  static const Expression e = parse_expression("sqrt(2)*sin(3.141592653589793*x)");
  return e;
}

const Expression& gaussian() {
  static const Expression e = parse_expression("exp(0-x*x/2)/sqrt(sqrt(3.141592653589793))");
  return e;
}

}  // namespace

TEST_SUITE("quantum") {
  TEST_CASE("collocation points are interior and equidistant") {
    auto xs = collocation_points(0.0, 1.0, 100);
    REQUIRE(xs.size() == 100);
    CHECK(xs.front() == doctest::Approx(1.0 / 101.0));
    CHECK(xs.back() == doctest::Approx(100.0 / 101.0));
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(1.0 / 101.0));
    auto ys = collocation_points(-5.0, 5.0, 3);
    CHECK(ys == std::vector<double>{-2.5, 0.0, 2.5});
    CHECK_THROWS_AS(collocation_points(1.0, 0.0, 5), ProblemError);
  }

  TEST_CASE("potentials") {
    CHECK(ok(potential_at(box_preset(), 0.3)) == 0.0);
    CHECK(ok(potential_at(harmonic_preset(), 2.0)) == 2.0);
    ProblemSpec p;
    p.potential = CustomPotential{parse_expression("3*x")};
    CHECK(ok(potential_at(p, 0.5)) == 1.5);
  }

  TEST_CASE("Hamiltonian examples") {
    auto s = parse_expression("sin(3.141592653589793*x)");
    CHECK(ok(apply_hamiltonian(s, box_preset(), 0.5)) == doctest::Approx(pi * pi / 2).epsilon(1e-14));
    auto g = parse_expression("exp(0-x*x/2)");
    for (double x : {-2.0, -0.3, 0.0, 1.7})
      CHECK(ok(apply_hamiltonian(g, harmonic_preset(), x)) ==
            doctest::Approx(0.5 * std::exp(-x * x / 2)).epsilon(1e-13));
    CHECK(ok(apply_hamiltonian(parse_expression("1"), box_preset(), 0.4)) == 0.0);
    CHECK_THROWS_AS((void)apply_hamiltonian(s, box_preset(), 0.0), ProblemError);
    CHECK_THROWS_AS((void)apply_hamiltonian(s, box_preset(), 1.0), ProblemError);
  }

  TEST_CASE("kinetic coefficient uses hbar squared") {
    ProblemSpec p;
    p.hbar = 2.0;
    p.mass = 0.5;
    CHECK(p.kinetic_coefficient() == 4.0);
    auto s = parse_expression("sin(x)");
    CHECK(ok(apply_hamiltonian(s, p, 0.5)) == doctest::Approx(4.0 * std::sin(0.5)));
  }

  TEST_CASE("residual examples") {
    auto s = parse_expression("sin(3.141592653589793*x)");
    for (double x : collocation_points(0, 1, 100))
      CHECK(std::abs(ok(residual(s, box_preset(), pi * pi / 2, x))) <= 1e-10);
    for (double x : collocation_points(-5, 5, 100))
      CHECK(std::abs(ok(residual(gaussian(), harmonic_preset(), 0.5, x))) <= 1e-10);
    CHECK(ok(residual(parse_expression("1"), box_preset(), pi * pi / 2, 0.7)) == -pi * pi / 2);
    auto bad = residual(parse_expression("log(x-0.5)"), box_preset(), 1.0, 0.25);
    CHECK_FALSE(bad.ok());
  }

  TEST_CASE("Simpson quadrature") {
    CHECK(ok(quadrature([](double) -> Result<double> { return 1.0; }, 0, 1, 1000)) == 1.0);
    CHECK(ok(quadrature([](double x) -> Result<double> { return x; }, 0, 1, 1000)) == doctest::Approx(0.5).epsilon(1e-15));
    double s2 = ok(quadrature(
        [](double x) -> Result<double> { return std::sin(pi * x) * std::sin(pi * x); }, 0, 1, 1000));
    CHECK(std::abs(s2 - 0.5) <= 1e-10);
    // Exact on cubics.
    CHECK(ok(quadrature([](double x) -> Result<double> { return x * x * x; }, 0, 2, 2)) == doctest::Approx(4.0));
    auto fail = quadrature([](double x) -> Result<double> { return expr::evaluate_at(parse_expression("log(x)"), x); },
                           0, 1, 10);
    CHECK_FALSE(fail.ok());
    CHECK_THROWS_AS((void)quadrature([](double) -> Result<double> { return 1.0; }, 0, 1, 3), ProblemError);
  }

  TEST_CASE("Rayleigh quotient of exact eigenfunctions") {
    CHECK(ok(rayleigh_energy(box_ground(), box_preset())) == doctest::Approx(pi * pi / 2).epsilon(1e-6));
    CHECK(ok(rayleigh_energy(gaussian(), harmonic_preset())) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_FALSE(rayleigh_energy(parse_expression("0"), box_preset()).ok());
  }

  TEST_CASE("fitness of exact eigenfunctions") {
    auto r = fitness(box_ground(), box_preset());
    CHECK(r.valid);
    CHECK(r.residual_sse <= 1e-16);
    CHECK(r.total <= 1e-6);
    auto g = fitness(gaussian(), harmonic_preset());
    CHECK(g.valid);
    CHECK(g.residual_sse <= 1e-16);
    CHECK(g.boundary_penalty == 0.0);
    CHECK(g.norm_penalty <= 1e-6);
  }

  TEST_CASE("fitness of the constant one on the box") {
    auto r = fitness(parse_expression("1"), box_preset());
    CHECK(r.valid);
    CHECK(r.residual_sse == doctest::Approx(100.0 * std::pow(pi * pi / 2, 2)).epsilon(1e-12));
    CHECK(r.norm_penalty == 0.0);
    CHECK(r.boundary_penalty == 200.0);
    CHECK(r.total == doctest::Approx(r.residual_sse + 200.0));
  }

  TEST_CASE("penalties") {
    for (const char* text : {"log(0-x)", "1/x", "1/(x-0.5)", "exp(exp(exp(x*10)))", "y"}) {
      CAPTURE(text);
      auto r = fitness(parse_expression(text), box_preset());
      CHECK_FALSE(r.valid);
      CHECK(r.total == 1e10);
      CHECK_FALSE(r.failure.empty());
    }
    ProblemSpec p = box_preset();
    p.energy = RayleighEnergy{};
    auto z = fitness(parse_expression("0"), p);
    CHECK_FALSE(z.valid);
  }

  TEST_CASE("alternative conventions") {
    ProblemSpec p = box_preset();
    p.norm_convention = NormConvention::psi_literal;
    auto r = fitness(parse_expression("1"), p);
    CHECK(r.norm_penalty == doctest::Approx(0.0));
    p = box_preset();
    p.residual_norm = ResidualNorm::absolute;
    auto a = fitness(parse_expression("1"), p);
    CHECK(a.residual_sse == doctest::Approx(100.0 * pi * pi / 2).epsilon(1e-12));
    p = box_preset();
    p.energy = RayleighEnergy{};
    auto ry = fitness(box_ground(), p);
    CHECK(ry.valid);
    CHECK(ry.energy_used == doctest::Approx(pi * pi / 2).epsilon(1e-6));
  }

  TEST_CASE("property: fast evaluator matches the reference route") {
    auto sample = testing::sample_expressions(300, 77);
    sample.push_back(box_ground());
    sample.push_back(parse_expression("x*(1-x)*BRF1(x)"));
    std::vector<ProblemSpec> problems{box_preset(), harmonic_preset()};
    ProblemSpec ray = box_preset();
    ray.energy = RayleighEnergy{};
    problems.push_back(ray);
    ProblemSpec lit = box_preset();
    lit.norm_convention = NormConvention::psi_literal;
    lit.residual_norm = ResidualNorm::absolute;
    problems.push_back(lit);
    RbfConfig rbf{0.9};
    int valid = 0;
    for (const auto& p : problems) {
      FitnessEvaluator fast(p, rbf, simd::scalar_kernels());
      for (const auto& e : sample) {
        auto a = fast(e);
        auto b = reference_fitness(e, p, rbf);
        CAPTURE(expr::print_expression(e));
        REQUIRE(a.valid == b.valid);
        if (!a.valid) {
          CHECK(a.total == b.total);
          continue;
        }
        check_close(a.total, b.total, 1e-9);
        ++valid;
        check_close(a.residual_sse, b.residual_sse, 1e-9);
        check_close(a.norm_penalty, b.norm_penalty, 1e-9);
        check_close(a.boundary_penalty, b.boundary_penalty, 1e-12);
        check_close(a.energy_used, b.energy_used, 1e-9);
      }
    }
    CHECK(valid > 100);
  }

  TEST_CASE("property: every kernel backend yields identical fitness bits") {
    auto sample = testing::sample_expressions(200, 88);
    ProblemSpec ray = box_preset();
    ray.energy = RayleighEnergy{};
    for (const auto& p : {box_preset(), ray}) {
      FitnessEvaluator ref(p, {}, simd::scalar_kernels());
      for (simd::Backend b : simd::available_backends()) {
        FitnessEvaluator other(p, {}, simd::kernels_for(b));
        auto ws = other.make_workspace();
        for (const auto& e : sample) {
          auto x = ref(e);
          auto y = other.evaluate(e, ws);
          CHECK(std::bit_cast<std::uint64_t>(x.total) == std::bit_cast<std::uint64_t>(y.total));
          CHECK(x.valid == y.valid);
        }
      }
    }
  }

  TEST_CASE("property: invalid exactly when the total is the penalty, and purity") {
    auto sample = testing::sample_expressions(300, 99);
    FitnessEvaluator ev(box_preset());
    for (const auto& e : sample) {
      auto r = ev(e);
      CHECK(r.valid == (r.total != box_preset().penalty_fitness));
      if (r.valid) CHECK(r.total < box_preset().penalty_fitness);
      auto again = ev(e);
      CHECK(std::bit_cast<std::uint64_t>(r.total) == std::bit_cast<std::uint64_t>(again.total));
    }
  }

  TEST_CASE("problem validation") {
    ProblemSpec p;
    CHECK_NOTHROW(p.validate());
    p.b = -1;
    CHECK_THROWS_AS(p.validate(), ProblemError);
    p = ProblemSpec{};
    p.quadrature_panels = 7;
    CHECK_THROWS_AS(p.validate(), ProblemError);
    p = ProblemSpec{};
    p.mass = 0;
    CHECK_THROWS_AS(p.validate(), ProblemError);
    p = ProblemSpec{};
    p.potential = Harmonic{-1.0};
    CHECK_THROWS_AS(p.validate(), ProblemError);
    p = ProblemSpec{};
    p.potential = CustomPotential{parse_expression("x*y")};
    CHECK_THROWS_AS(p.validate(), ProblemError);
    p = ProblemSpec{};
    p.potential = CustomPotential{parse_expression("1/x")};
    p.a = -1.0;
    p.collocation_count = 99;  // puts a collocation point on x = 0
    CHECK_THROWS_AS(FitnessEvaluator{p}, ProblemError);
  }

  TEST_CASE("presets") {
    auto box = preset("box");
    CHECK(box.a == 0.0);
    CHECK(box.b == 1.0);
    CHECK(std::get<FixedEnergy>(box.energy).value == pi * pi / 2);
    auto h = preset("harmonic");
    CHECK(std::get<Harmonic>(h.potential).omega == 1.0);
    CHECK(h.a == -5.0);
    auto hp = preset("harmonic-paper");
    CHECK(std::get<Harmonic>(hp.potential).omega == doctest::Approx(447.2136).epsilon(1e-7));
    CHECK(hp.b == 0.5);
    CHECK_THROWS_AS(preset("moon"), ProblemError);
  }
}

TEST_SUITE("oracle") {
  TEST_CASE("box eigenvalues match the exact discrete spectrum") {
    // The 3-point Laplacian with Dirichlet walls has eigenvalues
    // (2k/h^2)(1 - cos(n pi h)) and sine eigenvectors.
    for (int n : {10, 50, 400}) {
      const double h = 1.0 / (n + 1);
      for (int idx : {0, 1, 4}) {
        auto fd = fd_eigenpair(box_preset(), n, idx);
        const double exact = (2.0 * 0.5 / (h * h)) * (1.0 - std::cos((idx + 1) * pi * h));
        CAPTURE(n);
        CAPTURE(idx);
        CHECK(fd.energy == doctest::Approx(exact).epsilon(1e-10));
        if (idx != 0) continue;
        double norm = 0.0;
        for (std::size_t i = 0; i < fd.psi.size(); ++i) norm += fd.psi[i] * fd.psi[i] * h;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        // sum of sin^2(pi i h) over the grid is (n+1)/2, so the amplitude is sqrt(2).
        double max_err = 0.0;
        for (std::size_t i = 0; i < fd.psi.size(); ++i)
          max_err = std::max(max_err, std::abs(fd.psi[i] - std::sqrt(2.0) * std::sin(pi * fd.grid[i])));
        CHECK(max_err <= 1e-8);
      }
    }
  }

  TEST_CASE("continuum limits") {
    CHECK(std::abs(fd_ground_state(box_preset(), 2000).energy - pi * pi / 2) <= 1e-3);
    ProblemSpec h = harmonic_preset();
    h.a = -8;
    h.b = 8;
    CHECK(std::abs(fd_ground_state(h, 2000).energy - 0.5) <= 1e-3);
    CHECK(std::abs(fd_eigenpair(box_preset(), 2000, 1).energy - 2 * pi * pi) <= 1e-2);
  }

  TEST_CASE("eigenvector sign and grid") {
    auto fd = fd_ground_state(harmonic_preset(), 200);
    CHECK(fd.grid.size() == 200);
    CHECK(fd.psi[100] > 0);
    for (double v : fd.psi) CHECK(v >= -1e-12);
  }

  TEST_CASE("oracle errors") {
    CHECK_THROWS_AS(fd_ground_state(box_preset(), 5), ProblemError);
    CHECK_THROWS_AS(fd_eigenpair(box_preset(), 20, 20), ProblemError);
  }
}
