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

#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qge/expr.hpp"
#include "qge/program.hpp"
#include "qge/simd.hpp"

namespace qge::quantum {

using expr::DomainError;
using expr::Expression;
using expr::RbfConfig;
using expr::Result;

class ProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// V = 0 on [a, b]; the walls enter through Dirichlet conditions.
struct InfiniteWell {};
/// V(x) = omega^2 x^2 / 2.
struct Harmonic {
  double omega = 1.0;
};
/// V given as an expression in x.
struct CustomPotential {
  Expression v;
};
using PotentialSpec = std::variant<InfiniteWell, Harmonic, CustomPotential>;

struct FixedEnergy {
  double value = 0.0;
};
/// Energy estimated per candidate as the Rayleigh quotient.
struct RayleighEnergy {};
using EnergyMode = std::variant<FixedEnergy, RayleighEnergy>;

enum class NormConvention {
  psi_squared,  ///< integral of psi^2 should be 1
  psi_literal,  ///< integral of psi should be 1
};

enum class ResidualNorm { squared, absolute };

struct ProblemSpec {
  double a = 0.0;
  double b = 1.0;
  PotentialSpec potential = InfiniteWell{};
  EnergyMode energy = FixedEnergy{std::numbers::pi * std::numbers::pi / 2.0};
  double hbar = 1.0;
  double mass = 1.0;
  int collocation_count = 100;
  double lambda_norm = 100.0;
  double mu_boundary = 100.0;
  double penalty_fitness = 1e10;
  NormConvention norm_convention = NormConvention::psi_squared;
  ResidualNorm residual_norm = ResidualNorm::squared;
  int quadrature_panels = 1000;

  /// Throws ProblemError naming the offending field.
  void validate() const;

  /// hbar^2 / 2m
  double kinetic_coefficient() const { return hbar * hbar / (2.0 * mass); }
  bool has_walls() const { return std::holds_alternative<InfiniteWell>(potential); }
};

/// Infinite well on [0, 1] with E = pi^2 / 2.
ProblemSpec box_preset();
/// Oscillator with omega = 1 on [-5, 5], E = 1/2.
ProblemSpec harmonic_preset();
/// Oscillator with omega = sqrt(20) * 100 on [-0.5, 0.5], E = omega / 2.
ProblemSpec harmonic_paper_preset();
/// "box", "harmonic" or "harmonic-paper"; throws ProblemError otherwise.
ProblemSpec preset(std::string_view name);

struct FitnessReport {
  double residual_sse = 0.0;
  double norm_penalty = 0.0;
  double boundary_penalty = 0.0;
  double total = 0.0;
  double energy_used = 0.0;
  bool valid = false;
  std::string failure;  ///< why the candidate was penalized, when invalid
};

/// T interior points a + j (b - a) / (T + 1), j = 1..T.
std::vector<double> collocation_points(double a, double b, int count);

/// V(x); DomainError when a custom potential fails at x.
Result<double> potential_at(const ProblemSpec& p, double x);

/// -(hbar^2 / 2m) psi''(x) + V(x) psi(x), with psi'' obtained symbolically.
Result<double> apply_hamiltonian(const Expression& psi, const ProblemSpec& p, double x,
                                 const RbfConfig& rbf = {});

/// H psi(x) - E psi(x).
Result<double> residual(const Expression& psi, const ProblemSpec& p, double energy, double x,
                        const RbfConfig& rbf = {});

using PointFunction = std::function<Result<double>(double)>;

/// Composite Simpson rule with `panels` (even, >= 2) subintervals.
Result<double> quadrature(const PointFunction& f, double a, double b, int panels = 1000);

/// <psi|H|psi> / <psi|psi> by quadrature over [a, b].
Result<double> rayleigh_energy(const Expression& psi, const ProblemSpec& p,
                               const RbfConfig& rbf = {});

/// Scores trial wavefunctions for one problem. Holds the collocation grid,
/// quadrature nodes and potential samples; evaluation runs on the batch
/// kernels. Thread-compatible: use one Workspace per thread.
class FitnessEvaluator {
 public:
  struct Workspace {
    explicit Workspace(const simd::KernelTable& k) : batch(k) {}
    expr::BatchEvaluator batch;
    std::vector<double> psi, d2psi, quad_psi, quad_d2psi, resid, hpsi;
  };

  FitnessEvaluator(ProblemSpec problem, RbfConfig rbf = {},
                   const simd::KernelTable& kernels = simd::active_kernels());

  FitnessReport evaluate(const Expression& psi, Workspace& ws) const;
  FitnessReport operator()(const Expression& psi) const;
  FitnessReport penalty(std::string why) const;

  Workspace make_workspace() const { return Workspace(*kernels_); }
  const ProblemSpec& problem() const { return problem_; }
  const RbfConfig& rbf() const { return rbf_; }
  const simd::KernelTable& kernels() const { return *kernels_; }

 private:
  ProblemSpec problem_;
  RbfConfig rbf_;
  const simd::KernelTable* kernels_;
  std::vector<double> colloc_x_, colloc_v_;
  std::vector<double> quad_x_, quad_v_, quad_w_;
};

/// One-shot convenience over FitnessEvaluator.
FitnessReport fitness(const Expression& psi, const ProblemSpec& p, const RbfConfig& rbf = {});

struct FdEigenpair {
  double energy = 0.0;
  std::vector<double> grid;  ///< interior x values
  std::vector<double> psi;  ///< normalized so that sum(psi^2) h == 1
};

/// Finite-difference reference: the `index`-th smallest eigenpair (0 =
/// ground state) of the 3-point discretization on `n` interior points with
/// Dirichlet walls at a and b. Eigenvalue by Sturm-sequence bisection,
/// eigenvector by inverse iteration. Throws ProblemError for n < 10 or an
/// unusable potential, std::runtime_error on non-convergence.
FdEigenpair fd_eigenpair(const ProblemSpec& p, int n, int index = 0);
inline FdEigenpair fd_ground_state(const ProblemSpec& p, int n) { return fd_eigenpair(p, n, 0); }

}  // namespace qge::quantum
