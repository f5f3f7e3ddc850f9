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

#include "qge/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qge::quantum {

namespace {

bool finite(double v) { return std::isfinite(v); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ProblemError(what);
}

// Below this the Rayleigh quotient is not meaningful.
constexpr double kMinNorm = 1e-12;

}  // namespace

void ProblemSpec::validate() const {
  require(finite(a) && finite(b), "domain bounds must be finite");
  require(a < b, "domain requires a < b");
  require(finite(hbar) && hbar > 0.0, "hbar must be > 0");
  require(finite(mass) && mass > 0.0, "mass must be > 0");
  require(collocation_count >= 2, "collocation_count must be >= 2");
  require(finite(lambda_norm) && lambda_norm >= 0.0, "lambda_norm must be >= 0");
  require(finite(mu_boundary) && mu_boundary >= 0.0, "mu_boundary must be >= 0");
  require(finite(penalty_fitness) && penalty_fitness > 0.0, "penalty_fitness must be > 0");
  require(quadrature_panels >= 2 && quadrature_panels % 2 == 0,
          "quadrature_panels must be even and >= 2");
  if (auto* h = std::get_if<Harmonic>(&potential))
    require(finite(h->omega) && h->omega > 0.0, "omega must be > 0");
  if (auto* c = std::get_if<CustomPotential>(&potential)) {
    require(!c->v.empty(), "custom potential is empty");
    Expression roots[] = {c->v};
    auto prog = expr::Program::compile(roots);
    require(!prog.uses(Variable::y) && !prog.uses(Variable::z),
            "custom potential may only depend on x");
  }
  if (auto* e = std::get_if<FixedEnergy>(&energy)) require(finite(e->value), "energy must be finite");
}

ProblemSpec box_preset() { return ProblemSpec{}; }

ProblemSpec harmonic_preset() {
  ProblemSpec p;
  p.a = -5.0;
  p.b = 5.0;
  p.potential = Harmonic{1.0};
  p.energy = FixedEnergy{0.5};
  return p;
}

ProblemSpec harmonic_paper_preset() {
  ProblemSpec p;
  const double omega = std::sqrt(20.0) * 1e2;
  p.a = -0.5;
  p.b = 0.5;
  p.potential = Harmonic{omega};
  p.energy = FixedEnergy{omega / 2.0};
  return p;
}

ProblemSpec preset(std::string_view name) {
  if (name == "box") return box_preset();
  if (name == "harmonic") return harmonic_preset();
  if (name == "harmonic-paper") return harmonic_paper_preset();
  throw ProblemError("unknown problem preset '" + std::string(name) +
                     "' (expected box, harmonic or harmonic-paper)");
}

std::vector<double> collocation_points(double a, double b, int count) {
  require(finite(a) && finite(b) && a < b, "collocation requires a < b");
  require(count >= 1, "collocation requires at least one point");
  std::vector<double> xs(static_cast<std::size_t>(count));
  const double denom = static_cast<double>(count) + 1.0;
  for (int j = 1; j <= count; ++j) xs[static_cast<std::size_t>(j - 1)] = a + j * (b - a) / denom;
  return xs;
}

Result<double> potential_at(const ProblemSpec& p, double x) {
  return std::visit(
      [x](const auto& v) -> Result<double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, InfiniteWell>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Harmonic>) {
          return 0.5 * v.omega * v.omega * x * x;
        } else {
          return expr::evaluate_at(v.v, x);
        }
      },
      p.potential);
}

namespace {

Result<double> hamiltonian_with(const Expression& psi, const Expression& d2, const ProblemSpec& p,
                                double x, const RbfConfig& rbf) {
  auto v = potential_at(p, x);
  if (!v) return v;
  auto f = expr::evaluate_at(psi, x, rbf);
  if (!f) return f;
  auto f2 = expr::evaluate_at(d2, x, rbf);
  if (!f2) return f2;
  const double neg_kinetic = -p.kinetic_coefficient();
  double h = neg_kinetic * *f2 + *v * *f;
  if (!finite(h)) return DomainError{expr::DomainErrorKind::non_finite, "H psi"};
  return h;
}

void require_interior(const ProblemSpec& p, double x) {
  require(x > p.a && x < p.b, "x must lie strictly inside (a, b)");
}

}  // namespace

Result<double> apply_hamiltonian(const Expression& psi, const ProblemSpec& p, double x,
                                 const RbfConfig& rbf) {
  require_interior(p, x);
  Expression d2 = expr::differentiate(expr::differentiate(psi));
  return hamiltonian_with(psi, d2, p, x, rbf);
}

Result<double> residual(const Expression& psi, const ProblemSpec& p, double energy, double x,
                        const RbfConfig& rbf) {
  require_interior(p, x);
  Expression d2 = expr::differentiate(expr::differentiate(psi));
  auto h = hamiltonian_with(psi, d2, p, x, rbf);
  if (!h) return h;
  double f = *expr::evaluate_at(psi, x, rbf);
  return *h - energy * f;
}

Result<double> quadrature(const PointFunction& f, double a, double b, int panels) {
  require(finite(a) && finite(b) && a < b, "quadrature requires a < b");
  require(panels >= 2 && panels % 2 == 0, "quadrature requires an even panel count >= 2");
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double x = (i == panels) ? b : a + i * h;
    auto v = f(x);
    if (!v) return v;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * *v;
  }
  return sum * (b - a) / (3.0 * panels);
}

Result<double> rayleigh_energy(const Expression& psi, const ProblemSpec& p, const RbfConfig& rbf) {
  p.validate();
  Expression d2 = expr::differentiate(expr::differentiate(psi));
  auto num = quadrature(
      [&](double x) -> Result<double> {
        auto h = hamiltonian_with(psi, d2, p, x, rbf);
        if (!h) return h;
        return *expr::evaluate_at(psi, x, rbf) * *h;
      },
      p.a, p.b, p.quadrature_panels);
  if (!num) return num;
  auto den = quadrature(
      [&](double x) -> Result<double> {
        auto f = expr::evaluate_at(psi, x, rbf);
        if (!f) return f;
        return *f * *f;
      },
      p.a, p.b, p.quadrature_panels);
  if (!den) return den;
  if (!(*den > kMinNorm))
    return DomainError{expr::DomainErrorKind::non_finite, "near-zero norm in Rayleigh quotient"};
  return *num / *den;
}

FitnessEvaluator::FitnessEvaluator(ProblemSpec problem, RbfConfig rbf,
                                   const simd::KernelTable& kernels)
    : problem_(std::move(problem)), rbf_(rbf), kernels_(&kernels) {
  problem_.validate();
  rbf_.validate();
  colloc_x_ = collocation_points(problem_.a, problem_.b, problem_.collocation_count);
  for (double x : colloc_x_) {
    auto v = potential_at(problem_, x);
    require(v.ok(), "potential is not finite at collocation point x = " + std::to_string(x));
    colloc_v_.push_back(*v);
  }
  const int n = problem_.quadrature_panels;
  const double h = (problem_.b - problem_.a) / n;
  const bool rayleigh = std::holds_alternative<RayleighEnergy>(problem_.energy);
  for (int i = 0; i <= n; ++i) {
    const double x = (i == n) ? problem_.b : problem_.a + i * h;
    quad_x_.push_back(x);
    quad_w_.push_back((i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
    if (rayleigh) {
      auto v = potential_at(problem_, x);
      require(v.ok(), "potential is not finite at quadrature node x = " + std::to_string(x));
      quad_v_.push_back(*v);
    }
  }
}

FitnessReport FitnessEvaluator::penalty(std::string why) const {
  FitnessReport r;
  r.valid = false;
  r.total = problem_.penalty_fitness;
  r.failure = std::move(why);
  return r;
}

FitnessReport FitnessEvaluator::operator()(const Expression& psi) const {
  Workspace ws(*kernels_);
  return evaluate(psi, ws);
}

FitnessReport FitnessEvaluator::evaluate(const Expression& psi, Workspace& ws) const {
  const auto& k = *kernels_;
  const auto& p = problem_;
  const bool rayleigh = std::holds_alternative<RayleighEnergy>(p.energy);
  const std::size_t nc = colloc_x_.size();
  const std::size_t nq = quad_x_.size();

  Expression d2 = expr::differentiate(expr::differentiate(psi));
  Expression both[] = {psi, d2};
  const auto prog_both = expr::Program::compile(both);

  ws.psi.resize(nc);
  ws.d2psi.resize(nc);
  ws.resid.resize(nc);
  std::span<double> colloc_out[] = {ws.psi, ws.d2psi};
  if (auto fail = ws.batch.run(prog_both, colloc_x_, rbf_, colloc_out))
    return penalty("collocation x = " + std::to_string(colloc_x_[fail->point]) + ": " +
                   fail->error.message());

  ws.quad_psi.resize(nq);
  if (rayleigh) {
    ws.quad_d2psi.resize(nq);
    std::span<double> quad_out[] = {ws.quad_psi, ws.quad_d2psi};
    if (auto fail = ws.batch.run(prog_both, quad_x_, rbf_, quad_out))
      return penalty("quadrature x = " + std::to_string(quad_x_[fail->point]) + ": " +
                     fail->error.message());
  } else {
    Expression only[] = {psi};
    const auto prog_psi = expr::Program::compile(only);
    std::span<double> quad_out[] = {ws.quad_psi};
    if (auto fail = ws.batch.run(prog_psi, quad_x_, rbf_, quad_out))
      return penalty("quadrature x = " + std::to_string(quad_x_[fail->point]) + ": " +
                     fail->error.message());
  }

  const double width = p.b - p.a;
  const double panels3 = 3.0 * static_cast<double>(p.quadrature_panels);
  const double norm_sq =
      k.weighted_dot(quad_w_.data(), ws.quad_psi.data(), ws.quad_psi.data(), nq) * width / panels3;
  const double neg_kinetic = -p.kinetic_coefficient();

  double energy = 0.0;
  if (rayleigh) {
    ws.hpsi.resize(nq);
    k.residual(ws.hpsi.data(), ws.quad_psi.data(), ws.quad_d2psi.data(), quad_v_.data(),
               neg_kinetic, 0.0, nq);
    const double num =
        k.weighted_dot(quad_w_.data(), ws.quad_psi.data(), ws.hpsi.data(), nq) * width / panels3;
    if (!finite(norm_sq) || !(norm_sq > kMinNorm)) return penalty("near-zero norm");
    energy = num / norm_sq;
    if (!finite(energy)) return penalty("non-finite Rayleigh quotient");
  } else {
    energy = std::get<FixedEnergy>(p.energy).value;
  }

  k.residual(ws.resid.data(), ws.psi.data(), ws.d2psi.data(), colloc_v_.data(), neg_kinetic,
             energy, nc);

  FitnessReport r;
  r.energy_used = energy;
  r.residual_sse = p.residual_norm == ResidualNorm::squared ? k.sum_squares(ws.resid.data(), nc)
                                                            : k.sum_abs(ws.resid.data(), nc);
  double q = norm_sq;
  if (p.norm_convention == NormConvention::psi_literal) {
    // weights * psi * 1
    ws.hpsi.assign(nq, 1.0);
    q = k.weighted_dot(quad_w_.data(), ws.quad_psi.data(), ws.hpsi.data(), nq) * width / panels3;
  }
  r.norm_penalty = p.lambda_norm * (q - 1.0) * (q - 1.0);
  if (p.has_walls()) {
    const double lo = ws.quad_psi.front();
    const double hi = ws.quad_psi.back();
    r.boundary_penalty = p.mu_boundary * (lo * lo + hi * hi);
  }
  r.total = r.residual_sse + r.norm_penalty + r.boundary_penalty;
  if (!finite(r.total)) return penalty("non-finite fitness total");
  // Penalized candidates must rank strictly behind every valid one.
  if (r.total >= p.penalty_fitness) return penalty("fitness total reaches the penalty ceiling");
  r.valid = true;
  return r;
}

FitnessReport fitness(const Expression& psi, const ProblemSpec& p, const RbfConfig& rbf) {
  return FitnessEvaluator(p, rbf)(psi);
}

namespace {

// LU factorization with partial pivoting of a tridiagonal matrix, then solve.
// dl: sub-diagonal, d: diagonal, du: super-diagonal (all modified in place).
struct TridiagonalLu {
  std::vector<double> dl, d, du, du2;
  std::vector<bool> swapped;

  TridiagonalLu(std::vector<double> sub, std::vector<double> diag, std::vector<double> super,
                double tiny)
      : dl(std::move(sub)), d(std::move(diag)), du(std::move(super)) {
    const std::size_t n = d.size();
    du2.assign(n, 0.0);
    swapped.assign(n, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

// Number of eigenvalues of the symmetric tridiagonal matrix below lambda.
std::size_t sturm_count(const std::vector<double>& diag, double off_sq, double lambda,
                        double tiny) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    q = diag[i] - lambda - (i ? off_sq / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

FdEigenpair fd_eigenpair(const ProblemSpec& p, int n, int index) {
  p.validate();
  require(n >= 10, "finite-difference grid needs at least 10 interior points");
  require(index >= 0 && index < n, "eigenpair index out of range");

  const auto un = static_cast<std::size_t>(n);
  const double h = (p.b - p.a) / (n + 1);
  const double k = p.kinetic_coefficient();
  const double off = -k / (h * h);

  FdEigenpair out;
  out.grid.resize(un);
  std::vector<double> diag(un);
  for (std::size_t i = 0; i < un; ++i) {
    const double x = p.a + static_cast<double>(i + 1) * h;
    auto v = potential_at(p, x);
    require(v.ok(), "potential is not finite at grid point x = " + std::to_string(x));
    out.grid[i] = x;
    diag[i] = 2.0 * k / (h * h) + *v;
  }

  double lo = diag[0], hi = diag[0];
  for (double d : diag) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  lo -= 2.0 * std::abs(off);
  hi += 2.0 * std::abs(off);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  const double off_sq = off * off;
  const auto target = static_cast<std::size_t>(index);

  bool converged = false;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * scale) {
      converged = true;
      break;
    }
    if (sturm_count(diag, off_sq, mid, tiny) > target)
      hi = mid;
    else
      lo = mid;
  }
  if (!converged) throw std::runtime_error("eigenvalue bisection did not converge");
  out.energy = 0.5 * (lo + hi);

  std::vector<double> shifted(diag);
  for (double& d : shifted) d -= out.energy;
  const TridiagonalLu lu(std::vector<double>(un - 1, off), shifted,
                         std::vector<double>(un - 1, off),
                         std::numeric_limits<double>::epsilon() * scale);
  std::vector<double> v(un);
  // Deterministic start vector with components along every eigenvector.
  for (std::size_t i = 0; i < un; ++i) v[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i + 1));
  for (int it = 0; it < 4; ++it) {
    lu.solve(v);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!std::isfinite(norm) || norm == 0.0)
      throw std::runtime_error("inverse iteration did not converge");
    for (double& x : v) x /= norm;
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < un; ++i)
    if (std::abs(v[i]) > std::abs(v[peak])) peak = i;
  const double sign = v[peak] < 0.0 ? -1.0 : 1.0;
  double sum_sq = 0.0;
  for (double x : v) sum_sq += x * x;
  const double norm = std::sqrt(sum_sq * h);
  out.psi.resize(un);
  for (std::size_t i = 0; i < un; ++i) out.psi[i] = sign * v[i] / norm;
  return out;
}

}  // namespace qge::quantum
