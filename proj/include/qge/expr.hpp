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

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "qge/ops.hpp"

namespace qge::expr {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape constant shared by the four radial basis functions.
struct RbfConfig {
  double c = 1.0;

  /// Throws std::invalid_argument unless c is finite and positive.
  void validate() const;
};

enum class DomainErrorKind {
  division_by_zero,
  log_domain,
  sqrt_domain,
  non_finite,
  unbound_variable,
};

std::string_view to_string(DomainErrorKind kind);

struct DomainError {
  DomainErrorKind kind = DomainErrorKind::non_finite;
  std::string detail;

  std::string message() const;
};

/// Value-or-DomainError. Domain failures are ordinary outcomes during a
/// search, so they travel as values rather than exceptions.
template <class T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(DomainError error) : v_(std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!ok()) throw std::logic_error("Result::value on error: " + error().message());
    return std::get<0>(v_);
  }
  const T& operator*() const { return value(); }
  const DomainError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, DomainError> v_;
};

enum class NodeKind : unsigned char { constant, variable, binary, unary };

struct Node;

/// Immutable expression tree. Copies share structure.
class Expression {
 public:
  /// An empty handle; only meaningful as an assignment target.
  Expression() = default;
  bool empty() const { return node_ == nullptr; }

  static Expression constant(double value);
  static Expression variable(Variable v);
  static Expression binary(BinaryOp op, Expression left, Expression right);
  static Expression unary(UnaryFn fn, Expression arg);

  NodeKind kind() const;
  double value() const;  ///< constant only
  Variable variable() const;  ///< variable only
  BinaryOp binary_op() const;  ///< binary only
  UnaryFn unary_fn() const;  ///< unary only
  const Expression& left() const;  ///< binary only
  const Expression& right() const;  ///< binary only
  const Expression& arg() const;  ///< unary only

  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Node count when viewed as a tree (shared subtrees counted repeatedly).
  std::size_t size() const;
  std::size_t depth() const;

  /// Identity of the underlying node; stable for the lifetime of any copy.
  const void* id() const { return node_.get(); }

  /// Structural equality. Constants compare by bit pattern.
  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  Variable var = Variable::x;
  BinaryOp bop = BinaryOp::add;
  UnaryFn fn = UnaryFn::sin;
  Expression left;
  Expression right;
};

// Builders, mostly for tests and presets.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
inline Expression operator+(double a, const Expression& b) { return Expression::constant(a) + b; }
inline Expression operator-(double a, const Expression& b) { return Expression::constant(a) - b; }
inline Expression operator*(double a, const Expression& b) { return Expression::constant(a) * b; }
inline Expression operator/(double a, const Expression& b) { return Expression::constant(a) / b; }
inline Expression operator+(const Expression& a, double b) { return a + Expression::constant(b); }
inline Expression operator-(const Expression& a, double b) { return a - Expression::constant(b); }
inline Expression operator*(const Expression& a, double b) { return a * Expression::constant(b); }
inline Expression operator/(const Expression& a, double b) { return a / Expression::constant(b); }
Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression exp(const Expression& e);
Expression log(const Expression& e);
Expression sqrt(const Expression& e);
Expression rbf(int which, const Expression& e);
inline Expression var_x() { return Expression::variable(Variable::x); }

/// Variable bindings for scalar evaluation.
struct Bindings {
  std::optional<double> x, y, z;

  std::optional<double> get(Variable v) const;
};

/// Evaluates at one point. Any non-finite intermediate is a DomainError.
Result<double> evaluate(const Expression& e, const Bindings& env, const RbfConfig& rbf = {});
inline Result<double> evaluate_at(const Expression& e, double x, const RbfConfig& rbf = {}) {
  return evaluate(e, Bindings{x, std::nullopt, std::nullopt}, rbf);
}

/// Exact symbolic derivative, constant-folded.
Expression differentiate(const Expression& e, Variable v = Variable::x);

/// Value-preserving simplification: constant folding plus the identities
/// e+0, 0+e, e-0, e*1, 1*e, e/1 -> e and e*0, 0*e -> 0. Radial basis
/// functions are never folded since their value depends on RbfConfig.
Expression simplify(const Expression& e);

/// Parses the infix language produced by the builtin grammar: + - * / with
/// the usual precedence (left associative), parentheses, fn(arg), decimal
/// literals and a prefix minus. BRFn and RBFn both name radial basis
/// function n. Throws ExpressionError.
Expression parse_expression(std::string_view text);

/// Minimal-parenthesis infix text; parse_expression inverts it structurally.
std::string print_expression(const Expression& e);

}  // namespace qge::expr
