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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "qge/expr.hpp"

namespace qge::expr {

void RbfConfig::validate() const {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("rbf shape constant c must be finite and > 0");
}

std::string_view to_string(DomainErrorKind kind) {
  switch (kind) {
    case DomainErrorKind::division_by_zero: return "division by zero";
    case DomainErrorKind::log_domain: return "log of non-positive value";
    case DomainErrorKind::sqrt_domain: return "sqrt of negative value";
    case DomainErrorKind::non_finite: return "non-finite value";
    case DomainErrorKind::unbound_variable: return "unbound variable";
  }
  return "domain error";
}

std::string DomainError::message() const {
  std::string m(to_string(kind));
  if (!detail.empty()) m += ": " + detail;
  return m;
}

Expression Expression::constant(double value) {
  if (!std::isfinite(value)) throw ExpressionError("constant must be finite");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->var = v;
  return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, Expression left, Expression right) {
  if (left.empty() || right.empty()) throw ExpressionError("binary node with empty operand");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->bop = op;
  n->left = std::move(left);
  n->right = std::move(right);
  return Expression(std::move(n));
}

Expression Expression::unary(UnaryFn fn, Expression arg) {
  if (arg.empty()) throw ExpressionError("unary node with empty argument");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::unary;
  n->fn = fn;
  n->left = std::move(arg);
  return Expression(std::move(n));
}

NodeKind Expression::kind() const { return node_->kind; }
double Expression::value() const { return node_->value; }
Variable Expression::variable() const { return node_->var; }
BinaryOp Expression::binary_op() const { return node_->bop; }
UnaryFn Expression::unary_fn() const { return node_->fn; }
const Expression& Expression::left() const { return node_->left; }
const Expression& Expression::right() const { return node_->right; }
const Expression& Expression::arg() const { return node_->left; }

std::size_t Expression::size() const {
  switch (kind()) {
    case NodeKind::constant:
    case NodeKind::variable: return 1;
    case NodeKind::binary: return 1 + left().size() + right().size();
    case NodeKind::unary: return 1 + arg().size();
  }
  return 1;
}

std::size_t Expression::depth() const {
  switch (kind()) {
    case NodeKind::constant:
    case NodeKind::variable: return 1;
    case NodeKind::binary: return 1 + std::max(left().depth(), right().depth());
    case NodeKind::unary: return 1 + arg().depth();
  }
  return 1;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.empty() || b.empty()) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant:
      return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case NodeKind::variable: return a.variable() == b.variable();
    case NodeKind::binary:
      return a.binary_op() == b.binary_op() && a.left() == b.left() && a.right() == b.right();
    case NodeKind::unary: return a.unary_fn() == b.unary_fn() && a.arg() == b.arg();
  }
  return false;
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::add, a, b);
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::sub, a, b);
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::mul, a, b);
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression::binary(BinaryOp::div, a, b);
}
Expression sin(const Expression& e) { return Expression::unary(UnaryFn::sin, e); }
Expression cos(const Expression& e) { return Expression::unary(UnaryFn::cos, e); }
Expression exp(const Expression& e) { return Expression::unary(UnaryFn::exp, e); }
Expression log(const Expression& e) { return Expression::unary(UnaryFn::log, e); }
Expression sqrt(const Expression& e) { return Expression::unary(UnaryFn::sqrt, e); }

Expression rbf(int which, const Expression& e) {
  switch (which) {
    case 1: return Expression::unary(UnaryFn::rbf1, e);
    case 2: return Expression::unary(UnaryFn::rbf2, e);
    case 3: return Expression::unary(UnaryFn::rbf3, e);
    case 4: return Expression::unary(UnaryFn::rbf4, e);
    default: throw ExpressionError("rbf index must be 1..4");
  }
}

std::optional<double> Bindings::get(Variable v) const {
  switch (v) {
    case Variable::x: return x;
    case Variable::y: return y;
    case Variable::z: return z;
  }
  return std::nullopt;
}

namespace {

DomainError classify_binary(BinaryOp op, double b) {
  if (op == BinaryOp::div && b == 0.0) return {DomainErrorKind::division_by_zero, {}};
  return {DomainErrorKind::non_finite, std::string("overflow in '") + std::string(to_string(op)) + "'"};
}

DomainError classify_unary(UnaryFn fn, double a) {
  if (fn == UnaryFn::log && !(a > 0.0)) return {DomainErrorKind::log_domain, {}};
  if (fn == UnaryFn::sqrt && a < 0.0) return {DomainErrorKind::sqrt_domain, {}};
  return {DomainErrorKind::non_finite, std::string("overflow in ") + std::string(to_string(fn))};
}

Result<double> eval_node(const Expression& e, const Bindings& env, double c) {
  switch (e.kind()) {
    case NodeKind::constant: return e.value();
    case NodeKind::variable: {
      auto v = env.get(e.variable());
      if (!v) return DomainError{DomainErrorKind::unbound_variable, std::string(to_string(e.variable()))};
      if (!std::isfinite(*v)) return DomainError{DomainErrorKind::non_finite, "variable value"};
      return *v;
    }
    case NodeKind::binary: {
      auto l = eval_node(e.left(), env, c);
      if (!l) return l;
      auto r = eval_node(e.right(), env, c);
      if (!r) return r;
      double out = apply_binary(e.binary_op(), *l, *r);
      if (!std::isfinite(out)) return classify_binary(e.binary_op(), *r);
      return out;
    }
    case NodeKind::unary: {
      auto a = eval_node(e.arg(), env, c);
      if (!a) return a;
      double out = apply_unary(e.unary_fn(), *a, c);
      if (!std::isfinite(out)) return classify_unary(e.unary_fn(), *a);
      return out;
    }
  }
  return DomainError{};
}

}  // namespace

Result<double> evaluate(const Expression& e, const Bindings& env, const RbfConfig& rbf) {
  return eval_node(e, env, rbf.c);
}

}  // namespace qge::expr
