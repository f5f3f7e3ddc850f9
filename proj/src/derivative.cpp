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

#include <cmath>
#include <unordered_map>

#include "qge/expr.hpp"

namespace qge::expr {
namespace {

bool is_rbf(UnaryFn fn) {
  return fn == UnaryFn::rbf1 || fn == UnaryFn::rbf2 || fn == UnaryFn::rbf3 ||
         fn == UnaryFn::rbf4;
}

// Node constructors applying the local simplification rules. Both simplify()
// and differentiate() build through these.
Expression make_binary(BinaryOp op, const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) {
    double v = apply_binary(op, a.value(), b.value());
    if (std::isfinite(v)) return Expression::constant(v);
    return Expression::binary(op, a, b);
  }
  switch (op) {
    case BinaryOp::add:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      break;
    case BinaryOp::sub:
      if (b.is_constant(0.0)) return a;
      break;
    case BinaryOp::mul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
      if (a.is_constant(1.0)) return b;
      if (b.is_constant(1.0)) return a;
      break;
    case BinaryOp::div:
      if (b.is_constant(1.0)) return a;
      break;
  }
  return Expression::binary(op, a, b);
}

Expression make_unary(UnaryFn fn, const Expression& a) {
  if (a.is_constant() && !is_rbf(fn)) {
    double v = apply_unary(fn, a.value(), 1.0);
    if (std::isfinite(v)) return Expression::constant(v);
  }
  return Expression::unary(fn, a);
}

Expression add(const Expression& a, const Expression& b) { return make_binary(BinaryOp::add, a, b); }
Expression sub(const Expression& a, const Expression& b) { return make_binary(BinaryOp::sub, a, b); }
Expression mul(const Expression& a, const Expression& b) { return make_binary(BinaryOp::mul, a, b); }
Expression div(const Expression& a, const Expression& b) { return make_binary(BinaryOp::div, a, b); }
Expression num(double v) { return Expression::constant(v); }

// Memoized on node identity so shared subtrees are visited once.
class Differentiator {
 public:
  explicit Differentiator(Variable v) : var_(v) {}

  Expression operator()(const Expression& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expression d = derive(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expression derive(const Expression& e) {
    switch (e.kind()) {
      case NodeKind::constant: return num(0.0);
      case NodeKind::variable: return num(e.variable() == var_ ? 1.0 : 0.0);
      case NodeKind::binary: return derive_binary(e);
      case NodeKind::unary: return derive_unary(e);
    }
    return num(0.0);
  }

  Expression derive_binary(const Expression& e) {
    const Expression& u = e.left();
    const Expression& v = e.right();
    Expression du = (*this)(u);
    Expression dv = (*this)(v);
    switch (e.binary_op()) {
      case BinaryOp::add: return add(du, dv);
      case BinaryOp::sub: return sub(du, dv);
      case BinaryOp::mul: return add(mul(du, v), mul(u, dv));
      case BinaryOp::div: return div(sub(mul(du, v), mul(u, dv)), mul(v, v));
    }
    return num(0.0);
  }

  Expression derive_unary(const Expression& e) {
    const Expression& u = e.arg();
    Expression du = (*this)(u);
    if (du.is_constant(0.0)) return num(0.0);
    Expression outer;
    switch (e.unary_fn()) {
      case UnaryFn::sin: outer = make_unary(UnaryFn::cos, u); break;
      case UnaryFn::cos: outer = mul(num(-1.0), make_unary(UnaryFn::sin, u)); break;
      case UnaryFn::exp: outer = e; break;
      case UnaryFn::log: return div(du, u);
      case UnaryFn::sqrt: return div(du, mul(num(2.0), e));
      case UnaryFn::rbf1:
        // d/du exp(-c u^2) = -2 c u exp(-c u^2); rbf2(0) == sqrt(c^2) == c.
        outer = mul(mul(mul(num(-2.0), Expression::unary(UnaryFn::rbf2, num(0.0))), u), e);
        break;
      case UnaryFn::rbf2:
        // d/du sqrt(c^2 + u^2) = u / sqrt(c^2 + u^2)
        outer = div(u, e);
        break;
      case UnaryFn::rbf3:
        // d/du (c^2 + u^2)^(-1/2) = -u (c^2 + u^2)^(-3/2)
        outer = mul(mul(mul(num(-1.0), u), e), mul(e, e));
        break;
      case UnaryFn::rbf4:
        // d/du (c^2 + u^2)^(-1) = -2u (c^2 + u^2)^(-2)
        outer = mul(mul(num(-2.0), u), mul(e, e));
        break;
    }
    return mul(outer, du);
  }

  Variable var_;
  std::unordered_map<const void*, Expression> memo_;
};

class Simplifier {
 public:
  Expression operator()(const Expression& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expression s = rebuild(e);
    memo_.emplace(e.id(), s);
    return s;
  }

 private:
  Expression rebuild(const Expression& e) {
    switch (e.kind()) {
      case NodeKind::constant:
      case NodeKind::variable: return e;
      case NodeKind::binary: {
        Expression l = (*this)(e.left());
        Expression r = (*this)(e.right());
        if (l.id() == e.left().id() && r.id() == e.right().id()) {
          Expression folded = make_binary(e.binary_op(), l, r);
          return folded.kind() == NodeKind::binary && folded.left().id() == l.id() &&
                         folded.right().id() == r.id()
                     ? e
                     : folded;
        }
        return make_binary(e.binary_op(), l, r);
      }
      case NodeKind::unary: {
        Expression a = (*this)(e.arg());
        Expression folded = make_unary(e.unary_fn(), a);
        if (folded.kind() == NodeKind::unary && a.id() == e.arg().id()) return e;
        return folded;
      }
    }
    return e;
  }

  std::unordered_map<const void*, Expression> memo_;
};

}  // namespace

Expression differentiate(const Expression& e, Variable v) {
  return Differentiator(v)(e);
}

Expression simplify(const Expression& e) { return Simplifier()(e); }

}  // namespace qge::expr
