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

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "qge/expr.hpp"

namespace qge::expr {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expression parse() {
    Expression e = expression();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool at_number() {
    skip_space();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }

  Expression expression() {
    Expression lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = Expression::binary(BinaryOp::add, lhs, term());
      else if (accept('-'))
        lhs = Expression::binary(BinaryOp::sub, lhs, term());
      else
        return lhs;
    }
  }

  Expression term() {
    Expression lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = Expression::binary(BinaryOp::mul, lhs, factor());
      else if (accept('/'))
        lhs = Expression::binary(BinaryOp::div, lhs, factor());
      else
        return lhs;
    }
  }

  Expression factor() {
    if (accept('-')) {
      if (at_number()) return Expression::constant(-number());
      return Expression::binary(BinaryOp::sub, Expression::constant(0.0), factor());
    }
    return primary();
  }

  double number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc::result_out_of_range) fail("numeric literal out of range");
    if (ec != std::errc() || ptr == begin) fail("malformed numeric literal");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  Expression primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (accept('(')) {
      Expression inner = expression();
      expect(')');
      return inner;
    }
    if (at_number()) return Expression::constant(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t begin = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string_view name = s_.substr(begin, pos_ - begin);
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        auto fn = unary_fn_from_name(name);
        if (!fn) fail("unknown function '" + std::string(name) + "'");
        expect('(');
        Expression arg = expression();
        expect(')');
        return Expression::unary(*fn, arg);
      }
      if (name == "x") return Expression::variable(Variable::x);
      if (name == "y") return Expression::variable(Variable::y);
      if (name == "z") return Expression::variable(Variable::z);
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int precedence(const Expression& e) {
  if (e.kind() == NodeKind::binary) {
    auto op = e.binary_op();
    return (op == BinaryOp::add || op == BinaryOp::sub) ? 1 : 2;
  }
  return 3;
}

void print_to(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::constant: {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.value());
      (void)ec;
      std::string_view text(buf, static_cast<std::size_t>(ptr - buf));
      if (std::signbit(e.value())) {
        out += '(';
        out += text;
        out += ')';
      } else {
        out += text;
      }
      return;
    }
    case NodeKind::variable: out += to_string(e.variable()); return;
    case NodeKind::unary:
      out += to_string(e.unary_fn());
      out += '(';
      print_to(e.arg(), out);
      out += ')';
      return;
    case NodeKind::binary: {
      int p = precedence(e);
      bool wrap_left = precedence(e.left()) < p;
      bool wrap_right = precedence(e.right()) <= p;
      if (wrap_left) out += '(';
      print_to(e.left(), out);
      if (wrap_left) out += ')';
      out += to_string(e.binary_op());
      if (wrap_right) out += '(';
      print_to(e.right(), out);
      if (wrap_right) out += ')';
      return;
    }
  }
}

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string print_expression(const Expression& e) {
  std::string out;
  print_to(e, out);
  return out;
}

}  // namespace qge::expr
