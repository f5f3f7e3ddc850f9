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

#include <cmath>
#include <optional>
#include <string_view>

namespace qge {

enum class BinaryOp : unsigned char { add, sub, mul, div };
enum class UnaryFn : unsigned char { sin, cos, exp, log, sqrt, rbf1, rbf2, rbf3, rbf4 };
enum class Variable : unsigned char { x, y, z };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryFn fn);
std::string_view to_string(Variable v);

/// Accepts the canonical names plus BRFn/RBFn spellings of the basis functions.
std::optional<UnaryFn> unary_fn_from_name(std::string_view name);

// Single definitions of every primitive. The tree evaluator and every batch
// kernel go through these (or replicate their exact operation order) so that
// all evaluation routes agree bit for bit.

inline double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
  }
  return 0.0;
}

/// Gaussian exp(-c r^2).
inline double rbf1(double r, double c) { return std::exp(-(c * (r * r))); }
/// Hardy multiquadric sqrt(c^2 + r^2).
inline double rbf2(double r, double c) { return std::sqrt(c * c + r * r); }
/// Inverse multiquadric sqrt(1 / (c^2 + r^2)).
inline double rbf3(double r, double c) { return std::sqrt(1.0 / (c * c + r * r)); }
/// Inverse quadratic 1 / (c^2 + r^2).
inline double rbf4(double r, double c) { return 1.0 / (c * c + r * r); }

inline double apply_unary(UnaryFn fn, double r, double c) {
  switch (fn) {
    case UnaryFn::sin: return std::sin(r);
    case UnaryFn::cos: return std::cos(r);
    case UnaryFn::exp: return std::exp(r);
    case UnaryFn::log: return std::log(r);
    case UnaryFn::sqrt: return std::sqrt(r);
    case UnaryFn::rbf1: return rbf1(r, c);
    case UnaryFn::rbf2: return rbf2(r, c);
    case UnaryFn::rbf3: return rbf3(r, c);
    case UnaryFn::rbf4: return rbf4(r, c);
  }
  return 0.0;
}

}  // namespace qge
