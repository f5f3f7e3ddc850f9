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

#include "qge/ops.hpp"

#include <array>
#include <utility>

namespace qge {

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
  }
  return "?";
}

std::string_view to_string(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::sin: return "sin";
    case UnaryFn::cos: return "cos";
    case UnaryFn::exp: return "exp";
    case UnaryFn::log: return "log";
    case UnaryFn::sqrt: return "sqrt";
    case UnaryFn::rbf1: return "rbf1";
    case UnaryFn::rbf2: return "rbf2";
    case UnaryFn::rbf3: return "rbf3";
    case UnaryFn::rbf4: return "rbf4";
  }
  return "?";
}

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::x: return "x";
    case Variable::y: return "y";
    case Variable::z: return "z";
  }
  return "?";
}

std::optional<UnaryFn> unary_fn_from_name(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, UnaryFn>, 21> kNames{{
      {"sin", UnaryFn::sin},   {"cos", UnaryFn::cos},   {"exp", UnaryFn::exp},
      {"log", UnaryFn::log},   {"sqrt", UnaryFn::sqrt}, {"rbf1", UnaryFn::rbf1},
      {"rbf2", UnaryFn::rbf2}, {"rbf3", UnaryFn::rbf3}, {"rbf4", UnaryFn::rbf4},
      {"RBF1", UnaryFn::rbf1}, {"RBF2", UnaryFn::rbf2}, {"RBF3", UnaryFn::rbf3},
      {"RBF4", UnaryFn::rbf4}, {"BRF1", UnaryFn::rbf1}, {"BRF2", UnaryFn::rbf2},
      {"BRF3", UnaryFn::rbf3}, {"BRF4", UnaryFn::rbf4}, {"brf1", UnaryFn::rbf1},
      {"brf2", UnaryFn::rbf2}, {"brf3", UnaryFn::rbf3}, {"brf4", UnaryFn::rbf4},
  }};
  for (const auto& [n, fn] : kNames)
    if (n == name) return fn;
  return std::nullopt;
}

}  // namespace qge
