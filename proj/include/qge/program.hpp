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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qge/expr.hpp"
#include "qge/simd.hpp"

namespace qge::expr {

/// One tape instruction. Registers are reused once their value is dead.
struct Instruction {
  NodeKind kind = NodeKind::constant;
  BinaryOp bop = BinaryOp::add;
  UnaryFn fn = UnaryFn::sin;
  Variable var = Variable::x;
  std::uint32_t dst = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double value = 0.0;
};

/// Straight-line program computing one or more expressions. Common
/// subexpressions (structurally equal subtrees) are computed once.
class Program {
 public:
  static Program compile(std::span<const Expression> roots);

  std::span<const Instruction> code() const { return code_; }
  /// Register holding the value of each root after execution.
  std::span<const std::uint32_t> outputs() const { return outputs_; }
  std::size_t register_count() const { return registers_; }
  bool uses(Variable v) const;

 private:
  std::vector<Instruction> code_;
  std::vector<std::uint32_t> outputs_;
  std::size_t registers_ = 0;
  unsigned variables_mask_ = 0;
};

struct BatchFailure {
  std::size_t point = 0;  ///< index into the evaluated x values
  DomainError error;
};

/// Evaluates a Program over many x values, in blocks, through a kernel table.
/// Agrees bit for bit with evaluate() at every point; fails on the first
/// instruction (in program order) that yields a non-finite value anywhere in
/// the current block.
class BatchEvaluator {
 public:
  static constexpr std::size_t kBlock = 128;

  explicit BatchEvaluator(const simd::KernelTable& kernels = simd::active_kernels())
      : kernels_(&kernels) {}

  /// `outputs[k]` receives root k; each span must hold xs.size() values.
  std::optional<BatchFailure> run(const Program& program, std::span<const double> xs,
                                  const RbfConfig& rbf, std::span<const std::span<double>> outputs);

  const simd::KernelTable& kernels() const { return *kernels_; }

 private:
  const simd::KernelTable* kernels_;
  std::vector<double> scratch_;
};

}  // namespace qge::expr
