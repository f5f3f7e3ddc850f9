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

#include "qge/program.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <tuple>
#include <unordered_map>

namespace qge::expr {
namespace {

using Key = std::tuple<int, int, std::uint32_t, std::uint32_t, std::uint64_t>;

// Emits value-numbered instructions (one virtual register per instruction).
class Lowering {
 public:
  std::uint32_t lower(const Expression& e) {
    if (auto it = by_node_.find(e.id()); it != by_node_.end()) return it->second;
    Instruction ins;
    ins.kind = e.kind();
    int sub = 0;
    switch (e.kind()) {
      case NodeKind::constant: ins.value = e.value(); break;
      case NodeKind::variable:
        ins.var = e.variable();
        sub = static_cast<int>(ins.var);
        variables_ |= 1u << sub;
        break;
      case NodeKind::binary:
        ins.bop = e.binary_op();
        sub = static_cast<int>(ins.bop);
        ins.a = lower(e.left());
        ins.b = lower(e.right());
        break;
      case NodeKind::unary:
        ins.fn = e.unary_fn();
        sub = static_cast<int>(ins.fn);
        ins.a = lower(e.arg());
        break;
    }
    Key key{static_cast<int>(ins.kind), sub, ins.a, ins.b,
            e.kind() == NodeKind::constant ? std::bit_cast<std::uint64_t>(ins.value) : 0};
    auto [it, inserted] = by_key_.emplace(key, static_cast<std::uint32_t>(code.size()));
    if (inserted) {
      ins.dst = it->second;
      code.push_back(ins);
    }
    by_node_.emplace(e.id(), it->second);
    return it->second;
  }

  std::vector<Instruction> code;
  unsigned variables() const { return variables_; }

 private:
  std::unordered_map<const void*, std::uint32_t> by_node_;
  std::map<Key, std::uint32_t> by_key_;
  unsigned variables_ = 0;
};

}  // namespace

Program Program::compile(std::span<const Expression> roots) {
  Lowering low;
  std::vector<std::uint32_t> virt_outputs;
  for (const auto& r : roots) virt_outputs.push_back(low.lower(r));

  // Linear-scan register assignment over the value-numbered code.
  const std::size_t n = low.code.size();
  constexpr std::size_t kLive = static_cast<std::size_t>(-1);
  std::vector<std::size_t> last_use(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ins = low.code[i];
    last_use[i] = i;
    if (ins.kind == NodeKind::binary) {
      last_use[ins.a] = i;
      last_use[ins.b] = i;
    } else if (ins.kind == NodeKind::unary) {
      last_use[ins.a] = i;
    }
  }
  for (auto v : virt_outputs) last_use[v] = kLive;

  Program p;
  p.variables_mask_ = low.variables();
  std::vector<std::uint32_t> phys(n, 0);
  std::vector<std::uint32_t> free_list;
  std::uint32_t next = 0;
  p.code_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instruction ins = low.code[i];
    if (ins.kind == NodeKind::binary) {
      ins.a = phys[ins.a];
      ins.b = phys[ins.b];
    } else if (ins.kind == NodeKind::unary) {
      ins.a = phys[ins.a];
    }
    std::uint32_t reg;
    if (!free_list.empty()) {
      reg = free_list.back();
      free_list.pop_back();
    } else {
      reg = next++;
    }
    phys[i] = reg;
    ins.dst = reg;
    p.code_.push_back(ins);
    // Operands are released only after the result register is taken, so an
    // instruction never overwrites its own inputs.
    auto release = [&](std::uint32_t v) {
      if (last_use[v] == i) free_list.push_back(phys[v]);
    };
    const auto& orig = low.code[i];
    if (orig.kind == NodeKind::binary) {
      release(orig.a);
      if (orig.b != orig.a) release(orig.b);
    } else if (orig.kind == NodeKind::unary) {
      release(orig.a);
    }
    if (last_use[i] == i) free_list.push_back(reg);  // result unused
  }
  for (auto v : virt_outputs) p.outputs_.push_back(phys[v]);
  p.registers_ = next;
  return p;
}

bool Program::uses(Variable v) const {
  return (variables_mask_ >> static_cast<unsigned>(v)) & 1u;
}

namespace {

DomainError classify(const Instruction& ins, const double* a, const double* b, std::size_t i) {
  if (ins.kind == NodeKind::binary) {
    if (ins.bop == BinaryOp::div && b[i] == 0.0) return {DomainErrorKind::division_by_zero, {}};
    return {DomainErrorKind::non_finite,
            std::string("overflow in '") + std::string(to_string(ins.bop)) + "'"};
  }
  if (ins.kind == NodeKind::unary) {
    if (ins.fn == UnaryFn::log && !(a[i] > 0.0)) return {DomainErrorKind::log_domain, {}};
    if (ins.fn == UnaryFn::sqrt && a[i] < 0.0) return {DomainErrorKind::sqrt_domain, {}};
    return {DomainErrorKind::non_finite,
            std::string("overflow in ") + std::string(to_string(ins.fn))};
  }
  return {DomainErrorKind::non_finite, "variable value"};
}

}  // namespace

std::optional<BatchFailure> BatchEvaluator::run(const Program& program,
                                                std::span<const double> xs, const RbfConfig& rbf,
                                                std::span<const std::span<double>> outputs) {
  for (Variable v : {Variable::y, Variable::z})
    if (program.uses(v))
      return BatchFailure{0, {DomainErrorKind::unbound_variable, std::string(to_string(v))}};

  const auto& k = *kernels_;
  scratch_.resize(std::max<std::size_t>(program.register_count(), 1) * kBlock);
  auto reg = [&](std::uint32_t r) { return scratch_.data() + r * kBlock; };

  for (std::size_t start = 0; start < xs.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, xs.size() - start);
    for (const auto& ins : program.code()) {
      double* out = reg(ins.dst);
      const double* a = reg(ins.a);
      const double* b = reg(ins.b);
      switch (ins.kind) {
        case NodeKind::constant: k.fill(out, ins.value, n); continue;
        case NodeKind::variable:
          std::memcpy(out, xs.data() + start, n * sizeof(double));
          break;
        case NodeKind::binary: k.binary(ins.bop, out, a, b, n); break;
        case NodeKind::unary: k.unary(ins.fn, out, a, n, rbf.c); break;
      }
      if (!k.all_finite(out, n)) {
        for (std::size_t i = 0; i < n; ++i) {
          if (std::isfinite(out[i])) continue;
          DomainError err = classify(ins, a, b, i);
          return BatchFailure{start + i, std::move(err)};
        }
      }
    }
    for (std::size_t r = 0; r < outputs.size(); ++r)
      std::memcpy(outputs[r].data() + start, reg(program.outputs()[r]), n * sizeof(double));
  }
  return std::nullopt;
}

}  // namespace qge::expr
