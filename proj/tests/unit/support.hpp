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

#include <random>
#include <string>
#include <vector>

#include "qge/grammar.hpp"
#include "qge/mapper.hpp"

namespace qge::testing {

inline std::string data_path(const std::string& name) {
  return std::string(QGE_TEST_DATA_DIR) + "/" + name;
}

/// Maps random chromosomes through the x-only builtin grammar until `count`
/// of them produce an expression.
inline std::vector<expr::Expression> sample_expressions(std::size_t count, unsigned seed,
                                                        std::size_t max_size = 60) {
  const auto& g = grammar::builtin_grammar(grammar::BuiltinVariant::x_only);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<mapper::Codon> codon(0, 255);
  std::vector<expr::Expression> out;
  while (out.size() < count) {
    mapper::Chromosome c;
    for (int i = 0; i < 50; ++i) c.codons.push_back(codon(rng));
    auto m = mapper::map_genotype(g, c, 2, mapper::TraceDetail::compact);
    if (m.mapped && m.expression.size() <= max_size) out.push_back(m.expression);
  }
  return out;
}

}  // namespace qge::testing
