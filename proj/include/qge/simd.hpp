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

// Array kernels behind batch expression evaluation and fitness reduction.
//
// Every backend produces bit-identical results to the scalar reference:
//  - elementwise kernels use only correctly rounded IEEE operations, and the
//    transcendental functions are the same libm calls applied per lane;
//  - reductions use a fixed 4-way striped order (element i goes into
//    accumulator i % 4, combined as (a0 + a1) + (a2 + a3)), which the scalar
//    reference follows literally.
// That makes evolution runs reproducible across machines and lets the
// equivalence tests compare with operator==.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qge/ops.hpp"

namespace qge::simd {

enum class Backend { scalar, avx2, neon };

std::string_view to_string(Backend b);

struct KernelTable {
  Backend backend;

  void (*fill)(double* out, double value, std::size_t n);
  void (*binary)(BinaryOp op, double* out, const double* a, const double* b, std::size_t n);
  /// `c` is the radial basis shape constant; ignored by the other functions.
  void (*unary)(UnaryFn fn, double* out, const double* in, std::size_t n, double c);
  bool (*all_finite)(const double* in, std::size_t n);

  /// out = (neg_kinetic * d2psi + potential * psi) - energy * psi
  void (*residual)(double* out, const double* psi, const double* d2psi, const double* potential,
                   double neg_kinetic, double energy, std::size_t n);

  double (*sum_squares)(const double* in, std::size_t n);
  double (*sum_abs)(const double* in, std::size_t n);
  /// sum of w[i] * (a[i] * b[i])
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

std::vector<Backend> available_backends();

/// Kernels used by default. Picks the widest supported backend on first use;
/// the QGE_KERNELS environment variable (scalar|avx2|neon) overrides.
const KernelTable& active_kernels();

/// Throws std::invalid_argument if the backend is unavailable.
const KernelTable& kernels_for(Backend b);
void select_kernels(Backend b);
Backend backend_from_name(std::string_view name);

namespace detail {
// Per-backend tables; defined only where compiled in.
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace qge::simd
