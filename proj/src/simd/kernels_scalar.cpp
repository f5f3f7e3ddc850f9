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

// Scalar reference kernels. The vector variants are tested against these.

#include <cmath>

#include "qge/simd.hpp"

namespace qge::simd {
namespace {

void fill(double* out, double value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = value;
}

void binary(BinaryOp op, double* out, const double* a, const double* b, std::size_t n) {
  switch (op) {
    case BinaryOp::add:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
      return;
    case BinaryOp::sub:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
      return;
    case BinaryOp::mul:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
      return;
    case BinaryOp::div:
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
      return;
  }
}

void unary(UnaryFn fn, double* out, const double* in, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) out[i] = apply_unary(fn, in[i], c);
}

bool all_finite(const double* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(in[i])) return false;
  return true;
}

void residual(double* out, const double* psi, const double* d2psi, const double* potential,
              double neg_kinetic, double energy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double h = neg_kinetic * d2psi[i] + potential[i] * psi[i];
    out[i] = h - energy * psi[i];
  }
}

double combine(const double (&acc)[4]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

double sum_squares(const double* in, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += in[i] * in[i];
  return combine(acc);
}

double sum_abs(const double* in, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += std::fabs(in[i]);
  return combine(acc);
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += w[i] * (a[i] * b[i]);
  return combine(acc);
}

constexpr KernelTable kScalar{
    Backend::scalar, fill, binary, unary, all_finite, residual, sum_squares, sum_abs, weighted_dot,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace qge::simd
