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

// AVX2 kernels (4 x double). Built with -mavx2 and reached only through the
// runtime dispatcher after a CPU feature check. No FMA: results must match
// the scalar reference exactly.

#include "qge/simd.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace qge::simd {
namespace {

constexpr std::size_t kLanes = 4;

void fill(double* out, double value, std::size_t n) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, v);
  for (; i < n; ++i) out[i] = value;
}

template <class VecOp>
void binary_loop(double* out, const double* a, const double* b, std::size_t n, VecOp op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  if (i < n) {
    alignas(32) double ta[kLanes] = {0, 0, 0, 0};
    alignas(32) double tb[kLanes] = {1, 1, 1, 1};
    alignas(32) double to[kLanes];
    for (std::size_t j = i; j < n; ++j) {
      ta[j - i] = a[j];
      tb[j - i] = b[j];
    }
    _mm256_store_pd(to, op(_mm256_load_pd(ta), _mm256_load_pd(tb)));
    for (std::size_t j = i; j < n; ++j) out[j] = to[j - i];
  }
}

void binary(BinaryOp op, double* out, const double* a, const double* b, std::size_t n) {
  switch (op) {
    case BinaryOp::add:
      binary_loop(out, a, b, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); });
      return;
    case BinaryOp::sub:
      binary_loop(out, a, b, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); });
      return;
    case BinaryOp::mul:
      binary_loop(out, a, b, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); });
      return;
    case BinaryOp::div:
      binary_loop(out, a, b, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); });
      return;
  }
}

template <class VecOp>
void unary_loop(double* out, const double* in, std::size_t n, VecOp op) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(in + i)));
  if (i < n) {
    alignas(32) double t[kLanes] = {0, 0, 0, 0};
    alignas(32) double to[kLanes];
    for (std::size_t j = i; j < n; ++j) t[j - i] = in[j];
    _mm256_store_pd(to, op(_mm256_load_pd(t)));
    for (std::size_t j = i; j < n; ++j) out[j] = to[j - i];
  }
}

void unary(UnaryFn fn, double* out, const double* in, std::size_t n, double c) {
  const __m256d c2 = _mm256_set1_pd(c * c);
  const __m256d one = _mm256_set1_pd(1.0);
  switch (fn) {
    case UnaryFn::sqrt:
      unary_loop(out, in, n, [](__m256d r) { return _mm256_sqrt_pd(r); });
      return;
    case UnaryFn::rbf2:
      unary_loop(out, in, n, [&](__m256d r) {
        return _mm256_sqrt_pd(_mm256_add_pd(c2, _mm256_mul_pd(r, r)));
      });
      return;
    case UnaryFn::rbf3:
      unary_loop(out, in, n, [&](__m256d r) {
        return _mm256_sqrt_pd(_mm256_div_pd(one, _mm256_add_pd(c2, _mm256_mul_pd(r, r))));
      });
      return;
    case UnaryFn::rbf4:
      unary_loop(out, in, n, [&](__m256d r) {
        return _mm256_div_pd(one, _mm256_add_pd(c2, _mm256_mul_pd(r, r)));
      });
      return;
    case UnaryFn::rbf1: {
      // Exponent vectorized, exp itself per lane through libm.
      const __m256d cv = _mm256_set1_pd(c);
      const __m256d sign = _mm256_set1_pd(-0.0);
      unary_loop(out, in, n, [&](__m256d r) {
        return _mm256_xor_pd(sign, _mm256_mul_pd(cv, _mm256_mul_pd(r, r)));
      });
      for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(out[i]);
      return;
    }
    case UnaryFn::sin:
    case UnaryFn::cos:
    case UnaryFn::exp:
    case UnaryFn::log:
      for (std::size_t i = 0; i < n; ++i) out[i] = apply_unary(fn, in[i], c);
      return;
  }
}

bool all_finite(const double* in, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d inf = _mm256_set1_pd(INFINITY);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d a = _mm256_and_pd(_mm256_loadu_pd(in + i), abs_mask);
    if (_mm256_movemask_pd(_mm256_cmp_pd(a, inf, _CMP_LT_OQ)) != 0xF) return false;
  }
  for (; i < n; ++i)
    if (!std::isfinite(in[i])) return false;
  return true;
}

void residual(double* out, const double* psi, const double* d2psi, const double* potential,
              double neg_kinetic, double energy, std::size_t n) {
  const __m256d k = _mm256_set1_pd(neg_kinetic);
  const __m256d e = _mm256_set1_pd(energy);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d p = _mm256_loadu_pd(psi + i);
    __m256d h = _mm256_add_pd(_mm256_mul_pd(k, _mm256_loadu_pd(d2psi + i)),
                              _mm256_mul_pd(_mm256_loadu_pd(potential + i), p));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(h, _mm256_mul_pd(e, p)));
  }
  for (; i < n; ++i) {
    double h = neg_kinetic * d2psi[i] + potential[i] * psi[i];
    out[i] = h - energy * psi[i];
  }
}

// Finishes a striped reduction: tail elements go to lane i % 4.
template <class Term>
double finish(__m256d acc, std::size_t i, std::size_t n, Term term) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  for (; i < n; ++i) lanes[i % kLanes] += term(i);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_squares(const double* in, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d v = _mm256_loadu_pd(in + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  return finish(acc, i, n, [&](std::size_t j) { return in[j] * in[j]; });
}

double sum_abs(const double* in, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(in + i), abs_mask));
  return finish(acc, i, n, [&](std::size_t j) { return std::fabs(in[j]); });
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), ab));
  }
  return finish(acc, i, n, [&](std::size_t j) { return w[j] * (a[j] * b[j]); });
}

constexpr KernelTable kAvx2{
    Backend::avx2, fill, binary, unary, all_finite, residual, sum_squares, sum_abs, weighted_dot,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace qge::simd

#else

namespace qge::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace qge::simd::detail

#endif
