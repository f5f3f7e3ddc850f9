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

// AArch64 NEON kernels (2 x double). Reductions keep two vector accumulators
// so that the lane layout matches the 4-way striped scalar order.

#include "qge/simd.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON) && !defined(QGE_NO_NEON)

#include <arm_neon.h>

#include <cmath>

namespace qge::simd {
namespace {

void fill(double* out, double value, std::size_t n) {
  const float64x2_t v = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, v);
  for (; i < n; ++i) out[i] = value;
}

template <class VecOp, class ScalarOp>
void binary_loop(double* out, const double* a, const double* b, std::size_t n, VecOp vop,
                 ScalarOp sop) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vop(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

void binary(BinaryOp op, double* out, const double* a, const double* b, std::size_t n) {
  switch (op) {
    case BinaryOp::add:
      binary_loop(out, a, b, n, [](auto x, auto y) { return vaddq_f64(x, y); },
                  [](double x, double y) { return x + y; });
      return;
    case BinaryOp::sub:
      binary_loop(out, a, b, n, [](auto x, auto y) { return vsubq_f64(x, y); },
                  [](double x, double y) { return x - y; });
      return;
    case BinaryOp::mul:
      binary_loop(out, a, b, n, [](auto x, auto y) { return vmulq_f64(x, y); },
                  [](double x, double y) { return x * y; });
      return;
    case BinaryOp::div:
      binary_loop(out, a, b, n, [](auto x, auto y) { return vdivq_f64(x, y); },
                  [](double x, double y) { return x / y; });
      return;
  }
}

void unary(UnaryFn fn, double* out, const double* in, std::size_t n, double c) {
  const float64x2_t c2 = vdupq_n_f64(c * c);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  switch (fn) {
    case UnaryFn::sqrt:
      for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsqrtq_f64(vld1q_f64(in + i)));
      break;
    case UnaryFn::rbf2:
      for (; i + 2 <= n; i += 2) {
        float64x2_t r = vld1q_f64(in + i);
        vst1q_f64(out + i, vsqrtq_f64(vaddq_f64(c2, vmulq_f64(r, r))));
      }
      break;
    case UnaryFn::rbf3:
      for (; i + 2 <= n; i += 2) {
        float64x2_t r = vld1q_f64(in + i);
        vst1q_f64(out + i, vsqrtq_f64(vdivq_f64(one, vaddq_f64(c2, vmulq_f64(r, r)))));
      }
      break;
    case UnaryFn::rbf4:
      for (; i + 2 <= n; i += 2) {
        float64x2_t r = vld1q_f64(in + i);
        vst1q_f64(out + i, vdivq_f64(one, vaddq_f64(c2, vmulq_f64(r, r))));
      }
      break;
    default:
      break;
  }
  for (; i < n; ++i) out[i] = apply_unary(fn, in[i], c);
}

bool all_finite(const double* in, std::size_t n) {
  const float64x2_t inf = vdupq_n_f64(INFINITY);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t ok = vcltq_f64(vabsq_f64(vld1q_f64(in + i)), inf);
    if ((vgetq_lane_u64(ok, 0) & vgetq_lane_u64(ok, 1)) == 0) return false;
  }
  for (; i < n; ++i)
    if (!std::isfinite(in[i])) return false;
  return true;
}

void residual(double* out, const double* psi, const double* d2psi, const double* potential,
              double neg_kinetic, double energy, std::size_t n) {
  const float64x2_t k = vdupq_n_f64(neg_kinetic);
  const float64x2_t e = vdupq_n_f64(energy);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t p = vld1q_f64(psi + i);
    float64x2_t h = vaddq_f64(vmulq_f64(k, vld1q_f64(d2psi + i)),
                              vmulq_f64(vld1q_f64(potential + i), p));
    vst1q_f64(out + i, vsubq_f64(h, vmulq_f64(e, p)));
  }
  for (; i < n; ++i) {
    double h = neg_kinetic * d2psi[i] + potential[i] * psi[i];
    out[i] = h - energy * psi[i];
  }
}

// lo holds lanes {0,1}, hi holds lanes {2,3} of the striped accumulator.
template <class VecTerm, class ScalarTerm>
double striped(std::size_t n, VecTerm vterm, ScalarTerm sterm) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vterm(i));
    hi = vaddq_f64(hi, vterm(i + 2));
  }
  double lanes[4] = {vgetq_lane_f64(lo, 0), vgetq_lane_f64(lo, 1), vgetq_lane_f64(hi, 0),
                     vgetq_lane_f64(hi, 1)};
  for (; i < n; ++i) lanes[i % 4] += sterm(i);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_squares(const double* in, std::size_t n) {
  return striped(
      n,
      [&](std::size_t j) {
        float64x2_t v = vld1q_f64(in + j);
        return vmulq_f64(v, v);
      },
      [&](std::size_t j) { return in[j] * in[j]; });
}

double sum_abs(const double* in, std::size_t n) {
  return striped(
      n, [&](std::size_t j) { return vabsq_f64(vld1q_f64(in + j)); },
      [&](std::size_t j) { return std::fabs(in[j]); });
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  return striped(
      n,
      [&](std::size_t j) {
        return vmulq_f64(vld1q_f64(w + j), vmulq_f64(vld1q_f64(a + j), vld1q_f64(b + j)));
      },
      [&](std::size_t j) { return w[j] * (a[j] * b[j]); });
}

constexpr KernelTable kNeon{
    Backend::neon, fill, binary, unary, all_finite, residual, sum_squares, sum_abs, weighted_dot,
};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace qge::simd

#else

namespace qge::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace qge::simd::detail

#endif
