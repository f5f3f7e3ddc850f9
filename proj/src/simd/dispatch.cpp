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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qge/simd.hpp"

namespace qge::simd {

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

Backend backend_from_name(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  if (name == "neon") return Backend::neon;
  throw std::invalid_argument("unknown kernel backend '" + std::string(name) + "'");
}

const KernelTable* avx2_kernels() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

// NEON is architectural on AArch64; compiled in means usable.
const KernelTable* neon_kernels() { return detail::neon_table(); }

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (avx2_kernels()) out.push_back(Backend::avx2);
  if (neon_kernels()) out.push_back(Backend::neon);
  return out;
}

const KernelTable& kernels_for(Backend b) {
  const KernelTable* t = nullptr;
  switch (b) {
    case Backend::scalar: t = &scalar_kernels(); break;
    case Backend::avx2: t = avx2_kernels(); break;
    case Backend::neon: t = neon_kernels(); break;
  }
  if (!t) throw std::invalid_argument("kernel backend '" + std::string(to_string(b)) +
                                      "' is not available on this machine");
  return *t;
}

namespace {

const KernelTable* default_table() {
  if (const char* env = std::getenv("QGE_KERNELS"); env && *env)
    return &kernels_for(backend_from_name(env));
  if (auto* t = avx2_kernels()) return t;
  if (auto* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{default_table()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void select_kernels(Backend b) { active_slot().store(&kernels_for(b), std::memory_order_release); }

}  // namespace qge::simd
