/*
 * Copyright 2026 The tsgait Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tsgait/simd/dense.hpp"

#include <cstdlib>
#include <cstring>

namespace tsgait::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, const double* x, const double* b, double* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double acc = dot_scalar(w + r * cols, x, cols);
    y[r] = b ? acc + b[r] : acc;
  }
}

void gemv_t_scalar(const double* w, const double* g, double* x_grad,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], w + r * cols, x_grad, cols);
  }
}

void ger_scalar(const double* g, const double* x, double* w_grad,
                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy_scalar(g[r], x, w_grad + r * cols, cols);
  }
}

const DenseKernels kScalar{dot_scalar, axpy_scalar, gemv_scalar,
                           gemv_t_scalar, ger_scalar, Isa::kScalar};

const DenseKernels& select() {
  const char* forced = std::getenv("TSGAIT_SIMD");
  if (forced && std::strcmp(forced, "scalar") == 0) return kScalar;
  if (const DenseKernels* k = avx2_kernels(); k && cpu_has_avx2()) return *k;
  return kScalar;
}

}  // namespace

const DenseKernels& scalar_kernels() { return kScalar; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const DenseKernels& active() {
  static const DenseKernels& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

#ifndef TSGAIT_HAVE_AVX2
const DenseKernels* avx2_kernels() { return nullptr; }
#endif

}  // namespace tsgait::simd
