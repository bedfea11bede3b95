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

#pragma once

// Dense double-precision kernels used by the policy/value networks.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once at first use from the
// CPU feature flags; TSGAIT_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace tsgait::simd {

enum class Isa { kScalar, kAvx2 };

struct DenseKernels {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + b, W row-major rows x cols; b may be null
  void (*gemv)(const double* w, const double* x, const double* b, double* y,
               std::size_t rows, std::size_t cols);
  // x_grad += W^T g
  void (*gemv_t)(const double* w, const double* g, double* x_grad,
                 std::size_t rows, std::size_t cols);
  // W_grad += g x^T
  void (*ger)(const double* g, const double* x, double* w_grad,
              std::size_t rows, std::size_t cols);
  Isa isa;
};

const DenseKernels& scalar_kernels();

// Null when the build has no AVX2 translation unit.
const DenseKernels* avx2_kernels();

bool cpu_has_avx2();

// Kernel table selected for this process.
const DenseKernels& active();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace tsgait::simd
