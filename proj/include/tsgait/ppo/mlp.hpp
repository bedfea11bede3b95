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

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tsgait/simd/dense.hpp"

namespace tsgait {

enum class OutputActivation { kTanh, kIdentity };

// Activations of one forward pass, kept for the backward pass.
struct MlpCache {
  std::vector<double> hidden;  // relu(W1 x + b1)
  std::vector<double> output;  // after the output activation
};

// One-hidden-layer perceptron: out = act(W2 relu(W1 x + b1) + b2).
//
// Parameters live in one flat array in the order W1 (hidden x in, row-major),
// b1, W2 (out x hidden, row-major), b2. Gradients use the same layout.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int inputs, int hidden, int outputs, OutputActivation act);

  int inputs() const { return in_; }
  int hidden() const { return hid_; }
  int outputs() const { return out_; }
  OutputActivation activation() const { return act_; }
  std::size_t num_params() const { return params_.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Orthogonal rows/columns scaled by sqrt(2) for the hidden layer and by
  // `output_gain` for the output layer; zero biases.
  void initialize(std::mt19937_64& rng, double output_gain);

  // Throws DomainError on a size mismatch.
  void forward(std::span<const double> x, MlpCache& cache,
               const simd::DenseKernels& k = simd::active()) const;
  std::vector<double> forward(std::span<const double> x) const;

  // Accumulates dL/dparams into `grad` (size num_params) given dL/dout.
  // Writes dL/dx into `input_grad` when it is non-empty.
  void backward(std::span<const double> x, const MlpCache& cache,
                std::span<const double> output_grad, std::span<double> grad,
                std::span<double> input_grad = {},
                const simd::DenseKernels& k = simd::active()) const;

 private:
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return static_cast<std::size_t>(hid_) * in_; }
  std::size_t w2() const { return b1() + hid_; }
  std::size_t b2() const { return w2() + static_cast<std::size_t>(out_) * hid_; }

  int in_ = 0;
  int hid_ = 0;
  int out_ = 0;
  OutputActivation act_ = OutputActivation::kIdentity;
  std::vector<double> params_;
};

}  // namespace tsgait
