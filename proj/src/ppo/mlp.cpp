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

#include "tsgait/ppo/mlp.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tsgait/error.hpp"

namespace tsgait {
namespace {

void require_size(std::string_view what, std::size_t got, std::size_t want) {
  if (got != want) {
    std::ostringstream os;
    os << what << " has size " << got << ", expected " << want;
    throw DomainError(os.str());
  }
}

// rows x cols matrix with orthonormal rows (rows <= cols) or columns.
Eigen::MatrixXd orthogonal(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const int big = std::max(rows, cols), small = std::min(rows, cols);
  Eigen::MatrixXd a(big, small);
  for (int j = 0; j < small; ++j) {
    for (int i = 0; i < big; ++i) a(i, j) = n(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  // Fix the sign ambiguity of QR so the draw is uniform.
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(small, small);
  for (int j = 0; j < small; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (rows < cols) return q.transpose();
  return q;
}

}  // namespace

Mlp::Mlp(int inputs, int hidden, int outputs, OutputActivation act)
    : in_(inputs), hid_(hidden), out_(outputs), act_(act) {
  if (inputs <= 0 || hidden <= 0 || outputs <= 0) {
    throw DomainError("network layer sizes must be positive");
  }
  params_.assign(b2() + out_, 0.0);
}

void Mlp::initialize(std::mt19937_64& rng, double output_gain) {
  std::fill(params_.begin(), params_.end(), 0.0);
  const Eigen::MatrixXd a = std::sqrt(2.0) * orthogonal(hid_, in_, rng);
  const Eigen::MatrixXd b = output_gain * orthogonal(out_, hid_, rng);
  for (int r = 0; r < hid_; ++r) {
    for (int c = 0; c < in_; ++c) params_[w1() + r * in_ + c] = a(r, c);
  }
  for (int r = 0; r < out_; ++r) {
    for (int c = 0; c < hid_; ++c) params_[w2() + r * hid_ + c] = b(r, c);
  }
}

void Mlp::forward(std::span<const double> x, MlpCache& cache,
                  const simd::DenseKernels& k) const {
  require_size("network input", x.size(), in_);
  cache.hidden.resize(hid_);
  cache.output.resize(out_);
  const double* p = params_.data();
  k.gemv(p + w1(), x.data(), p + b1(), cache.hidden.data(), hid_, in_);
  for (double& h : cache.hidden) h = h > 0.0 ? h : 0.0;
  k.gemv(p + w2(), cache.hidden.data(), p + b2(), cache.output.data(), out_, hid_);
  if (act_ == OutputActivation::kTanh) {
    for (double& o : cache.output) o = std::tanh(o);
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  MlpCache cache;
  forward(x, cache);
  return std::move(cache.output);
}

void Mlp::backward(std::span<const double> x, const MlpCache& cache,
                   std::span<const double> output_grad, std::span<double> grad,
                   std::span<double> input_grad, const simd::DenseKernels& k) const {
  require_size("network input", x.size(), in_);
  require_size("output gradient", output_grad.size(), out_);
  require_size("parameter gradient", grad.size(), params_.size());
  const double* p = params_.data();
  double* g = grad.data();

  std::vector<double> pre_out(out_);
  for (int i = 0; i < out_; ++i) {
    const double y = cache.output[i];
    pre_out[i] = act_ == OutputActivation::kTanh ? output_grad[i] * (1.0 - y * y)
                                                 : output_grad[i];
  }
  k.ger(pre_out.data(), cache.hidden.data(), g + w2(), out_, hid_);
  k.axpy(1.0, pre_out.data(), g + b2(), out_);

  std::vector<double> pre_hidden(hid_, 0.0);
  k.gemv_t(p + w2(), pre_out.data(), pre_hidden.data(), out_, hid_);
  for (int j = 0; j < hid_; ++j) {
    if (cache.hidden[j] <= 0.0) pre_hidden[j] = 0.0;
  }
  k.ger(pre_hidden.data(), x.data(), g + w1(), hid_, in_);
  k.axpy(1.0, pre_hidden.data(), g + b1(), hid_);

  if (!input_grad.empty()) {
    require_size("input gradient", input_grad.size(), in_);
    std::fill(input_grad.begin(), input_grad.end(), 0.0);
    k.gemv_t(p + w1(), pre_hidden.data(), input_grad.data(), hid_, in_);
  }
}

}  // namespace tsgait
