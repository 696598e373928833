// Copyright 2026 The QShield Authors. All Rights Reserved.
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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qshield/random.hpp"

namespace qshield::tensor {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

using RealVector = std::vector<double>;

enum class Mode { kTrain, kEval };

// ---------------------------------------------------------------------------
// Full-width convolution with fused ReLU.
//
// The filter spans every column of X and slides along rows only:
//   s[i] = sum_{r<L} sum_{c<k} F[r,c] * X[i+r,c]  (+ bias)
//   y[i] = max(0, s[i])
// ---------------------------------------------------------------------------

struct ConvResult {
  RealVector pre_activation;
  RealVector output;
};

ConvResult conv_full_width(const Matrix& x, const Matrix& filter, bool use_bias = false,
                           double bias = 0.0);

struct ConvGradients {
  Matrix d_filter;
  Matrix d_input;
  double d_bias = 0.0;
};

// Backpropagates dL/dy through ReLU and the convolution. Positions whose
// pre-activation is <= 0 contribute nothing.
ConvGradients conv_full_width_backward(const Matrix& x, const Matrix& filter,
                                       std::span<const double> pre_activation,
                                       std::span<const double> upstream);

// ---------------------------------------------------------------------------
// Max pooling over a whole feature vector. Ties resolve to the lowest index.
// ---------------------------------------------------------------------------

struct PoolResult {
  double value = 0.0;
  std::size_t argmax = 0;
};

PoolResult max_pool(std::span<const double> y);
RealVector max_pool_backward(std::size_t length, std::size_t argmax, double upstream);

// ---------------------------------------------------------------------------
// Softmax and cross-entropy.
// ---------------------------------------------------------------------------

RealVector softmax(std::span<const double> logits);

struct SoftmaxCrossEntropy {
  RealVector probs;
  double loss = 0.0;
  // dloss/dlogits = probs - onehot(target)
  RealVector d_logits;
};

SoftmaxCrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t target);

// ---------------------------------------------------------------------------
// Inverted dropout: survivors are scaled by 1/(1-p) so eval needs no rescale.
// ---------------------------------------------------------------------------

struct DropoutResult {
  RealVector output;
  // Per-element multiplier: 0 for dropped, 1/(1-p) for kept.
  RealVector mask;
};

DropoutResult dropout_apply(std::span<const double> v, double p, Mode mode, Rng& rng);

// Applies a mask previously produced by dropout_apply.
RealVector dropout_with_mask(std::span<const double> v, std::span<const double> mask);

// ---------------------------------------------------------------------------
// L2 penalty: lambda * sum(w^2) over the supplied tensors.
// ---------------------------------------------------------------------------

struct L2Result {
  double penalty = 0.0;
  // One entry per input tensor, same length: 2 * lambda * w.
  std::vector<RealVector> gradients;
};

L2Result l2_penalty(std::span<const std::span<const double>> tensors, double lambda);
double l2_penalty_value(std::span<const std::span<const double>> tensors, double lambda);

// ---------------------------------------------------------------------------
// Central-difference gradient check.
// ---------------------------------------------------------------------------

struct FiniteDiffOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // 0 checks every coordinate; otherwise a seeded sample of this many.
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 1;
};

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  std::size_t worst_coordinate = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
  bool passed = true;
};

// Compares `analytic` with (f(w+e) - f(w-e)) / 2e coordinate by coordinate.
// `params` is perturbed in place and restored. The relative error of a
// coordinate is |a - n| / max(|a|, |n|, 1e-8). Throws
// Error(kContractViolation) if two evaluations at the same point disagree.
FiniteDiffReport finite_diff_check(const std::function<double()>& loss_fn,
                                   std::span<double> params,
                                   std::span<const double> analytic,
                                   const FiniteDiffOptions& options = {});

}  // namespace qshield::tensor
