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

#include "qshield/tensor.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qshield/error.hpp"

namespace qshield::tensor {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kShapeMismatch, "matrix value count does not match shape");
  }
}

bool Matrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ConvResult conv_full_width(const Matrix& x, const Matrix& filter, bool use_bias, double bias) {
  if (filter.cols() != x.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "filter width " + std::to_string(filter.cols()) +
                    " must equal input width " + std::to_string(x.cols()));
  }
  if (filter.rows() == 0 || filter.rows() > x.rows()) {
    throw Error(ErrorCode::kInputTooShort,
                "filter height " + std::to_string(filter.rows()) +
                    " exceeds input length " + std::to_string(x.rows()));
  }
  const std::size_t out_len = x.rows() - filter.rows() + 1;
  const std::size_t window = filter.rows() * filter.cols();
  ConvResult result;
  result.pre_activation.resize(out_len);
  result.output.resize(out_len);
  const double* f = filter.values().data();
  for (std::size_t i = 0; i < out_len; ++i) {
    // Rows i..i+L-1 of X are contiguous, so the window is one flat dot product.
    const double* xw = x.values().data() + i * x.cols();
    double s = use_bias ? bias : 0.0;
    for (std::size_t j = 0; j < window; ++j) s += f[j] * xw[j];
    result.pre_activation[i] = s;
    result.output[i] = s > 0.0 ? s : 0.0;
  }
  return result;
}

ConvGradients conv_full_width_backward(const Matrix& x, const Matrix& filter,
                                       std::span<const double> pre_activation,
                                       std::span<const double> upstream) {
  const std::size_t out_len = x.rows() - filter.rows() + 1;
  if (pre_activation.size() != out_len || upstream.size() != out_len) {
    throw Error(ErrorCode::kShapeMismatch, "conv backward: gradient length mismatch");
  }
  ConvGradients g{Matrix(filter.rows(), filter.cols()), Matrix(x.rows(), x.cols()), 0.0};
  const std::size_t window = filter.rows() * filter.cols();
  for (std::size_t i = 0; i < out_len; ++i) {
    if (pre_activation[i] <= 0.0 || upstream[i] == 0.0) continue;
    const double gi = upstream[i];
    const double* xw = x.values().data() + i * x.cols();
    double* dxw = g.d_input.values().data() + i * x.cols();
    const double* f = filter.values().data();
    double* df = g.d_filter.values().data();
    for (std::size_t j = 0; j < window; ++j) {
      df[j] += gi * xw[j];
      dxw[j] += gi * f[j];
    }
    g.d_bias += gi;
  }
  return g;
}

PoolResult max_pool(std::span<const double> y) {
  if (y.empty()) throw Error(ErrorCode::kEmptyInput, "max_pool of an empty vector");
  PoolResult r{y[0], 0};
  for (std::size_t t = 1; t < y.size(); ++t) {
    if (y[t] > r.value) {
      r.value = y[t];
      r.argmax = t;
    }
  }
  return r;
}

RealVector max_pool_backward(std::size_t length, std::size_t argmax, double upstream) {
  RealVector g(length, 0.0);
  g.at(argmax) = upstream;
  return g;
}

RealVector softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  RealVector p(logits.size());
  double z = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    p[j] = std::exp(logits[j] - m);
    z += p[j];
  }
  for (double& v : p) v /= z;
  return p;
}

SoftmaxCrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t target) {
  if (logits.size() < 2) throw Error(ErrorCode::kConfig, "softmax needs at least 2 classes");
  if (target >= logits.size()) {
    throw Error(ErrorCode::kConfig, "target class " + std::to_string(target) + " out of range");
  }
  // Loss uses log-sum-exp directly so a vanishing probability does not
  // produce log(0).
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  SoftmaxCrossEntropy out;
  out.probs.resize(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) out.probs[j] = std::exp(logits[j] - m) / z;
  out.loss = (m + std::log(z)) - logits[target];
  out.d_logits = out.probs;
  out.d_logits[target] -= 1.0;
  return out;
}

DropoutResult dropout_apply(std::span<const double> v, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kConfig, "dropout probability must lie in [0, 1)");
  }
  DropoutResult r;
  r.output.assign(v.begin(), v.end());
  r.mask.assign(v.size(), 1.0);
  if (mode == Mode::kEval || p == 0.0) return r;
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < v.size(); ++i) {
    r.mask[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
    r.output[i] = v[i] * r.mask[i];
  }
  return r;
}

RealVector dropout_with_mask(std::span<const double> v, std::span<const double> mask) {
  if (v.size() != mask.size()) {
    throw Error(ErrorCode::kShapeMismatch, "dropout mask length mismatch");
  }
  RealVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * mask[i];
  return out;
}

double l2_penalty_value(std::span<const std::span<const double>> tensors, double lambda) {
  if (lambda < 0.0) throw Error(ErrorCode::kConfig, "L2 lambda must be non-negative");
  double sum = 0.0;
  for (auto t : tensors) {
    for (double w : t) sum += w * w;
  }
  return lambda * sum;
}

L2Result l2_penalty(std::span<const std::span<const double>> tensors, double lambda) {
  L2Result r;
  r.penalty = l2_penalty_value(tensors, lambda);
  r.gradients.reserve(tensors.size());
  for (auto t : tensors) {
    RealVector g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) g[i] = 2.0 * lambda * t[i];
    r.gradients.push_back(std::move(g));
  }
  return r;
}

FiniteDiffReport finite_diff_check(const std::function<double()>& loss_fn,
                                   std::span<double> params,
                                   std::span<const double> analytic,
                                   const FiniteDiffOptions& options) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::kConfig, "epsilon must be positive");
  if (params.size() != analytic.size()) {
    throw Error(ErrorCode::kShapeMismatch, "analytic gradient length differs from params");
  }
  const double base_a = loss_fn();
  const double base_b = loss_fn();
  if (base_a != base_b) {
    throw Error(ErrorCode::kContractViolation,
                "loss function is not deterministic; disable dropout or fix the mask");
  }

  std::vector<std::size_t> coords(params.size());
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.max_coordinates != 0 && options.max_coordinates < coords.size()) {
    Rng rng(options.seed);
    rng.shuffle(coords.begin(), coords.end());
    coords.resize(options.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }

  FiniteDiffReport report;
  for (std::size_t idx : coords) {
    const double saved = params[idx];
    params[idx] = saved + options.epsilon;
    const double up = loss_fn();
    params[idx] = saved - options.epsilon;
    const double down = loss_fn();
    params[idx] = saved;
    const double numeric = (up - down) / (2.0 * options.epsilon);
    const double a = analytic[idx];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double rel = std::abs(a - numeric) / denom;
    ++report.coordinates_checked;
    if (rel > report.max_relative_error || report.coordinates_checked == 1) {
      report.max_relative_error = std::max(rel, report.max_relative_error);
      if (rel >= report.max_relative_error) {
        report.worst_coordinate = idx;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace qshield::tensor
