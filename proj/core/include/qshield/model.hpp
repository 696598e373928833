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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qshield/labels.hpp"
#include "qshield/random.hpp"
#include "qshield/tensor.hpp"
#include "qshield/vocab.hpp"

namespace qshield {

struct ModelConfig {
  std::size_t embedding_dim = 32;
  std::vector<std::size_t> filter_heights = {2, 3, 4, 5};
  std::size_t filters_per_height = 32;
  std::size_t num_classes = kNumClasses;
  std::size_t max_seq_len = 256;
  double dropout_p = 0.5;
  bool use_bias = false;
  std::uint64_t seed = 20190101;

  std::size_t num_filters() const { return filter_heights.size() * filters_per_height; }

  // Throws Error(kConfig) describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All filters of one height. Row j of `weights` is filter j flattened as
// height x embedding_dim, row-major.
struct FilterBank {
  std::size_t height = 0;
  tensor::Matrix weights;
  tensor::RealVector bias;  // empty unless the model uses biases

  friend bool operator==(const FilterBank&, const FilterBank&) = default;
};

// Everything backpropagation optimizes, plus lineage. The same structure is
// used as the gradient accumulator during training.
struct ModelParams {
  tensor::Matrix embedding;  // kIndexSpace x embedding_dim
  std::vector<FilterBank> banks;
  tensor::Matrix output_weights;  // num_filters x num_classes
  tensor::RealVector output_bias;  // empty unless the model uses biases
  std::uint64_t version = 0;
  std::uint64_t vocab_hash = 0;

  bool all_finite() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// View of one trainable tensor, in serialization order.
struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<double> values;
  bool regularized = false;  // included in the L2 penalty
};

struct ConstTensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<const double> values;
  bool regularized = false;
};

std::vector<TensorRef> tensors(ModelParams& params);
std::vector<ConstTensorRef> tensors(const ModelParams& params);

// Zero-valued params with the same shapes.
ModelParams zeros_like(const ModelParams& params);

ModelParams init_params(const ModelConfig& config);

// Checks params against config; throws Error(kShapeMismatch).
void check_shapes(const ModelParams& params, const ModelConfig& config);

struct Verdict {
  tensor::RealVector probs;
  Label predicted = Label::kBenign;
  double confidence = 0.0;
  std::uint64_t model_version = 0;
};

// Dot products between every filter row and every embedding row. The
// convolution over an embedded sequence only ever needs these values, so a
// window sum becomes `height` table lookups instead of height*k multiplies.
class FilterProjection {
 public:
  FilterProjection() = default;
  explicit FilterProjection(const ModelParams& params);

  std::span<const double> filter_rows(std::size_t filter) const {
    return {data_.data() + row_offset_[filter] * CharVocab::kIndexSpace,
            heights_[filter] * CharVocab::kIndexSpace};
  }
  std::size_t height(std::size_t filter) const { return heights_[filter]; }
  std::size_t num_filters() const { return heights_.size(); }

 private:
  std::vector<double> data_;
  std::vector<std::size_t> row_offset_;
  std::vector<std::size_t> heights_;
};

struct ActivationCache {
  std::vector<std::uint8_t> indices;
  // Per filter: position of the pooled maximum and the value there.
  std::vector<std::size_t> argmax;
  tensor::RealVector pooled_pre_activation;
  tensor::RealVector pooled;          // z
  tensor::RealVector dropout_mask;    // all ones in eval mode
  tensor::RealVector pooled_dropped;  // z after dropout
  tensor::RealVector logits;
};

struct ForwardResult {
  Verdict verdict;
  ActivationCache cache;
};

ForwardResult forward(const ModelParams& params, const ModelConfig& config,
                      const FilterProjection& projection, const IndexSequence& seq,
                      tensor::Mode mode, Rng& rng);

// Builds the projection internally; convenient for one-off calls.
ForwardResult forward(const ModelParams& params, const ModelConfig& config,
                      const IndexSequence& seq, tensor::Mode mode, Rng& rng);

// Adds `scale` * d(cross-entropy)/d(params) for this sample into `grads` and
// returns the cross-entropy.
double backward(const ModelParams& params, const ModelConfig& config,
                const ActivationCache& cache, Label target, double scale, ModelParams& grads);

Verdict predict(const ModelParams& params, const ModelConfig& config,
                const FilterProjection& projection, std::string_view raw_text);
Verdict predict(const ModelParams& params, const ModelConfig& config, std::string_view raw_text);

// Euclidean distance between two rows of the embedding table.
double embedding_distance(const ModelParams& params, char a, char b);

}  // namespace qshield
