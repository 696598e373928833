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

#include "qshield/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qshield/error.hpp"

namespace qshield {

using tensor::Matrix;
using tensor::RealVector;

namespace {

void fill_uniform(std::span<double> values, double limit, Rng& rng) {
  for (double& v : values) v = rng.uniform(-limit, limit);
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (embedding_dim == 0) fail("embedding_dim must be positive");
  if (filter_heights.empty()) fail("at least one filter height is required");
  if (filters_per_height == 0) fail("filters_per_height must be positive");
  if (num_classes != kNumClasses) fail("num_classes must be " + std::to_string(kNumClasses));
  if (max_seq_len == 0) fail("max_seq_len must be positive");
  std::vector<std::size_t> sorted = filter_heights;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail("filter heights must be distinct");
  }
  if (sorted.front() == 0) fail("filter heights must be positive");
  if (sorted.back() > max_seq_len) {
    fail("largest filter height " + std::to_string(sorted.back()) + " exceeds max_seq_len " +
         std::to_string(max_seq_len));
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail("dropout_p must lie in [0, 1)");
}

bool ModelParams::all_finite() const {
  for (const auto& t : tensors(*this)) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

template <typename Ref, typename Params>
std::vector<Ref> collect_tensors(Params& p) {
  std::vector<Ref> out;
  const std::size_t k = p.embedding.cols();
  out.push_back({"embedding", {p.embedding.rows(), k}, p.embedding.values(), false});
  for (auto& bank : p.banks) {
    const std::string prefix = "conv.h" + std::to_string(bank.height);
    out.push_back({prefix + ".weight", {bank.weights.rows(), bank.height, k},
                   bank.weights.values(), true});
    if (!bank.bias.empty()) {
      out.push_back({prefix + ".bias", {bank.bias.size()}, bank.bias, false});
    }
  }
  out.push_back({"output.weight", {p.output_weights.rows(), p.output_weights.cols()},
                 p.output_weights.values(), true});
  if (!p.output_bias.empty()) {
    out.push_back({"output.bias", {p.output_bias.size()}, p.output_bias, false});
  }
  return out;
}

}  // namespace

std::vector<TensorRef> tensors(ModelParams& params) {
  return collect_tensors<TensorRef>(params);
}

std::vector<ConstTensorRef> tensors(const ModelParams& params) {
  return collect_tensors<ConstTensorRef>(params);
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for (auto& t : tensors(z)) std::fill(t.values.begin(), t.values.end(), 0.0);
  return z;
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t k = config.embedding_dim;
  ModelParams p;
  p.vocab_hash = CharVocab::hash();
  p.embedding = Matrix(CharVocab::kIndexSpace, k);
  fill_uniform(p.embedding.values(), 0.05, rng);
  for (std::size_t h : config.filter_heights) {
    FilterBank bank;
    bank.height = h;
    bank.weights = Matrix(config.filters_per_height, h * k);
    const double fan_in = static_cast<double>(h * k);
    const double fan_out = static_cast<double>(config.filters_per_height);
    fill_uniform(bank.weights.values(), std::sqrt(6.0 / (fan_in + fan_out)), rng);
    if (config.use_bias) bank.bias.assign(config.filters_per_height, 0.0);
    p.banks.push_back(std::move(bank));
  }
  const std::size_t nf = config.num_filters();
  p.output_weights = Matrix(nf, config.num_classes);
  fill_uniform(p.output_weights.values(),
               std::sqrt(6.0 / static_cast<double>(nf + config.num_classes)), rng);
  if (config.use_bias) p.output_bias.assign(config.num_classes, 0.0);
  return p;
}

void check_shapes(const ModelParams& p, const ModelConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kShapeMismatch, what); };
  const std::size_t k = config.embedding_dim;
  if (p.embedding.rows() != CharVocab::kIndexSpace || p.embedding.cols() != k) {
    fail("embedding table shape does not match config");
  }
  if (p.banks.size() != config.filter_heights.size()) fail("filter bank count mismatch");
  for (std::size_t b = 0; b < p.banks.size(); ++b) {
    const auto& bank = p.banks[b];
    if (bank.height != config.filter_heights[b]) fail("filter bank height mismatch");
    if (bank.weights.rows() != config.filters_per_height ||
        bank.weights.cols() != bank.height * k) {
      fail("filter bank h" + std::to_string(bank.height) + " shape mismatch");
    }
    if (bank.bias.size() != (config.use_bias ? config.filters_per_height : 0)) {
      fail("filter bias presence does not match config");
    }
  }
  if (p.output_weights.rows() != config.num_filters() ||
      p.output_weights.cols() != config.num_classes) {
    fail("output weight shape mismatch");
  }
  if (p.output_bias.size() != (config.use_bias ? config.num_classes : 0)) {
    fail("output bias presence does not match config");
  }
}

FilterProjection::FilterProjection(const ModelParams& params) {
  const std::size_t k = params.embedding.cols();
  std::size_t total_rows = 0;
  for (const auto& bank : params.banks) {
    for (std::size_t j = 0; j < bank.weights.rows(); ++j) {
      row_offset_.push_back(total_rows);
      heights_.push_back(bank.height);
      total_rows += bank.height;
    }
  }
  data_.assign(total_rows * CharVocab::kIndexSpace, 0.0);
  std::size_t f = 0;
  for (const auto& bank : params.banks) {
    for (std::size_t j = 0; j < bank.weights.rows(); ++j, ++f) {
      const auto filter = bank.weights.row(j);
      for (std::size_t r = 0; r < bank.height; ++r) {
        const double* fr = filter.data() + r * k;
        double* out = data_.data() + (row_offset_[f] + r) * CharVocab::kIndexSpace;
        for (std::size_t v = 0; v < CharVocab::kIndexSpace; ++v) {
          const double* e = params.embedding.row(v).data();
          double s = 0.0;
          for (std::size_t c = 0; c < k; ++c) s += fr[c] * e[c];
          out[v] = s;
        }
      }
    }
  }
}

ForwardResult forward(const ModelParams& params, const ModelConfig& config,
                      const FilterProjection& projection, const IndexSequence& seq,
                      tensor::Mode mode, Rng& rng) {
  const std::size_t n = seq.indices.size();
  if (n != config.max_seq_len) {
    throw Error(ErrorCode::kShapeMismatch, "sequence length " + std::to_string(n) +
                                               " differs from max_seq_len " +
                                               std::to_string(config.max_seq_len));
  }
  if (projection.num_filters() != config.num_filters()) {
    throw Error(ErrorCode::kShapeMismatch, "filter projection does not match config");
  }
  for (std::uint8_t idx : seq.indices) {
    if (idx >= CharVocab::kIndexSpace) {
      throw Error(ErrorCode::kInvalidIndex, "sequence index outside the vocabulary");
    }
  }

  ForwardResult result;
  ActivationCache& cache = result.cache;
  const std::size_t nf = config.num_filters();
  cache.indices = seq.indices;
  cache.argmax.resize(nf);
  cache.pooled_pre_activation.resize(nf);
  cache.pooled.resize(nf);

  constexpr std::size_t V = CharVocab::kIndexSpace;
  const std::uint8_t* idx = seq.indices.data();
  std::size_t f = 0;
  for (const auto& bank : params.banks) {
    const std::size_t height = bank.height;
    if (height > n) {
      throw Error(ErrorCode::kInputTooShort, "filter taller than the input sequence");
    }
    const std::size_t out_len = n - height + 1;
    for (std::size_t j = 0; j < bank.weights.rows(); ++j, ++f) {
      const double* rows = projection.filter_rows(f).data();
      const double bias = bank.bias.empty() ? 0.0 : bank.bias[j];
      double best = 0.0;
      double best_pre = 0.0;
      std::size_t best_t = 0;
      for (std::size_t t = 0; t < out_len; ++t) {
        double s = bias;
        for (std::size_t r = 0; r < height; ++r) s += rows[r * V + idx[t + r]];
        const double y = s > 0.0 ? s : 0.0;
        if (t == 0 || y > best) {
          best = y;
          best_pre = s;
          best_t = t;
        }
      }
      cache.argmax[f] = best_t;
      cache.pooled_pre_activation[f] = best_pre;
      cache.pooled[f] = best;
    }
  }

  auto dropped = tensor::dropout_apply(cache.pooled, config.dropout_p, mode, rng);
  cache.dropout_mask = std::move(dropped.mask);
  cache.pooled_dropped = std::move(dropped.output);

  const std::size_t num_classes = params.output_weights.cols();
  cache.logits.assign(num_classes, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    const double zi = cache.pooled_dropped[i];
    if (zi == 0.0) continue;
    const auto w = params.output_weights.row(i);
    for (std::size_t c = 0; c < num_classes; ++c) cache.logits[c] += zi * w[c];
  }
  if (!params.output_bias.empty()) {
    for (std::size_t c = 0; c < num_classes; ++c) cache.logits[c] += params.output_bias[c];
  }

  Verdict& v = result.verdict;
  v.probs = tensor::softmax(cache.logits);
  const auto top = std::max_element(v.probs.begin(), v.probs.end());
  v.predicted = static_cast<Label>(top - v.probs.begin());
  v.confidence = *top;
  v.model_version = params.version;
  return result;
}

ForwardResult forward(const ModelParams& params, const ModelConfig& config,
                      const IndexSequence& seq, tensor::Mode mode, Rng& rng) {
  return forward(params, config, FilterProjection(params), seq, mode, rng);
}

double backward(const ModelParams& params, const ModelConfig& /*config*/,
                const ActivationCache& cache, Label target, double scale, ModelParams& grads) {
  const auto ce = tensor::softmax_cross_entropy(cache.logits, label_index(target));
  const std::size_t num_classes = params.output_weights.cols();
  const std::size_t k = params.embedding.cols();

  RealVector d_logits(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) d_logits[c] = scale * ce.d_logits[c];

  if (!grads.output_bias.empty()) {
    for (std::size_t c = 0; c < num_classes; ++c) grads.output_bias[c] += d_logits[c];
  }

  std::size_t f = 0;
  for (std::size_t b = 0; b < params.banks.size(); ++b) {
    const auto& bank = params.banks[b];
    auto& gbank = grads.banks[b];
    for (std::size_t j = 0; j < bank.weights.rows(); ++j, ++f) {
      const auto w = params.output_weights.row(f);
      auto dw = grads.output_weights.row(f);
      const double zd = cache.pooled_dropped[f];
      double d_zd = 0.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        dw[c] += zd * d_logits[c];
        d_zd += w[c] * d_logits[c];
      }
      // Dropout, then max-pool routing to the argmax, then ReLU gate.
      const double dz = d_zd * cache.dropout_mask[f];
      if (dz == 0.0 || cache.pooled_pre_activation[f] <= 0.0) continue;
      const std::size_t t = cache.argmax[f];
      const auto filter = bank.weights.row(j);
      auto d_filter = gbank.weights.row(j);
      for (std::size_t r = 0; r < bank.height; ++r) {
        const std::uint8_t v = cache.indices[t + r];
        const auto e = params.embedding.row(v);
        auto de = grads.embedding.row(v);
        for (std::size_t c = 0; c < k; ++c) {
          d_filter[r * k + c] += dz * e[c];
          de[c] += dz * filter[r * k + c];
        }
      }
      if (!gbank.bias.empty()) gbank.bias[j] += dz;
    }
  }
  return ce.loss;
}

Verdict predict(const ModelParams& params, const ModelConfig& config,
                const FilterProjection& projection, std::string_view raw_text) {
  Rng unused(0);
  const auto seq = encode_query(raw_text, config.max_seq_len);
  return forward(params, config, projection, seq, tensor::Mode::kEval, unused).verdict;
}

Verdict predict(const ModelParams& params, const ModelConfig& config, std::string_view raw_text) {
  return predict(params, config, FilterProjection(params), raw_text);
}

double embedding_distance(const ModelParams& params, char a, char b) {
  const auto ia = CharVocab::index_of(static_cast<unsigned char>(a));
  const auto ib = CharVocab::index_of(static_cast<unsigned char>(b));
  if (!ia || !ib) {
    throw Error(ErrorCode::kInvalidIndex, "embedding_distance needs in-vocabulary characters");
  }
  const auto ra = params.embedding.row(*ia);
  const auto rb = params.embedding.row(*ib);
  double sum = 0.0;
  for (std::size_t c = 0; c < ra.size(); ++c) {
    const double d = ra[c] - rb[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace qshield
