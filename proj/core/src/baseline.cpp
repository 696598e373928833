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

#include "qshield/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "qshield/error.hpp"
#include "qshield/vocab.hpp"

namespace qshield {

namespace {

std::vector<std::string> split_codepoints(std::string_view text) {
  // Keep each code point's original bytes so n-grams are byte substrings.
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    if ((b0 & 0xE0) == 0xC0) len = 2;
    else if ((b0 & 0xF0) == 0xE0) len = 3;
    else if ((b0 & 0xF8) == 0xF0) len = 4;
    if (pos + len > text.size()) len = 1;
    for (std::size_t i = 1; i < len; ++i) {
      if ((static_cast<unsigned char>(text[pos + i]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(pos, len));
    pos += len;
  }
  return out;
}

std::vector<std::string> prepared_texts(const Corpus& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(percent_decode(s.text));
  return out;
}

}  // namespace

std::vector<std::string> char_ngrams(std::string_view text, std::size_t min_n, std::size_t max_n) {
  const auto cps = split_codepoints(text);
  std::vector<std::string> grams;
  for (std::size_t n = min_n; n <= max_n; ++n) {
    if (n == 0 || n > cps.size()) continue;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string g;
      for (std::size_t j = 0; j < n; ++j) g += cps[i + j];
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

TfidfVocabulary tfidf_fit(std::span<const std::string> documents, std::size_t min_n,
                          std::size_t max_n) {
  if (min_n == 0 || min_n > max_n) throw Error(ErrorCode::kConfig, "invalid n-gram range");
  if (documents.empty()) throw Error(ErrorCode::kConfig, "cannot fit TF-IDF on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    const auto grams = char_ngrams(doc, min_n, max_n);
    const std::set<std::string> unique(grams.begin(), grams.end());
    for (const auto& g : unique) ++df[g];
  }
  TfidfVocabulary v;
  v.min_n = min_n;
  v.max_n = max_n;
  v.num_documents = documents.size();
  const double n_docs = static_cast<double>(documents.size());
  for (const auto& [term, count] : df) {
    v.column.emplace(term, v.terms.size());
    v.terms.push_back(term);
    v.df.push_back(count);
    v.idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return v;
}

SparseVector tfidf_transform(const TfidfVocabulary& vocab, std::string_view text) {
  std::map<std::size_t, double> counts;
  for (const auto& g : char_ngrams(text, vocab.min_n, vocab.max_n)) {
    const auto it = vocab.column.find(g);
    if (it != vocab.column.end()) counts[it->second] += 1.0;
  }
  SparseVector out;
  double norm_sq = 0.0;
  for (const auto& [col, count] : counts) {
    const double w = count * vocab.idf[col];
    out.entries.emplace_back(col, w);
    norm_sq += w * w;
  }
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (auto& e : out.entries) e.second /= norm;
  }
  return out;
}

namespace {

tensor::RealVector linear_logits(const BaselineModel& m, const SparseVector& x) {
  tensor::RealVector logits = m.bias;
  for (const auto& [col, w] : x.entries) {
    const auto row = m.weights.row(col);
    for (std::size_t c = 0; c < kNumClasses; ++c) logits[c] += w * row[c];
  }
  return logits;
}

Label argmax_label(const tensor::RealVector& logits) {
  return static_cast<Label>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace

BaselineModel baseline_train(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  if (corpus.empty()) throw Error(ErrorCode::kConfig, "training corpus is empty");
  const auto texts = prepared_texts(corpus);
  BaselineModel m;
  m.vocab = tfidf_fit(texts);
  m.weights = tensor::Matrix(m.vocab.size(), kNumClasses);
  m.bias.assign(kNumClasses, 0.0);

  std::vector<SparseVector> features;
  features.reserve(texts.size());
  for (const auto& t : texts) features.push_back(tfidf_transform(m.vocab, t));

  Rng rng(config.seed);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Dense Adam state over weights followed by bias.
  const std::size_t nw = m.weights.size();
  std::vector<double> grad(nw + kNumClasses), mom(grad.size()), vel(grad.size());
  std::size_t t = 0;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double ce = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto logits = linear_logits(m, features[i]);
        const auto sce = tensor::softmax_cross_entropy(logits, label_index(corpus[i].label));
        ce += sce.loss * scale;
        for (const auto& [col, w] : features[i].entries) {
          for (std::size_t c = 0; c < kNumClasses; ++c) {
            grad[col * kNumClasses + c] += scale * w * sce.d_logits[c];
          }
        }
        for (std::size_t c = 0; c < kNumClasses; ++c) grad[nw + c] += scale * sce.d_logits[c];
      }
      const std::span<const double> weight_values = m.weights.values();
      const auto l2 = tensor::l2_penalty(std::span(&weight_values, 1), config.lambda);
      for (std::size_t j = 0; j < nw; ++j) grad[j] += l2.gradients[0][j];
      if (!std::isfinite(ce + l2.penalty)) {
        throw Error(ErrorCode::kDivergedTraining,
                    "baseline training diverged at step " + std::to_string(step));
      }

      ++t;
      auto param = [&](std::size_t j) -> double& {
        return j < nw ? m.weights.values()[j] : m.bias[j - nw];
      };
      if (config.optimizer == OptimizerKind::kSgd) {
        for (std::size_t j = 0; j < grad.size(); ++j) param(j) -= config.learning_rate * grad[j];
      } else {
        const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
        for (std::size_t j = 0; j < grad.size(); ++j) {
          mom[j] = config.beta1 * mom[j] + (1.0 - config.beta1) * grad[j];
          vel[j] = config.beta2 * vel[j] + (1.0 - config.beta2) * grad[j] * grad[j];
          param(j) -= config.learning_rate * (mom[j] / c1) /
                      (std::sqrt(vel[j] / c2) + config.adam_epsilon);
        }
      }
      ++step;
    }
  }
  return m;
}

Label baseline_predict(const BaselineModel& model, std::string_view raw_text) {
  return argmax_label(linear_logits(model, tfidf_transform(model.vocab, percent_decode(raw_text))));
}

MetricsReport baseline_train_eval(const Corpus& train, const Corpus& test, const TrainConfig& config) {
  if (test.empty()) throw Error(ErrorCode::kConfig, "test corpus is empty");
  const auto model = baseline_train(train, config);
  std::vector<Label> actual, predicted;
  for (const auto& s : test) {
    actual.push_back(s.label);
    predicted.push_back(baseline_predict(model, s.text));
  }
  return metrics_from_confusion(confusion_from_predictions(actual, predicted), "baseline");
}

}  // namespace qshield
