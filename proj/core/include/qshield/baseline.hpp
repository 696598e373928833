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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qshield/dataset.hpp"
#include "qshield/metrics.hpp"
#include "qshield/tensor.hpp"
#include "qshield/trainer.hpp"

namespace qshield {

// Character n-gram TF-IDF with smoothed idf:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
struct TfidfVocabulary {
  std::size_t min_n = 1;
  std::size_t max_n = 3;
  std::size_t num_documents = 0;
  std::vector<std::string> terms;  // column order (lexicographic)
  std::vector<std::size_t> df;
  std::vector<double> idf;
  std::unordered_map<std::string, std::size_t> column;

  std::size_t size() const { return terms.size(); }
};

struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;  // strictly increasing index
};

// All character n-grams of `text` for n in [min_n, max_n], with repeats.
std::vector<std::string> char_ngrams(std::string_view text, std::size_t min_n, std::size_t max_n);

TfidfVocabulary tfidf_fit(std::span<const std::string> documents, std::size_t min_n = 1,
                          std::size_t max_n = 3);

// Raw counts times idf, L2-normalized. Unseen n-grams are ignored.
SparseVector tfidf_transform(const TfidfVocabulary& vocab, std::string_view text);

// Linear softmax classifier over TF-IDF features.
struct BaselineModel {
  TfidfVocabulary vocab;
  tensor::Matrix weights;     // |terms| x kNumClasses
  tensor::RealVector bias;    // kNumClasses
};

// Fits TF-IDF on the training texts and trains the classifier from zero
// weights with the same optimizer settings the CNN trainer uses.
BaselineModel baseline_train(const Corpus& corpus, const TrainConfig& config);
Label baseline_predict(const BaselineModel& model, std::string_view raw_text);

MetricsReport baseline_train_eval(const Corpus& train, const Corpus& test, const TrainConfig& config);

}  // namespace qshield
