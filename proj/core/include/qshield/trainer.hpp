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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qshield/dataset.hpp"
#include "qshield/metrics.hpp"
#include "qshield/model.hpp"

namespace qshield {

enum class OptimizerKind { kSgd, kAdam };

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // L2 coefficient on convolution filters and output weights.
  double lambda = 1e-4;
  std::uint64_t seed = 20190101;
  // 0 disables early stopping. Needs a validation corpus.
  std::size_t early_stop_patience = 0;

  void validate() const;
};

struct TrainStep {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double ce_loss = 0.0;
  double l2_penalty = 0.0;
  double total = 0.0;
  // Corpus positions of the samples in this step's batch.
  std::vector<std::size_t> batch;
};

struct EpochSummary {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> validation_loss;
  std::optional<MetricsReport> validation;
};

struct TrainHistory {
  std::vector<TrainStep> steps;
  std::vector<EpochSummary> epochs;
  bool early_stopped = false;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

using StepCallback = std::function<void(const TrainStep&)>;

// Mini-batch training: each epoch shuffles the corpus (seeded) and walks it
// in batches; each batch is one optimizer step on the mean cross-entropy
// plus the L2 penalty. The returned params carry init.version + 1.
// Throws Error(kDivergedTraining) naming the step if the loss goes
// non-finite.
TrainResult train(const ModelParams& init, const ModelConfig& model_config, const Corpus& corpus,
                  const TrainConfig& config, const Corpus* validation = nullptr,
                  const StepCallback& on_step = {});

// Same as train, starting from the deployed model with fresh optimizer state.
// `updated_corpus` is the whole labeled database, not just the new labels.
TrainResult warm_start_retrain(const ModelParams& old, const ModelConfig& model_config,
                               const Corpus& updated_corpus, const TrainConfig& config);

std::vector<Label> predict_labels(const ModelParams& params, const ModelConfig& config,
                                  const Corpus& corpus);

MetricsReport evaluate(const ModelParams& params, const ModelConfig& config, const Corpus& corpus);

// step,ce_loss,l2_penalty,total
void write_history_csv(std::ostream& out, const TrainHistory& history);

}  // namespace qshield
