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

// Gateway fixtures: tiny models whose verdicts are fixed by the output bias,
// so capture, blocking and swap behaviour can be scripted exactly.

#pragma once

#include <array>
#include <cmath>
#include <filesystem>

#include "qshield/gateway/service.hpp"
#include "qshield/model_io.hpp"
#include "qshield/synthetic.hpp"

namespace qshield::testing {

inline ModelConfig bias_config() {
  ModelConfig c;
  c.embedding_dim = 4;
  c.filter_heights = {2, 3};
  c.filters_per_height = 2;
  c.max_seq_len = 32;
  c.use_bias = true;
  return c;
}

// Filters and output weights are zero, so logits equal `logits` for every
// input.
inline ModelParams fixed_model(const std::array<double, kNumClasses>& logits,
                               std::uint64_t version = 0) {
  ModelParams p = init_params(bias_config());
  for (auto& bank : p.banks) bank.weights.fill(0.0);
  p.output_weights.fill(0.0);
  p.output_bias.assign(logits.begin(), logits.end());
  p.version = version;
  return p;
}

// Logits giving `label` probability `confidence`, the rest shared evenly.
inline std::array<double, kNumClasses> logits_for(Label label, double confidence) {
  std::array<double, kNumClasses> z{};
  z[label_index(label)] = std::log(confidence * (kNumClasses - 1) / (1.0 - confidence));
  return z;
}

inline std::filesystem::path write_model(const std::filesystem::path& path, const ModelParams& p) {
  save_model(p, bias_config(), path);
  return path;
}

inline gateway::ServiceConfig service_config(const std::filesystem::path& data_dir) {
  gateway::ServiceConfig c;
  c.data_dir = data_dir;
  c.retrain.epochs = 1;
  c.retrain.batch_size = 16;
  c.retrain.learning_rate = 0.05;
  return c;
}

inline ModelParams random_model(std::uint64_t seed, double scale = 0.3) {
  ModelParams p = init_params(bias_config());
  Rng rng(seed);
  for (auto& t : tensors(p))
    for (double& v : t.values) v = rng.uniform(-scale, scale);
  return p;
}

inline Corpus small_seed_corpus() { return generate_synthetic({8, 4, 4, 4, 4}, 1); }

}  // namespace qshield::testing
