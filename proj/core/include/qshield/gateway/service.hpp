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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qshield/gateway/journal.hpp"
#include "qshield/gateway/review_store.hpp"
#include "qshield/gateway/service_config.hpp"
#include "qshield/model.hpp"
#include "qshield/random.hpp"

namespace qshield::gateway {

// Immutable model published to classifiers. Replaced as a whole on swap.
struct ModelSnapshot {
  ModelParams params;
  ModelConfig config;
  FilterProjection projection;

  ModelSnapshot(ModelParams p, ModelConfig c)
      : params(std::move(p)), config(std::move(c)), projection(params) {}
};

enum class Decision { kAllow, kBlock };

struct ClassifyResponse {
  Decision decision = Decision::kAllow;
  Verdict verdict;
  bool captured = false;
  std::optional<std::string> review_id;
};

enum class RetrainState { kIdle, kRunning, kFailed };

std::string_view retrain_state_name(RetrainState state);

struct Counters {
  std::uint64_t requests = 0;
  std::uint64_t blocks = 0;
  std::uint64_t truncations = 0;
  std::uint64_t low_confidence = 0;
  std::uint64_t captures = 0;
  std::uint64_t labels = 0;
  std::uint64_t discards = 0;
  std::uint64_t retrains_succeeded = 0;
  std::uint64_t retrains_failed = 0;
};

struct StatusReport {
  std::optional<std::uint64_t> model_version;
  std::size_t queue_depth = 0;
  std::size_t labeled_db_size = 0;
  CorpusStats labeled_counts;
  RetrainState retrain_state = RetrainState::kIdle;
  std::string retrain_error;
  std::size_t new_labels_since_retrain = 0;
  Counters counters;
};

enum class RetrainTrigger { kManual, kAuto };

// The online detection service: classification against an atomically
// swappable model snapshot, low-confidence capture into the review queue,
// human labels into the labeled database, and background warm-start
// retraining.
//
// Data directory layout:
//   labeled.jsonl          labeled database (append-only)
//   queue.jsonl            review queue events (append-only)
//   models/model-v<N>.ccnn one file per published model version
class GatewayService {
 public:
  struct Options {
    ServiceConfig config;
    // Used when the data directory holds no model yet.
    std::optional<std::filesystem::path> initial_model;
    // Written to labeled.jsonl when the database does not exist yet.
    std::optional<std::filesystem::path> seed_corpus;
  };

  explicit GatewayService(Options options);
  ~GatewayService();

  GatewayService(const GatewayService&) = delete;
  GatewayService& operator=(const GatewayService&) = delete;

  // Throws Error(kRejected) for oversized input, Error(kUnavailable) when no
  // model is loaded.
  ClassifyResponse classify(std::string_view text);

  ReviewPage list_pending(std::size_t limit, const std::optional<std::string>& cursor) const;

  // `label` is a class name or "discard". Throws kNotFound, kConflict, or
  // kUnknownLabel.
  ReviewItem submit_label(const std::string& id, std::string_view label);

  // Starts a warm-start retrain in the background. Throws Error(kConflict)
  // if one is already running.
  void trigger_retrain(RetrainTrigger trigger = RetrainTrigger::kManual);

  // Blocks until no retrain is running.
  void wait_for_retrain();

  // Publishes `params` as the active model. Requires version = active + 1
  // and a matching vocabulary; throws Error(kRejected) otherwise. The model
  // is persisted before it becomes visible.
  void swap_model(ModelParams params);

  std::shared_ptr<const ModelSnapshot> snapshot() const;

  StatusReport status() const;
  Counters counters() const;

  const ServiceConfig& config() const { return config_; }
  const std::vector<std::string>& recovery_warnings() const { return warnings_; }

  // Waits until queued journal appends are on disk.
  void flush();

  static std::filesystem::path model_path(const std::filesystem::path& data_dir,
                                          std::uint64_t version);

 private:
  void publish(std::shared_ptr<const ModelSnapshot> snap);
  void run_retrain(std::size_t labels_at_start);

  ServiceConfig config_;
  std::filesystem::path models_dir_;
  Journal journal_;
  ReviewStore queue_;
  LabeledDatabase labeled_;
  std::vector<std::string> warnings_;

  std::shared_ptr<const ModelSnapshot> active_;  // accessed via std::atomic_load/store
  std::mutex swap_mu_;

  mutable std::mutex sample_mu_;
  Rng sample_rng_;

  mutable std::mutex retrain_mu_;
  RetrainState retrain_state_ = RetrainState::kIdle;
  std::string retrain_error_;
  std::size_t new_labels_ = 0;
  std::thread retrain_thread_;

  struct AtomicCounters {
    std::atomic<std::uint64_t> requests{0}, blocks{0}, truncations{0}, low_confidence{0},
        captures{0}, labels{0}, discards{0}, retrains_succeeded{0}, retrains_failed{0};
  };
  AtomicCounters counters_;
};

}  // namespace qshield::gateway
