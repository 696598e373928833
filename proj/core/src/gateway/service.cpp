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

#include "qshield/gateway/service.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <regex>

#include "qshield/error.hpp"
#include "qshield/model_io.hpp"
#include "qshield/trainer.hpp"

namespace qshield::gateway {

namespace {

std::filesystem::path prepare_dirs(const ServiceConfig& config) {
  config.validate();
  const auto models = config.data_dir / "models";
  std::filesystem::create_directories(models);
  return models;
}

// Model files in descending version order.
std::vector<std::pair<std::uint64_t, std::filesystem::path>> list_models(
    const std::filesystem::path& dir) {
  static const std::regex pattern(R"(model-v(\d+)\.ccnn)");
  std::vector<std::pair<std::uint64_t, std::filesystem::path>> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) out.emplace_back(std::stoull(m[1].str()), entry.path());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

}  // namespace

std::string_view retrain_state_name(RetrainState state) {
  switch (state) {
    case RetrainState::kIdle: return "idle";
    case RetrainState::kRunning: return "running";
    case RetrainState::kFailed: return "failed";
  }
  return "unknown";
}

std::filesystem::path GatewayService::model_path(const std::filesystem::path& data_dir,
                                                 std::uint64_t version) {
  char name[48];
  std::snprintf(name, sizeof name, "model-v%06llu.ccnn", static_cast<unsigned long long>(version));
  return data_dir / "models" / name;
}

GatewayService::GatewayService(Options options)
    : config_(std::move(options.config)),
      models_dir_(prepare_dirs(config_)),
      queue_(config_.data_dir / "queue.jsonl", journal_),
      labeled_(config_.data_dir / "labeled.jsonl", journal_),
      sample_rng_(config_.seed) {
  warnings_ = queue_.recovery_warnings();
  warnings_.insert(warnings_.end(), labeled_.recovery_warnings().begin(),
                   labeled_.recovery_warnings().end());

  if (options.seed_corpus) labeled_.seed_if_empty(load_corpus(*options.seed_corpus));

  for (const auto& [version, path] : list_models(models_dir_)) {
    try {
      auto loaded = load_model(path);
      publish(std::make_shared<const ModelSnapshot>(std::move(loaded.params),
                                                    std::move(loaded.config)));
      break;
    } catch (const Error& e) {
      warnings_.push_back("skipping unreadable model " + path.filename().string() + ": " + e.what());
    }
  }
  if (!snapshot() && options.initial_model) {
    auto loaded = load_model(*options.initial_model);
    save_model(loaded.params, loaded.config, model_path(config_.data_dir, loaded.params.version));
    publish(std::make_shared<const ModelSnapshot>(std::move(loaded.params),
                                                  std::move(loaded.config)));
  }
  for (const auto& w : warnings_) std::clog << "qshield: warning: " << w << '\n';
}

GatewayService::~GatewayService() {
  std::thread t;
  {
    std::lock_guard lock(retrain_mu_);
    t = std::move(retrain_thread_);
  }
  if (t.joinable()) t.join();
}

std::shared_ptr<const ModelSnapshot> GatewayService::snapshot() const {
  return std::atomic_load(&active_);
}

void GatewayService::publish(std::shared_ptr<const ModelSnapshot> snap) {
  std::atomic_store(&active_, std::move(snap));
}

ClassifyResponse GatewayService::classify(std::string_view text) {
  if (text.size() > config_.max_body_bytes) {
    throw Error(ErrorCode::kRejected, "request text of " + std::to_string(text.size()) +
                                          " bytes exceeds the " +
                                          std::to_string(config_.max_body_bytes) + " byte cap");
  }
  const auto snap = snapshot();
  if (!snap) throw Error(ErrorCode::kUnavailable, "no detection model is loaded");

  const auto seq = encode_query(text, snap->config.max_seq_len);
  Rng unused(0);
  ClassifyResponse response;
  response.verdict =
      forward(snap->params, snap->config, snap->projection, seq, tensor::Mode::kEval, unused).verdict;
  response.decision = config_.blocks(response.verdict.predicted) ? Decision::kBlock : Decision::kAllow;

  counters_.requests.fetch_add(1, std::memory_order_relaxed);
  if (response.decision == Decision::kBlock) counters_.blocks.fetch_add(1, std::memory_order_relaxed);
  if (seq.truncated) counters_.truncations.fetch_add(1, std::memory_order_relaxed);

  if (response.verdict.confidence < config_.confidence_threshold) {
    counters_.low_confidence.fetch_add(1, std::memory_order_relaxed);
    bool take;
    {
      std::lock_guard lock(sample_mu_);
      take = sample_rng_.bernoulli(config_.sampling_rate);
    }
    if (take) {
      const auto item = queue_.capture(std::string(text), response.verdict);
      counters_.captures.fetch_add(1, std::memory_order_relaxed);
      response.captured = true;
      response.review_id = item.id;
    }
  }
  return response;
}

ReviewPage GatewayService::list_pending(std::size_t limit,
                                        const std::optional<std::string>& cursor) const {
  return queue_.list_pending(limit, cursor);
}

ReviewItem GatewayService::submit_label(const std::string& id, std::string_view label) {
  std::optional<Label> parsed;
  if (label != "discard") {
    parsed = parse_label(label);
    if (!parsed) {
      throw Error(ErrorCode::kUnknownLabel, "unknown label \"" + std::string(label) + "\"");
    }
  }
  ReviewItem item = queue_.resolve(id, parsed);
  if (!parsed) {
    counters_.discards.fetch_add(1, std::memory_order_relaxed);
    return item;
  }
  labeled_.append({"review-" + item.id, item.text, *parsed, SampleSource::kReview, item.updated_at});
  counters_.labels.fetch_add(1, std::memory_order_relaxed);

  bool start = false;
  {
    std::lock_guard lock(retrain_mu_);
    ++new_labels_;
    start = config_.auto_retrain && new_labels_ >= config_.retrain_trigger_count &&
            retrain_state_ != RetrainState::kRunning;
  }
  if (start) {
    try {
      trigger_retrain(RetrainTrigger::kAuto);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConflict) throw;
    }
  }
  return item;
}

void GatewayService::trigger_retrain(RetrainTrigger /*trigger*/) {
  std::lock_guard lock(retrain_mu_);
  if (retrain_state_ == RetrainState::kRunning) {
    throw Error(ErrorCode::kConflict, "a retrain is already running");
  }
  if (!snapshot()) throw Error(ErrorCode::kUnavailable, "no model to retrain from");
  // The previous worker has already recorded its outcome; reap it.
  if (retrain_thread_.joinable()) retrain_thread_.join();
  retrain_state_ = RetrainState::kRunning;
  retrain_error_.clear();
  const std::size_t labels_at_start = new_labels_;
  retrain_thread_ = std::thread([this, labels_at_start] { run_retrain(labels_at_start); });
}

void GatewayService::run_retrain(std::size_t labels_at_start) {
  try {
    const auto base = snapshot();
    const Corpus corpus = labeled_.snapshot();
    auto result = warm_start_retrain(base->params, base->config, corpus, config_.retrain);
    swap_model(std::move(result.params));
    std::lock_guard lock(retrain_mu_);
    new_labels_ -= std::min(new_labels_, labels_at_start);
    retrain_state_ = RetrainState::kIdle;
    counters_.retrains_succeeded.fetch_add(1, std::memory_order_relaxed);
  } catch (const std::exception& e) {
    std::lock_guard lock(retrain_mu_);
    retrain_state_ = RetrainState::kFailed;
    retrain_error_ = e.what();
    counters_.retrains_failed.fetch_add(1, std::memory_order_relaxed);
  }
}

void GatewayService::wait_for_retrain() {
  std::thread t;
  {
    std::lock_guard lock(retrain_mu_);
    t = std::move(retrain_thread_);
  }
  if (t.joinable()) t.join();
}

void GatewayService::swap_model(ModelParams params) {
  std::lock_guard lock(swap_mu_);
  const auto current = snapshot();
  if (!current) throw Error(ErrorCode::kUnavailable, "no active model to replace");
  if (params.version != current->params.version + 1) {
    throw Error(ErrorCode::kRejected, "model version " + std::to_string(params.version) +
                                          " does not follow active version " +
                                          std::to_string(current->params.version));
  }
  if (params.vocab_hash != CharVocab::hash()) {
    throw Error(ErrorCode::kRejected, "model vocabulary does not match the service vocabulary");
  }
  try {
    check_shapes(params, current->config);
  } catch (const Error& e) {
    throw Error(ErrorCode::kRejected, std::string("model shape rejected: ") + e.what());
  }
  // Serve exactly what was persisted (f32-rounded) so captures replay from disk.
  const auto path = model_path(config_.data_dir, params.version);
  save_model(params, current->config, path);
  publish(std::make_shared<const ModelSnapshot>(load_model(path).params, current->config));
}

Counters GatewayService::counters() const {
  Counters c;
  c.requests = counters_.requests.load();
  c.blocks = counters_.blocks.load();
  c.truncations = counters_.truncations.load();
  c.low_confidence = counters_.low_confidence.load();
  c.captures = counters_.captures.load();
  c.labels = counters_.labels.load();
  c.discards = counters_.discards.load();
  c.retrains_succeeded = counters_.retrains_succeeded.load();
  c.retrains_failed = counters_.retrains_failed.load();
  return c;
}

StatusReport GatewayService::status() const {
  StatusReport s;
  if (const auto snap = snapshot()) s.model_version = snap->params.version;
  s.queue_depth = queue_.pending_count();
  s.labeled_db_size = labeled_.size();
  s.labeled_counts = labeled_.stats();
  {
    std::lock_guard lock(retrain_mu_);
    s.retrain_state = retrain_state_;
    s.retrain_error = retrain_error_;
    s.new_labels_since_retrain = new_labels_;
  }
  s.counters = counters();
  return s;
}

void GatewayService::flush() { journal_.flush(); }

}  // namespace qshield::gateway
