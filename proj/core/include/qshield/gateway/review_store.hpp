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
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qshield/dataset.hpp"
#include "qshield/gateway/journal.hpp"
#include "qshield/model.hpp"

namespace qshield::gateway {

enum class ReviewStatus { kPending, kLabeled, kDiscarded };

std::string_view review_status_name(ReviewStatus status);

struct ReviewItem {
  std::string id;
  std::uint64_t seq = 0;  // capture order
  std::string text;
  Label predicted = Label::kBenign;
  std::vector<double> probs;
  double confidence = 0.0;
  std::uint64_t model_version = 0;
  ReviewStatus status = ReviewStatus::kPending;
  std::optional<Label> assigned_label;  // present iff labeled
  std::string created_at;
  std::string updated_at;
};

struct ReviewPage {
  std::vector<ReviewItem> items;
  std::optional<std::string> next_cursor;
};

// Low-confidence captures awaiting a human label. State is an in-memory view
// over an append-only event file (capture / resolve records).
class ReviewStore {
 public:
  ReviewStore(std::filesystem::path file, Journal& journal);

  ReviewItem capture(std::string text, const Verdict& verdict);

  // Pending items in capture order starting at `cursor` (an opaque token
  // from a previous page). Throws Error(kBadCursor).
  ReviewPage list_pending(std::size_t limit, const std::optional<std::string>& cursor) const;

  // Labels (`label` set) or discards an item. Throws Error(kNotFound) for an
  // unknown id and Error(kConflict) if the item is no longer pending.
  ReviewItem resolve(const std::string& id, std::optional<Label> label);

  std::optional<ReviewItem> find(const std::string& id) const;
  std::size_t pending_count() const;
  std::size_t size() const;
  const std::vector<std::string>& recovery_warnings() const { return warnings_; }

 private:
  std::filesystem::path file_;
  Journal& journal_;
  mutable std::mutex mu_;
  std::vector<ReviewItem> items_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::uint64_t next_seq_ = 0;
  std::size_t pending_ = 0;
  std::vector<std::string> warnings_;
};

// Append-only labeled database backing retraining.
class LabeledDatabase {
 public:
  LabeledDatabase(std::filesystem::path file, Journal& journal);

  // Writes the seed corpus if the database file does not exist yet.
  void seed_if_empty(const Corpus& seed);

  void append(LabeledSample sample);
  Corpus snapshot() const;
  std::size_t size() const;
  CorpusStats stats() const;
  const std::vector<std::string>& recovery_warnings() const { return warnings_; }

 private:
  std::filesystem::path file_;
  Journal& journal_;
  mutable std::mutex mu_;
  Corpus samples_;
  std::vector<std::string> warnings_;
};

}  // namespace qshield::gateway
