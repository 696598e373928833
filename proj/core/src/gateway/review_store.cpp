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

#include "qshield/gateway/review_store.hpp"

#include <algorithm>
#include <charconv>

#include "json_codec.hpp"

namespace qshield::gateway {

using nlohmann::json;

std::string_view review_status_name(ReviewStatus status) {
  switch (status) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kLabeled: return "labeled";
    case ReviewStatus::kDiscarded: return "discarded";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kMaxPageSize = 1000;

std::string item_id(std::uint64_t seq) { return "r" + std::to_string(seq); }

}  // namespace

ReviewStore::ReviewStore(std::filesystem::path file, Journal& journal)
    : file_(std::move(file)), journal_(journal) {
  auto recovered = recover_jsonl(file_);
  warnings_ = std::move(recovered.warnings);
  for (std::size_t i = 0; i < recovered.lines.size(); ++i) {
    const bool last = i + 1 == recovered.lines.size();
    try {
      const json ev = json::parse(recovered.lines[i]);
      const auto op = ev.at("op").get<std::string>();
      if (op == "capture") {
        ReviewItem item = review_item_from_json(ev.at("item"));
        next_seq_ = std::max(next_seq_, item.seq + 1);
        by_id_[item.id] = items_.size();
        items_.push_back(std::move(item));
        ++pending_;
      } else if (op == "resolve") {
        const auto it = by_id_.find(ev.at("id").get<std::string>());
        if (it == by_id_.end()) throw Error(ErrorCode::kMalformedRecord, "resolve of unknown item");
        auto& item = items_[it->second];
        if (item.status != ReviewStatus::kPending) continue;
        if (ev.at("status").get<std::string>() == "labeled") {
          const auto label = parse_label(ev.at("label").get<std::string>());
          if (!label) throw Error(ErrorCode::kUnknownLabel, "unknown label in review journal");
          item.status = ReviewStatus::kLabeled;
          item.assigned_label = label;
        } else {
          item.status = ReviewStatus::kDiscarded;
        }
        item.updated_at = ev.value("ts", item.updated_at);
        --pending_;
      }
    } catch (const std::exception& e) {
      if (!last) {
        throw Error(ErrorCode::kMalformedRecord,
                    file_.string() + " line " + std::to_string(i + 1) + ": " + e.what());
      }
      warnings_.push_back(file_.filename().string() + ": ignored unreadable final record");
    }
  }
}

ReviewItem ReviewStore::capture(std::string text, const Verdict& verdict) {
  ReviewItem item;
  item.text = std::move(text);
  item.predicted = verdict.predicted;
  item.probs = verdict.probs;
  item.confidence = verdict.confidence;
  item.model_version = verdict.model_version;
  item.created_at = now_rfc3339();
  item.updated_at = item.created_at;
  std::lock_guard lock(mu_);
  item.seq = next_seq_++;
  item.id = item_id(item.seq);
  by_id_[item.id] = items_.size();
  items_.push_back(item);
  ++pending_;
  // Appended while holding the lock so file order matches seq order.
  journal_.append(file_, json{{"op", "capture"}, {"item", review_item_json(item)}}.dump(
                             -1, ' ', false, json::error_handler_t::replace));
  return item;
}

ReviewPage ReviewStore::list_pending(std::size_t limit,
                                     const std::optional<std::string>& cursor) const {
  std::uint64_t from = 0;
  if (cursor && !cursor->empty()) {
    const char* b = cursor->data();
    const char* e = b + cursor->size();
    const auto [ptr, ec] = std::from_chars(b, e, from);
    if (ec != std::errc() || ptr != e) {
      throw Error(ErrorCode::kBadCursor, "malformed cursor \"" + *cursor + "\"");
    }
  }
  limit = std::clamp<std::size_t>(limit == 0 ? 50 : limit, 1, kMaxPageSize);
  ReviewPage page;
  std::lock_guard lock(mu_);
  auto it = std::lower_bound(items_.begin(), items_.end(), from,
                             [](const ReviewItem& item, std::uint64_t s) { return item.seq < s; });
  for (; it != items_.end(); ++it) {
    if (it->status != ReviewStatus::kPending) continue;
    if (page.items.size() == limit) {
      page.next_cursor = std::to_string(it->seq);
      break;
    }
    page.items.push_back(*it);
  }
  return page;
}

ReviewItem ReviewStore::resolve(const std::string& id, std::optional<Label> label) {
  std::lock_guard lock(mu_);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::kNotFound, "no review item \"" + id + "\"");
  ReviewItem& item = items_[it->second];
  if (item.status != ReviewStatus::kPending) {
    throw Error(ErrorCode::kConflict, "review item \"" + id + "\" is already " +
                                          std::string(review_status_name(item.status)));
  }
  item.status = label ? ReviewStatus::kLabeled : ReviewStatus::kDiscarded;
  item.assigned_label = label;
  item.updated_at = now_rfc3339();
  --pending_;
  json ev = {{"op", "resolve"},
             {"id", id},
             {"status", review_status_name(item.status)},
             {"ts", item.updated_at}};
  if (label) ev["label"] = label_name(*label);
  journal_.append_durable(file_, ev.dump());
  return item;
}

std::optional<ReviewItem> ReviewStore::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return items_[it->second];
}

std::size_t ReviewStore::pending_count() const {
  std::lock_guard lock(mu_);
  return pending_;
}

std::size_t ReviewStore::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

LabeledDatabase::LabeledDatabase(std::filesystem::path file, Journal& journal)
    : file_(std::move(file)), journal_(journal) {
  auto recovered = recover_jsonl(file_);
  warnings_ = std::move(recovered.warnings);
  for (std::size_t i = 0; i < recovered.lines.size(); ++i) {
    try {
      samples_.push_back(sample_from_json(recovered.lines[i]));
    } catch (const Error& e) {
      if (i + 1 != recovered.lines.size()) {
        throw Error(e.code(), file_.string() + " line " + std::to_string(i + 1) + ": " + e.what());
      }
      warnings_.push_back(file_.filename().string() + ": ignored unreadable final record");
    }
  }
}

void LabeledDatabase::seed_if_empty(const Corpus& seed) {
  std::lock_guard lock(mu_);
  if (!samples_.empty() || std::filesystem::exists(file_)) return;
  save_corpus(seed, file_);
  samples_ = seed;
}

void LabeledDatabase::append(LabeledSample sample) {
  std::lock_guard lock(mu_);
  journal_.append_durable(file_, sample_to_json(sample));
  samples_.push_back(std::move(sample));
}

Corpus LabeledDatabase::snapshot() const {
  std::lock_guard lock(mu_);
  return samples_;
}

std::size_t LabeledDatabase::size() const {
  std::lock_guard lock(mu_);
  return samples_.size();
}

CorpusStats LabeledDatabase::stats() const {
  std::lock_guard lock(mu_);
  return corpus_stats(samples_);
}

}  // namespace qshield::gateway
