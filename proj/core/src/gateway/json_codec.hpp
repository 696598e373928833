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

// JSON encodings shared by the review store journal and the HTTP API.

#pragma once

#include "json.hpp"
#include "qshield/error.hpp"
#include "qshield/gateway/review_store.hpp"

namespace qshield::gateway {

inline nlohmann::json review_item_json(const ReviewItem& item) {
  nlohmann::json j = {
      {"id", item.id},
      {"seq", item.seq},
      {"text", item.text},
      {"predicted_class", label_name(item.predicted)},
      {"probs", item.probs},
      {"confidence", item.confidence},
      {"model_version", item.model_version},
      {"status", review_status_name(item.status)},
      {"assigned_label", nullptr},
      {"created_at", item.created_at},
      {"updated_at", item.updated_at},
  };
  if (item.assigned_label) j["assigned_label"] = label_name(*item.assigned_label);
  return j;
}

inline ReviewItem review_item_from_json(const nlohmann::json& j) {
  ReviewItem item;
  item.id = j.at("id").get<std::string>();
  item.seq = j.at("seq").get<std::uint64_t>();
  item.text = j.at("text").get<std::string>();
  const auto predicted = parse_label(j.at("predicted_class").get<std::string>());
  if (!predicted) throw Error(ErrorCode::kUnknownLabel, "unknown predicted_class in review item");
  item.predicted = *predicted;
  item.probs = j.at("probs").get<std::vector<double>>();
  item.confidence = j.at("confidence").get<double>();
  item.model_version = j.at("model_version").get<std::uint64_t>();
  item.created_at = j.value("created_at", std::string());
  item.updated_at = j.value("updated_at", item.created_at);
  return item;
}

}  // namespace qshield::gateway
