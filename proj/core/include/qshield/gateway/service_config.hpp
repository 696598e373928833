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
#include <optional>
#include <string>
#include <vector>

#include "qshield/labels.hpp"
#include "qshield/trainer.hpp"

namespace qshield::gateway {

struct ServiceConfig {
  // Verdicts with max probability below this are "low confidence".
  double confidence_threshold = 0.9;
  // Probability that a low-confidence request is captured for review.
  double sampling_rate = 1.0;
  // New review labels that trigger an automatic warm-start retrain.
  std::size_t retrain_trigger_count = 100;
  bool auto_retrain = true;
  // Predicted classes answered with a block verdict.
  std::vector<Label> block_policy = {Label::kSqli, Label::kXss, Label::kRfi, Label::kDt};
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path data_dir = "qshield-data";
  // Optional directory of static review UI assets served at "/".
  std::filesystem::path ui_dir;
  std::size_t max_body_bytes = 64 * 1024;
  std::uint64_t seed = 20190101;
  TrainConfig retrain = [] {
    TrainConfig t;
    t.epochs = 3;
    return t;
  }();

  bool blocks(Label label) const;
  void validate() const;
};

inline constexpr const char* kConfigEnvVar = "QSHIELD_CONFIG";

// Fields missing from the JSON keep their defaults.
ServiceConfig service_config_from_json(const std::string& text);
std::string service_config_to_json(const ServiceConfig& config);
ServiceConfig load_service_config(const std::filesystem::path& path);

// Explicit path wins; otherwise $QSHIELD_CONFIG; otherwise none.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path);

}  // namespace qshield::gateway
