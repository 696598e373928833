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

#include "qshield/gateway/service_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qshield/error.hpp"

namespace qshield::gateway {

using nlohmann::json;

bool ServiceConfig::blocks(Label label) const {
  return std::find(block_policy.begin(), block_policy.end(), label) != block_policy.end();
}

void ServiceConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (!(confidence_threshold > 0.0 && confidence_threshold <= 1.0)) {
    fail("confidence_threshold must lie in (0, 1]");
  }
  if (!(sampling_rate >= 0.0 && sampling_rate <= 1.0)) fail("sampling_rate must lie in [0, 1]");
  if (retrain_trigger_count == 0) fail("retrain_trigger_count must be at least 1");
  if (listen_port < 0 || listen_port > 65535) fail("listen_port out of range");
  if (max_body_bytes == 0) fail("max_body_bytes must be positive");
  retrain.validate();
}

namespace {

json train_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"optimizer", t.optimizer == OptimizerKind::kAdam ? "adam" : "sgd"},
          {"learning_rate", t.learning_rate},
          {"lambda", t.lambda},
          {"seed", t.seed}};
}

TrainConfig train_from(const json& j, TrainConfig t) {
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  const auto opt = j.value("optimizer", std::string(t.optimizer == OptimizerKind::kAdam ? "adam" : "sgd"));
  if (opt == "adam") {
    t.optimizer = OptimizerKind::kAdam;
  } else if (opt == "sgd") {
    t.optimizer = OptimizerKind::kSgd;
  } else {
    throw Error(ErrorCode::kConfig, "unknown optimizer \"" + opt + "\"");
  }
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.lambda = j.value("lambda", t.lambda);
  t.seed = j.value("seed", t.seed);
  return t;
}

}  // namespace

ServiceConfig service_config_from_json(const std::string& text) {
  ServiceConfig c;
  try {
    const json j = json::parse(text);
    c.confidence_threshold = j.value("confidence_threshold", c.confidence_threshold);
    c.sampling_rate = j.value("sampling_rate", c.sampling_rate);
    c.retrain_trigger_count = j.value("retrain_trigger_count", c.retrain_trigger_count);
    c.auto_retrain = j.value("auto_retrain", c.auto_retrain);
    if (j.contains("block_policy")) {
      c.block_policy.clear();
      for (const auto& name : j.at("block_policy")) {
        const auto label = parse_label(name.get<std::string>());
        if (!label) throw Error(ErrorCode::kConfig, "unknown label in block_policy");
        c.block_policy.push_back(*label);
      }
    }
    c.listen_host = j.value("listen_host", c.listen_host);
    c.listen_port = j.value("listen_port", c.listen_port);
    c.data_dir = j.value("data_dir", c.data_dir.string());
    c.ui_dir = j.value("ui_dir", c.ui_dir.string());
    c.max_body_bytes = j.value("max_body_bytes", c.max_body_bytes);
    c.seed = j.value("seed", c.seed);
    if (j.contains("retrain")) c.retrain = train_from(j.at("retrain"), c.retrain);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid service config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string service_config_to_json(const ServiceConfig& c) {
  json policy = json::array();
  for (Label l : c.block_policy) policy.push_back(label_name(l));
  return json{{"confidence_threshold", c.confidence_threshold},
              {"sampling_rate", c.sampling_rate},
              {"retrain_trigger_count", c.retrain_trigger_count},
              {"auto_retrain", c.auto_retrain},
              {"block_policy", policy},
              {"listen_host", c.listen_host},
              {"listen_port", c.listen_port},
              {"data_dir", c.data_dir.string()},
              {"ui_dir", c.ui_dir.string()},
              {"max_body_bytes", c.max_body_bytes},
              {"seed", c.seed},
              {"retrain", train_json(c.retrain)}}
      .dump(2);
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return service_config_from_json(ss.str());
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return explicit_path;
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace qshield::gateway
