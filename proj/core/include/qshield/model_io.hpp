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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qshield/model.hpp"

namespace qshield {

// Model file layout (all integers little-endian):
//   "CCNN" | u32 format version | u32 header length | JSON header |
//   f32 tensor payload in manifest order | u32 CRC32 of all preceding bytes
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct LoadedModel {
  ModelParams params;
  ModelConfig config;
};

std::vector<std::uint8_t> serialize_model(const ModelParams& params, const ModelConfig& config);

// Throws Error with kBadMagic, kChecksumMismatch, kUnsupportedVersion,
// kBadHeader or kVocabMismatch. Nothing is returned on failure.
LoadedModel deserialize_model(const std::vector<std::uint8_t>& bytes);

// Writes through a temporary file and renames, so readers never see a
// partially written model.
void save_model(const ModelParams& params, const ModelConfig& config,
                const std::filesystem::path& path);
LoadedModel load_model(const std::filesystem::path& path);

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace qshield
