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

#include "qshield/model_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "qshield/error.hpp"

namespace qshield {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'C', 'N', 'N'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for large payloads.
  while (len > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    len -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

json config_json(const ModelConfig& c) {
  return json{{"embedding_dim", c.embedding_dim},
              {"filter_heights", c.filter_heights},
              {"filters_per_height", c.filters_per_height},
              {"num_classes", c.num_classes},
              {"max_seq_len", c.max_seq_len},
              {"dropout_p", c.dropout_p},
              {"use_bias", c.use_bias},
              {"seed", c.seed}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.filter_heights = j.value("filter_heights", c.filter_heights);
  c.filters_per_height = j.value("filters_per_height", c.filters_per_height);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.dropout_p = j.value("dropout_p", c.dropout_p);
  c.use_bias = j.value("use_bias", c.use_bias);
  c.seed = j.value("seed", c.seed);
  return c;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& config) {
  return config_json(config).dump(2);
}

ModelConfig model_config_from_json(const std::string& text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid model config: ") + e.what());
  }
}

std::vector<std::uint8_t> serialize_model(const ModelParams& params, const ModelConfig& config) {
  check_shapes(params, config);
  json manifest = json::array();
  std::size_t offset = 0;
  const auto refs = tensors(params);
  for (const auto& t : refs) {
    manifest.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.values.size() * sizeof(float);
  }
  const json header = {{"config", config_json(config)},
                       {"tensors", manifest},
                       {"vocab_hash", hex64(params.vocab_hash)},
                       {"model_version", params.version}};
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(12 + header_text.size() + offset + 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.insert(out.end(), header_text.begin(), header_text.end());
  for (const auto& t : refs) {
    for (double v : t.values) {
      const float f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw Error(ErrorCode::kContractViolation,
                    "tensor " + t.name + " holds a value not representable as a finite f32");
      }
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      put_u32(out, bits);
    }
  }
  put_u32(out, crc32_of(out.data(), out.size()));
  return out;
}

LoadedModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a model file (magic bytes mismatch)");
  }
  if (bytes.size() < 16) {
    throw Error(ErrorCode::kChecksumMismatch, "model file truncated");
  }
  const std::size_t body = bytes.size() - 4;
  if (crc32_of(bytes.data(), body) != get_u32(bytes.data() + body)) {
    throw Error(ErrorCode::kChecksumMismatch, "model file checksum mismatch");
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported model format version " + std::to_string(version));
  }
  const std::size_t header_len = get_u32(bytes.data() + 8);
  if (12 + header_len > body) throw Error(ErrorCode::kBadHeader, "header length out of range");

  json header;
  try {
    header = json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<long>(header_len));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadHeader, std::string("unreadable model header: ") + e.what());
  }

  LoadedModel loaded;
  try {
    loaded.config = config_from(header.at("config"));
    const std::string hash = header.at("vocab_hash").get<std::string>();
    if (hash != hex64(CharVocab::hash())) {
      throw Error(ErrorCode::kVocabMismatch,
                  "model was built for a different character vocabulary (" + hash + ")");
    }
    loaded.config.validate();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadHeader, std::string("malformed model header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kVocabMismatch) throw;
    throw Error(ErrorCode::kBadHeader, std::string("inconsistent model config: ") + e.what());
  }

  // Build the expected layout from the config and require the manifest to
  // agree with it exactly.
  ModelConfig shape_config = loaded.config;
  ModelParams& p = loaded.params;
  p = zeros_like(init_params(shape_config));
  p.vocab_hash = CharVocab::hash();
  const std::size_t payload_start = 12 + header_len;
  const std::size_t payload_len = body - payload_start;
  try {
    p.version = header.at("model_version").get<std::uint64_t>();
    const auto& manifest = header.at("tensors");
    auto refs = tensors(p);
    if (manifest.size() != refs.size()) {
      throw Error(ErrorCode::kBadHeader, "tensor manifest count does not match config");
    }
    std::size_t expected_offset = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      const auto& entry = manifest[i];
      if (entry.at("name").get<std::string>() != refs[i].name ||
          entry.at("shape").get<std::vector<std::size_t>>() != refs[i].shape ||
          entry.at("offset").get<std::size_t>() != expected_offset) {
        throw Error(ErrorCode::kBadHeader, "tensor manifest entry " + refs[i].name +
                                               " inconsistent with config");
      }
      expected_offset += refs[i].values.size() * sizeof(float);
    }
    if (expected_offset != payload_len) {
      throw Error(ErrorCode::kBadHeader, "payload size does not match tensor manifest");
    }
    const std::uint8_t* cursor = bytes.data() + payload_start;
    for (auto& t : refs) {
      for (double& v : t.values) {
        const std::uint32_t bits = get_u32(cursor);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        v = f;
        cursor += 4;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadHeader, std::string("malformed tensor manifest: ") + e.what());
  }
  return loaded;
}

void save_model(const ModelParams& params, const ModelConfig& config,
                const std::filesystem::path& path) {
  const auto bytes = serialize_model(params, config);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move model into place at " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace qshield
