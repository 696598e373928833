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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qshield {

// The 95 printable ASCII characters 0x20..0x7E, indexed by codepoint - 32.
// Two extra indices follow the real characters: one for anything outside
// the alphabet and one for padding.
class CharVocab {
 public:
  static constexpr std::size_t kNumChars = 95;
  static constexpr std::uint8_t kOovIndex = 95;
  static constexpr std::uint8_t kPadIndex = 96;
  static constexpr std::size_t kIndexSpace = 97;
  static constexpr char32_t kFirst = 0x20;
  static constexpr char32_t kLast = 0x7E;

  static constexpr std::optional<std::uint8_t> index_of(char32_t c) {
    if (c < kFirst || c > kLast) return std::nullopt;
    return static_cast<std::uint8_t>(c - kFirst);
  }

  static constexpr char char_at(std::uint8_t index) {
    return static_cast<char>(kFirst + index);
  }

  // Full ordered alphabet.
  static std::string_view chars();

  // FNV-1a over the alphabet and the special indices. Model files carry it
  // so a model trained under a different alphabet is refused.
  static std::uint64_t hash();
};

struct IndexSequence {
  std::vector<std::uint8_t> indices;
  // Number of non-padding entries.
  std::size_t original_length = 0;
  // Input had more characters than fit and was cut.
  bool truncated = false;
};

// Maps each UTF-8 code point to its vocabulary index (or OOV), then pads or
// truncates to exactly max_seq_len entries. Bytes that do not form valid
// UTF-8 count as one out-of-vocabulary character each.
IndexSequence encode(std::string_view text, std::size_t max_seq_len);

// Renders the non-padding entries back to text; OOV becomes U+FFFD.
// Throws Error(kInvalidIndex) for any index >= 97.
std::string decode(std::span<const std::uint8_t> indices);
inline std::string decode(const IndexSequence& seq) { return decode(seq.indices); }

// Single pass of URL percent-decoding; '+' becomes a space. Malformed escapes
// are kept verbatim.
std::string percent_decode(std::string_view text);

// The full input pipeline applied to raw request parameters.
inline IndexSequence encode_query(std::string_view raw, std::size_t max_seq_len) {
  return encode(percent_decode(raw), max_seq_len);
}

// Splits UTF-8 into code points; invalid bytes are returned as U+FFFD.
std::vector<char32_t> utf8_codepoints(std::string_view text);

}  // namespace qshield
