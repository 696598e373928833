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

#include "qshield/vocab.hpp"

#include "qshield/error.hpp"

namespace qshield {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Decodes one code point starting at text[pos]; advances pos. Invalid or
// truncated sequences consume a single byte.
char32_t next_codepoint(std::string_view text, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > text.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

}  // namespace

std::string_view CharVocab::chars() {
  static const std::string alphabet = [] {
    std::string s;
    for (char32_t c = kFirst; c <= kLast; ++c) s.push_back(static_cast<char>(c));
    return s;
  }();
  return alphabet;
}

std::uint64_t CharVocab::hash() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (char c : chars()) mix(static_cast<unsigned char>(c));
  mix(kOovIndex);
  mix(kPadIndex);
  return h;
}

std::vector<char32_t> utf8_codepoints(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) out.push_back(next_codepoint(text, pos));
  return out;
}

IndexSequence encode(std::string_view text, std::size_t max_seq_len) {
  if (max_seq_len == 0) {
    throw Error(ErrorCode::kConfig, "max_seq_len must be at least 1");
  }
  IndexSequence seq;
  seq.indices.reserve(max_seq_len);
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (seq.indices.size() == max_seq_len) {
      seq.truncated = true;
      break;
    }
    const char32_t cp = next_codepoint(text, pos);
    seq.indices.push_back(CharVocab::index_of(cp).value_or(CharVocab::kOovIndex));
  }
  seq.original_length = seq.indices.size();
  seq.indices.resize(max_seq_len, CharVocab::kPadIndex);
  return seq;
}

std::string decode(std::span<const std::uint8_t> indices) {
  std::string out;
  out.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::uint8_t idx = indices[i];
    if (idx >= CharVocab::kIndexSpace) {
      throw Error(ErrorCode::kInvalidIndex,
                  "index " + std::to_string(idx) + " at position " +
                      std::to_string(i) + " is outside the vocabulary");
    }
    if (idx == CharVocab::kPadIndex) continue;
    if (idx == CharVocab::kOovIndex) {
      out += "\xEF\xBF\xBD";
    } else {
      out.push_back(CharVocab::char_at(idx));
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '+') {
      out.push_back(' ');
    } else if (c == '%' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 &&
               hex_value(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2])));
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace qshield
