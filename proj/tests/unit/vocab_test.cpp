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

#include <gtest/gtest.h>

#include <set>

#include "qshield/error.hpp"
#include "qshield/vocab.hpp"
#include "test_util.hpp"

namespace qshield {
namespace {

std::vector<std::uint8_t> v(std::initializer_list<int> xs) {
  std::vector<std::uint8_t> out;
  for (int x : xs) out.push_back(static_cast<std::uint8_t>(x));
  return out;
}

TEST(Encode, QueryStringMapsToCodepointMinus32) {
  const auto seq = encode("a=1&b=2", 8);
  EXPECT_EQ(seq.indices, v({65, 29, 17, 6, 66, 29, 18, 96}));
  EXPECT_EQ(seq.original_length, 7u);
  EXPECT_FALSE(seq.truncated);
}

TEST(Encode, SixCharacterQueryLeavesTwoPads) {
  const auto seq = encode("a=1&b2", 8);
  EXPECT_EQ(seq.indices, v({65, 29, 17, 6, 66, 18, 96, 96}));
  EXPECT_EQ(seq.original_length, 6u);
}

TEST(Encode, EmptyInputIsAllPadding) {
  const auto seq = encode("", 4);
  EXPECT_EQ(seq.indices, v({96, 96, 96, 96}));
  EXPECT_EQ(seq.original_length, 0u);
}

TEST(Encode, NonAsciiCodepointIsOov) {
  const auto seq = encode("\xC3\xA9", 4);  // é
  EXPECT_EQ(seq.indices, v({95, 96, 96, 96}));
  EXPECT_EQ(seq.original_length, 1u);
}

TEST(Encode, ControlCharactersAreOov) {
  EXPECT_EQ(encode("\t\x7f", 2).indices, v({95, 95}));
}

TEST(Encode, LongInputIsTruncated) {
  const auto seq = encode("abcdef", 4);
  EXPECT_EQ(seq.indices, v({65, 66, 67, 68}));
  EXPECT_TRUE(seq.truncated);
  EXPECT_EQ(seq.original_length, 4u);
}

TEST(Encode, ZeroLengthIsConfigError) {
  try {
    encode("a", 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Decode, InvertsEncoding) {
  EXPECT_EQ(decode(v({65, 29, 17, 96})), "a=1");
  EXPECT_EQ(decode(v({96, 96})), "");
  EXPECT_EQ(decode(v({95})), "\xEF\xBF\xBD");
}

TEST(Decode, RejectsIndexOutsideSpace) {
  try {
    decode(v({10, 97}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidIndex);
  }
}

TEST(Vocab, EveryCharacterRoundTripsAndStaysInRange) {
  std::set<std::uint8_t> seen;
  for (char c = 0x20; c <= 0x7E; ++c) {
    const auto seq = encode(std::string(1, c), 3);
    ASSERT_LE(seq.indices[0], 94);
    EXPECT_EQ(CharVocab::char_at(seq.indices[0]), c);
    EXPECT_EQ(decode(seq), std::string(1, c));
    seen.insert(seq.indices[0]);
  }
  EXPECT_EQ(seen.size(), 95u);
  EXPECT_EQ(CharVocab::chars().size(), 95u);
}

TEST(VocabProperty, RoundTripAndPaddingIdempotence) {
  Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t L = 1 + rng.below(64);
    const std::string s = testing::random_printable(rng, L);
    const auto seq = encode(s, L);
    ASSERT_EQ(seq.indices.size(), L);
    for (auto i : seq.indices) ASSERT_LE(i, 96);
    ASSERT_EQ(decode(seq), s) << "L=" << L;
    ASSERT_EQ(encode(decode(seq), L).indices, seq.indices);
  }
}

TEST(VocabProperty, ArbitraryBytesStayInRange) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s(rng.below(40), '\0');
    for (char& c : s) c = static_cast<char>(rng.below(256));
    const auto seq = encode(s, 32);
    for (auto i : seq.indices) ASSERT_LE(i, 96);
    ASSERT_EQ(encode(decode(seq), 32).indices.size(), 32u);
  }
}

TEST(PercentDecode, DecodesEscapesAndPlus) {
  EXPECT_EQ(percent_decode("a%3Db+c"), "a=b c");
  EXPECT_EQ(percent_decode("%2e%2E%2f"), "../");
  EXPECT_EQ(percent_decode("100%"), "100%");
  EXPECT_EQ(percent_decode("%zz%4"), "%zz%4");
}

TEST(PercentDecode, DecodesOnlyOnce) {
  EXPECT_EQ(percent_decode("%252e"), "%2e");
}

TEST(EncodeQuery, DecodesBeforeEncoding) {
  EXPECT_EQ(encode_query("q=%27", 4).indices, encode("q='", 4).indices);
}

TEST(Vocab, HashIsStable) {
  EXPECT_EQ(CharVocab::hash(), CharVocab::hash());
  EXPECT_NE(CharVocab::hash(), 0u);
}

}  // namespace
}  // namespace qshield
