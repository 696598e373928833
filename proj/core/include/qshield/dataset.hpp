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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qshield/labels.hpp"

namespace qshield {

enum class SampleSource { kSeed, kReview };

std::string_view source_name(SampleSource source);

struct LabeledSample {
  std::string id;
  std::string text;
  Label label = Label::kBenign;
  SampleSource source = SampleSource::kSeed;
  std::string ts;  // RFC 3339

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

using Corpus = std::vector<LabeledSample>;

struct CorpusStats {
  std::array<std::size_t, kNumClasses> counts{};
  std::size_t total = 0;

  std::size_t count(Label l) const { return counts[label_index(l)]; }
};

CorpusStats corpus_stats(const Corpus& corpus);

// One JSONL record: {"id","text","label","source","ts"}.
std::string sample_to_json(const LabeledSample& sample);
// Throws Error(kMalformedRecord) or Error(kUnknownLabel).
LabeledSample sample_from_json(std::string_view line);

// Strict reader: every non-blank line must parse, ids must be unique.
// Errors name the 1-based line number.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Downsamples (seeded, without replacement) every class above `threshold`
// to exactly `threshold` samples. Relative order of retained samples is
// preserved.
Corpus balance_by_threshold(const Corpus& corpus, std::size_t threshold, std::uint64_t seed);

struct SplitResult {
  Corpus train;
  Corpus test;
  // Classes with fewer than two samples; they go entirely to train.
  std::vector<Label> undersized_classes;
};

// Per-class split. Each class with at least two samples contributes
// round(count * test_fraction) test samples, clamped to [1, count - 1].
SplitResult stratified_split(const Corpus& corpus, double test_fraction, std::uint64_t seed);

// RFC 3339 UTC timestamp for seconds since the Unix epoch.
std::string format_rfc3339(std::int64_t unix_seconds);
std::string now_rfc3339();

}  // namespace qshield
