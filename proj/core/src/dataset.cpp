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

#include "qshield/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "qshield/error.hpp"
#include "qshield/random.hpp"

namespace qshield {

using nlohmann::json;

std::string_view source_name(SampleSource source) {
  return source == SampleSource::kReview ? "review" : "seed";
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  for (const auto& sample : corpus) ++s.counts[label_index(sample.label)];
  s.total = corpus.size();
  return s;
}

std::string sample_to_json(const LabeledSample& sample) {
  json j = {{"id", sample.id},
            {"text", sample.text},
            {"label", label_name(sample.label)},
            {"source", source_name(sample.source)},
            {"ts", sample.ts}};
  // Payloads may carry arbitrary bytes; keep the line valid UTF-8.
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

LabeledSample sample_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedRecord, "record is not a JSON object");
  LabeledSample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    const auto label = j.at("label").get<std::string>();
    const auto parsed = parse_label(label);
    if (!parsed) throw Error(ErrorCode::kUnknownLabel, "unknown label \"" + label + "\"");
    s.label = *parsed;
    const auto source = j.value("source", std::string("seed"));
    if (source == "seed") {
      s.source = SampleSource::kSeed;
    } else if (source == "review") {
      s.source = SampleSource::kReview;
    } else {
      throw Error(ErrorCode::kMalformedRecord, "unknown source \"" + source + "\"");
    }
    s.ts = j.value("ts", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("missing or mistyped field: ") + e.what());
  }
  return s;
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LabeledSample s;
    try {
      s = sample_from_json(line);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(s.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(line_no) + ": duplicate id \"" + s.id + "\"");
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus) out << sample_to_json(s) << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus " + path.string());
  write_corpus(out, corpus);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

namespace {

std::array<std::vector<std::size_t>, kNumClasses> positions_by_class(const Corpus& corpus) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_class[label_index(corpus[i].label)].push_back(i);
  }
  return by_class;
}

}  // namespace

Corpus balance_by_threshold(const Corpus& corpus, std::size_t threshold, std::uint64_t seed) {
  if (threshold == 0) throw Error(ErrorCode::kConfig, "balance threshold must be at least 1");
  Rng rng(seed);
  std::vector<char> keep(corpus.size(), 1);
  for (auto& positions : positions_by_class(corpus)) {
    if (positions.size() <= threshold) continue;
    rng.shuffle(positions.begin(), positions.end());
    for (std::size_t i = threshold; i < positions.size(); ++i) keep[positions[i]] = 0;
  }
  Corpus out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) out.push_back(corpus[i]);
  }
  return out;
}

SplitResult stratified_split(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "test_fraction must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  std::vector<char> in_test(corpus.size(), 0);
  SplitResult result;
  auto by_class = positions_by_class(corpus);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& positions = by_class[c];
    if (positions.empty()) continue;
    if (positions.size() < 2) {
      result.undersized_classes.push_back(static_cast<Label>(c));
      continue;
    }
    const auto count = positions.size();
    auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(count) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, count - 1);
    rng.shuffle(positions.begin(), positions.end());
    for (std::size_t i = 0; i < n_test; ++i) in_test[positions[i]] = 1;
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_test[i] ? result.test : result.train).push_back(corpus[i]);
  }
  return result;
}

std::string format_rfc3339(std::int64_t unix_seconds) {
  const std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string now_rfc3339() {
  const auto now = std::chrono::system_clock::now();
  return format_rfc3339(
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

}  // namespace qshield
