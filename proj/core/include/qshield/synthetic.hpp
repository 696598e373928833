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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qshield/dataset.hpp"

namespace qshield {

// Template families of the synthetic generator. Each belongs to one class.
enum class Family {
  kBenignParams,
  kSqliTautology,
  kSqliUnion,
  kSqliStacked,
  kSqliTimeBlind,
  kXssScriptTag,
  kXssEventHandler,
  kXssJsUri,
  kRfiRemoteUrl,
  kRfiWrapper,
  kDtDotDot,
  kDtEncoded,
};

std::span<const Family> all_families();
Label family_label(Family family);
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

using ClassCounts = std::array<std::size_t, kNumClasses>;

// Class composition of the reference dataset.
inline constexpr ClassCounts kReferenceCounts = {2000, 472, 720, 599, 511};

// Deterministic corpus: for each class, `counts[c]` samples drawn uniformly
// over that class's families not listed in `excluded`. Ids look like
// "syn-sqli-000042".
Corpus generate_synthetic(const ClassCounts& counts, std::uint64_t seed,
                          std::span<const Family> excluded = {});

// `count` samples of one family with ids "<id_prefix>-000000"...
Corpus generate_family(Family family, std::size_t count, std::uint64_t seed,
                       std::string_view id_prefix);

// Recognizer for a family's template grammar, applied to the raw text.
bool matches_family(std::string_view text, Family family);

}  // namespace qshield
