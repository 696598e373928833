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
#include <optional>
#include <string_view>

namespace qshield {

// Class order follows the composition table of the reference dataset:
// benign first, then the four injection families.
enum class Label : std::size_t { kBenign = 0, kSqli = 1, kXss = 2, kRfi = 3, kDt = 4 };

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<Label, kNumClasses> kAllLabels = {
    Label::kBenign, Label::kSqli, Label::kXss, Label::kRfi, Label::kDt};

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);

inline constexpr std::size_t label_index(Label label) {
  return static_cast<std::size_t>(label);
}

inline constexpr bool is_attack(Label label) { return label != Label::kBenign; }

}  // namespace qshield
