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

#include "qshield/labels.hpp"

#include "qshield/error.hpp"

namespace qshield {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kBenign: return "benign";
    case Label::kSqli: return "sqli";
    case Label::kXss: return "xss";
    case Label::kRfi: return "rfi";
    case Label::kDt: return "dt";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view name) {
  for (Label l : kAllLabels) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInvalidIndex: return "invalid-index";
    case ErrorCode::kInputTooShort: return "input-too-short";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kContractViolation: return "contract-violation";
    case ErrorCode::kDivergedTraining: return "diverged-training";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kBadHeader: return "bad-header";
    case ErrorCode::kVocabMismatch: return "vocab-mismatch";
    case ErrorCode::kMalformedRecord: return "malformed-record";
    case ErrorCode::kUnknownLabel: return "unknown-label";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kRejected: return "rejected";
    case ErrorCode::kUnavailable: return "unavailable";
    case ErrorCode::kBadCursor: return "bad-cursor";
  }
  return "unknown";
}

}  // namespace qshield
