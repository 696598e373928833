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
#include <span>
#include <string>

#include "qshield/labels.hpp"

namespace qshield {

// confusion[actual][predicted]
using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

struct MetricsReport {
  std::string model;  // "cnn" or "baseline"
  ConfusionMatrix confusion{};
  std::array<std::size_t, kNumClasses> class_counts{};
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  // Set when the denominator was zero and the value was defined as 1.
  std::array<bool, kNumClasses> precision_degenerate{};
  std::array<bool, kNumClasses> recall_degenerate{};
  // Benign samples predicted as any attack class over all benign samples;
  // malicious is the positive class.
  double fpr = 0.0;
  bool fpr_degenerate = false;
  double accuracy = 0.0;
  std::size_t total = 0;
};

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion, std::string model = "cnn");

// Builds the confusion matrix from parallel actual/predicted label lists.
ConfusionMatrix confusion_from_predictions(std::span<const Label> actual,
                                           std::span<const Label> predicted);

std::string metrics_to_json(const MetricsReport& report);

// Two rows (recall, precision) with columns Benign, DT, RFI, SQLi, XSS and
// the FPR, in the layout of the usual per-model comparison table.
std::string metrics_to_table(const MetricsReport& report);

}  // namespace qshield
