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

#include "qshield/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "qshield/error.hpp"

namespace qshield {

using nlohmann::json;

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion, std::string model) {
  MetricsReport r;
  r.model = std::move(model);
  r.confusion = confusion;
  std::size_t correct = 0;
  for (std::size_t a = 0; a < kNumClasses; ++a) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      r.class_counts[a] += confusion[a][p];
      r.total += confusion[a][p];
    }
    correct += confusion[a][a];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::size_t tp = confusion[c][c];
    std::size_t predicted = 0;
    for (std::size_t a = 0; a < kNumClasses; ++a) predicted += confusion[a][c];
    if (predicted == 0) {
      r.precision[c] = 1.0;
      r.precision_degenerate[c] = true;
    } else {
      r.precision[c] = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (r.class_counts[c] == 0) {
      r.recall[c] = 1.0;
      r.recall_degenerate[c] = true;
    } else {
      r.recall[c] = static_cast<double>(tp) / static_cast<double>(r.class_counts[c]);
    }
  }
  const std::size_t benign = label_index(Label::kBenign);
  const std::size_t benign_total = r.class_counts[benign];
  if (benign_total == 0) {
    r.fpr = 0.0;
    r.fpr_degenerate = true;
  } else {
    const std::size_t false_alarms = benign_total - confusion[benign][benign];
    r.fpr = static_cast<double>(false_alarms) / static_cast<double>(benign_total);
  }
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.total);
  return r;
}

ConfusionMatrix confusion_from_predictions(std::span<const Label> actual,
                                           std::span<const Label> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::kShapeMismatch, "actual and predicted label counts differ");
  }
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ++m[label_index(actual[i])][label_index(predicted[i])];
  }
  return m;
}

std::string metrics_to_json(const MetricsReport& r) {
  json per_class = json::object();
  for (Label l : kAllLabels) {
    const auto c = label_index(l);
    per_class[std::string(label_name(l))] = {{"precision", r.precision[c]},
                                             {"recall", r.recall[c]},
                                             {"count", r.class_counts[c]},
                                             {"precision_degenerate", r.precision_degenerate[c]},
                                             {"recall_degenerate", r.recall_degenerate[c]}};
  }
  json classes = json::array();
  for (Label l : kAllLabels) classes.push_back(label_name(l));
  json j = {{"model", r.model},
            {"classes", classes},
            {"per_class", per_class},
            {"fpr", r.fpr},
            {"fpr_degenerate", r.fpr_degenerate},
            {"accuracy", r.accuracy},
            {"total", r.total},
            {"confusion", r.confusion}};
  return j.dump(2);
}

std::string metrics_to_table(const MetricsReport& r) {
  constexpr std::array<Label, kNumClasses> kColumns = {Label::kBenign, Label::kDt, Label::kRfi,
                                                       Label::kSqli, Label::kXss};
  constexpr std::array<const char*, kNumClasses> kHeaders = {"Benign", "DT", "RFI", "SQLi", "XSS"};
  auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return std::string(buf);
  };
  auto cell = [](const std::string& s, int width) {
    std::string out = s;
    if (static_cast<int>(out.size()) < width) out.insert(0, width - out.size(), ' ');
    return out;
  };
  std::ostringstream os;
  os << cell("Model", 8) << " | " << cell("Indicator", 9);
  for (const char* h : kHeaders) os << " | " << cell(h, 8);
  os << " | " << cell("FPR", 8) << '\n';
  os << std::string(8 + 3 + 9 + 6 * 11, '-') << '\n';
  os << cell(r.model, 8) << " | " << cell("recall", 9);
  for (Label l : kColumns) os << " | " << cell(pct(r.recall[label_index(l)]), 8);
  os << " | " << cell(pct(r.fpr), 8) << '\n';
  os << cell("", 8) << " | " << cell("precision", 9);
  for (Label l : kColumns) os << " | " << cell(pct(r.precision[label_index(l)]), 8);
  os << " | " << cell("", 8) << '\n';
  return os.str();
}

}  // namespace qshield
