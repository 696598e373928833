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

#include "json.hpp"
#include "oracles.hpp"
#include "qshield/error.hpp"
#include "qshield/metrics.hpp"

namespace qshield {
namespace {

constexpr std::size_t B = 0, S = 1;  // benign, sqli

TEST(Metrics, TwoClassHandComputed) {
  ConfusionMatrix m{};
  m[B][B] = 8;
  m[B][S] = 2;
  m[S][B] = 1;
  m[S][S] = 9;
  const auto r = metrics_from_confusion(m);
  EXPECT_DOUBLE_EQ(r.precision[B], 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.recall[B], 0.8);
  EXPECT_DOUBLE_EQ(r.precision[S], 9.0 / 11.0);
  EXPECT_DOUBLE_EQ(r.recall[S], 0.9);
  EXPECT_DOUBLE_EQ(r.fpr, 0.2);
  EXPECT_DOUBLE_EQ(r.accuracy, 17.0 / 20.0);
  EXPECT_EQ(r.total, 20u);
  EXPECT_EQ(r.class_counts[B], 10u);
  EXPECT_EQ(r.class_counts[S], 10u);
}

TEST(Metrics, TwoFalseAlarmsInAThousand) {
  std::vector<Label> actual(1000, Label::kBenign), predicted(1000, Label::kBenign);
  predicted[10] = Label::kXss;
  predicted[500] = Label::kDt;
  const auto r = metrics_from_confusion(confusion_from_predictions(actual, predicted));
  EXPECT_DOUBLE_EQ(r.fpr, 0.002);
  EXPECT_NE(metrics_to_table(r).find("0.20%"), std::string::npos);
}

TEST(Metrics, PerfectPredictor) {
  std::vector<Label> labels;
  for (Label l : kAllLabels)
    for (int i = 0; i < 3; ++i) labels.push_back(l);
  const auto r = metrics_from_confusion(confusion_from_predictions(labels, labels));
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    EXPECT_EQ(r.precision[c], 1.0);
    EXPECT_EQ(r.recall[c], 1.0);
    EXPECT_FALSE(r.precision_degenerate[c]);
  }
  EXPECT_EQ(r.fpr, 0.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Metrics, EmptyDenominatorsAreFlagged) {
  ConfusionMatrix m{};
  m[B][B] = 5;
  const auto r = metrics_from_confusion(m);
  EXPECT_EQ(r.precision[S], 1.0);
  EXPECT_TRUE(r.precision_degenerate[S]);
  EXPECT_EQ(r.recall[S], 1.0);
  EXPECT_TRUE(r.recall_degenerate[S]);
  EXPECT_FALSE(r.precision_degenerate[B]);

  ConfusionMatrix attacks_only{};
  attacks_only[S][S] = 4;
  const auto a = metrics_from_confusion(attacks_only);
  EXPECT_EQ(a.fpr, 0.0);
  EXPECT_TRUE(a.fpr_degenerate);
}

TEST(Metrics, MismatchedPredictionListsThrow) {
  const std::vector<Label> a(3, Label::kBenign), p(2, Label::kBenign);
  EXPECT_THROW(confusion_from_predictions(a, p), Error);
}

TEST(MetricsProperty, MatchesDefinitionsAndConservesCounts) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    ConfusionMatrix m{};
    std::size_t total = 0;
    for (auto& row : m)
      for (auto& cell : row) total += cell = rng.below(3) == 0 ? 0 : rng.below(50);
    const auto r = metrics_from_confusion(m);
    const auto ref = oracle::metrics(m);
    ASSERT_EQ(r.total, total);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      ASSERT_DOUBLE_EQ(r.precision[c], ref.precision[c]);
      ASSERT_DOUBLE_EQ(r.recall[c], ref.recall[c]);
      std::size_t row = 0;
      for (std::size_t p = 0; p < kNumClasses; ++p) row += m[c][p];
      ASSERT_EQ(r.class_counts[c], row);  // TP + FN
    }
    ASSERT_DOUBLE_EQ(r.fpr, ref.fpr);
  }
}

TEST(MetricsJson, SchemaIsIndependentOfModel) {
  ConfusionMatrix m{};
  m[B][B] = 3;
  m[S][B] = 1;
  const auto a = nlohmann::json::parse(metrics_to_json(metrics_from_confusion(m, "cnn")));
  const auto b = nlohmann::json::parse(metrics_to_json(metrics_from_confusion(m, "baseline")));
  EXPECT_EQ(a["model"], "cnn");
  EXPECT_EQ(b["model"], "baseline");
  const auto keys = [](const nlohmann::json& j) {
    std::vector<std::string> k;
    for (auto it = j.begin(); it != j.end(); ++it) k.push_back(it.key());
    return k;
  };
  EXPECT_EQ(keys(a), keys(b));
  EXPECT_EQ(keys(a["per_class"]), keys(b["per_class"]));
  EXPECT_EQ(keys(a["per_class"]["sqli"]), keys(b["per_class"]["sqli"]));
  EXPECT_EQ(a["per_class"]["benign"]["precision"], 0.75);
  EXPECT_EQ(a["confusion"][1][0], 1);
  EXPECT_EQ(a["total"], 4);
}

TEST(MetricsTable, ColumnsInReferenceOrder) {
  ConfusionMatrix m{};
  m[B][B] = 1;
  const std::string t = metrics_to_table(metrics_from_confusion(m));
  const auto pos = [&](const char* s) { return t.find(s); };
  ASSERT_NE(pos("Benign"), std::string::npos);
  EXPECT_LT(pos("Benign"), pos("DT"));
  EXPECT_LT(pos("DT"), pos("RFI"));
  EXPECT_LT(pos("RFI"), pos("SQLi"));
  EXPECT_LT(pos("SQLi"), pos("XSS"));
  EXPECT_LT(pos("XSS"), pos("FPR"));
  EXPECT_NE(t.find("recall"), std::string::npos);
  EXPECT_NE(t.find("precision"), std::string::npos);
  EXPECT_NE(t.find("0.00%"), std::string::npos);
}

}  // namespace
}  // namespace qshield
