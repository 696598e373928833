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

#include <cstdlib>
#include <thread>

#include "gateway_fixture.hpp"
#include "qshield/error.hpp"
#include "qshield/gateway/journal.hpp"
#include "qshield/gateway/service.hpp"
#include "qshield/gateway/service_config.hpp"
#include "test_util.hpp"

namespace qshield::gateway {
namespace {

using qshield::testing::fixed_model;
using qshield::testing::logits_for;

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::vector<std::string> out;
  std::istringstream in(qshield::testing::read_file(p));
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

class GatewayTest : public ::testing::Test {
 protected:
  std::filesystem::path data() const { return dir_ / "data"; }

  ServiceConfig config() const { return qshield::testing::service_config(data()); }

  std::unique_ptr<GatewayService> start(const ServiceConfig& cfg,
                                        std::optional<ModelParams> model = std::nullopt,
                                        bool with_seed = true) {
    GatewayService::Options opts{cfg, std::nullopt, std::nullopt};
    if (model) {
      opts.initial_model = qshield::testing::write_model(
          dir_ / ("init-" + std::to_string(counter_++) + ".ccnn"), *model);
    }
    if (with_seed) {
      const auto seed = dir_ / "seed.jsonl";
      if (!std::filesystem::exists(seed)) save_corpus(qshield::testing::small_seed_corpus(), seed);
      opts.seed_corpus = seed;
    }
    return std::make_unique<GatewayService>(std::move(opts));
  }

  std::unique_ptr<GatewayService> start_low_confidence(ServiceConfig cfg) {
    return start(cfg, fixed_model(logits_for(Label::kBenign, 0.6)));
  }

  qshield::testing::TempDir dir_;
  int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Config

TEST(ServiceConfig, DefaultsAndValidation) {
  ServiceConfig c;
  EXPECT_EQ(c.confidence_threshold, 0.9);
  EXPECT_EQ(c.sampling_rate, 1.0);
  EXPECT_EQ(c.retrain_trigger_count, 100u);
  for (Label l : kAllLabels) EXPECT_EQ(c.blocks(l), l != Label::kBenign);
  EXPECT_NO_THROW(c.validate());

  const auto bad = [](auto mutate) {
    ServiceConfig c;
    mutate(c);
    return error_of([&] { c.validate(); });
  };
  EXPECT_EQ(bad([](ServiceConfig& c) { c.confidence_threshold = 0.0; }), ErrorCode::kConfig);
  EXPECT_EQ(bad([](ServiceConfig& c) { c.confidence_threshold = 1.5; }), ErrorCode::kConfig);
  EXPECT_EQ(bad([](ServiceConfig& c) { c.sampling_rate = -0.1; }), ErrorCode::kConfig);
  EXPECT_EQ(bad([](ServiceConfig& c) { c.sampling_rate = 1.1; }), ErrorCode::kConfig);
  EXPECT_EQ(bad([](ServiceConfig& c) { c.retrain_trigger_count = 0; }), ErrorCode::kConfig);
  ServiceConfig edge;
  edge.confidence_threshold = 1.0;
  edge.sampling_rate = 0.0;
  EXPECT_NO_THROW(edge.validate());
}

TEST(ServiceConfig, JsonRoundTripAndPartialFiles) {
  ServiceConfig c;
  c.confidence_threshold = 0.75;
  c.block_policy = {Label::kSqli};
  c.retrain.epochs = 9;
  c.data_dir = "/tmp/x";
  const auto back = service_config_from_json(service_config_to_json(c));
  EXPECT_EQ(back.confidence_threshold, 0.75);
  EXPECT_EQ(back.block_policy, std::vector<Label>{Label::kSqli});
  EXPECT_EQ(back.retrain.epochs, 9u);
  EXPECT_EQ(back.data_dir, "/tmp/x");

  const auto partial = service_config_from_json(R"({"sampling_rate": 0.5})");
  EXPECT_EQ(partial.sampling_rate, 0.5);
  EXPECT_EQ(partial.confidence_threshold, 0.9);

  EXPECT_EQ(error_of([] { service_config_from_json(R"({"block_policy": ["ssrf"]})"); }),
            ErrorCode::kConfig);
  EXPECT_EQ(error_of([] { service_config_from_json("{nope"); }), ErrorCode::kConfig);
}

TEST(ServiceConfig, PathResolutionPrefersFlagThenEnvironment) {
  ::unsetenv(kConfigEnvVar);
  EXPECT_FALSE(resolve_config_path(std::nullopt).has_value());
  ::setenv(kConfigEnvVar, "/etc/qshield.json", 1);
  EXPECT_EQ(resolve_config_path(std::nullopt), std::filesystem::path("/etc/qshield.json"));
  EXPECT_EQ(resolve_config_path(std::filesystem::path("/a.json")), std::filesystem::path("/a.json"));
  ::unsetenv(kConfigEnvVar);
}

// ---------------------------------------------------------------------------
// Journal

TEST(Journal, AppendsInOrderAndRecoversPartialTail) {
  qshield::testing::TempDir dir;
  const auto file = dir / "j.jsonl";
  {
    Journal j;
    for (int i = 0; i < 100; ++i) j.append(file, "{\"n\":" + std::to_string(i) + "}");
    j.append_durable(file, "{\"n\":100}");
  }
  auto lines = lines_of(file);
  ASSERT_EQ(lines.size(), 101u);
  for (int i = 0; i <= 100; ++i) EXPECT_EQ(lines[i], "{\"n\":" + std::to_string(i) + "}");

  {
    std::ofstream out(file, std::ios::app);
    out << "{\"n\":101";  // interrupted write
  }
  const auto rec = recover_jsonl(file);
  EXPECT_EQ(rec.lines.size(), 101u);
  ASSERT_EQ(rec.warnings.size(), 1u);
  EXPECT_EQ(qshield::testing::read_file(file).back(), '\n');
  EXPECT_TRUE(recover_jsonl(dir / "missing.jsonl").lines.empty());
}

// ---------------------------------------------------------------------------
// Classification

TEST_F(GatewayTest, FreshServiceStatus) {
  auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99)));
  const auto s = svc->status();
  ASSERT_TRUE(s.model_version.has_value());
  EXPECT_EQ(*s.model_version, 0u);
  EXPECT_EQ(s.queue_depth, 0u);
  EXPECT_EQ(s.labeled_db_size, qshield::testing::small_seed_corpus().size());
  EXPECT_EQ(s.retrain_state, RetrainState::kIdle);
  EXPECT_EQ(s.counters.requests, 0u);
  EXPECT_TRUE(std::filesystem::exists(GatewayService::model_path(data(), 0)));
}

TEST_F(GatewayTest, NoModelIsUnavailable) {
  auto svc = start(config(), std::nullopt);
  EXPECT_FALSE(svc->status().model_version.has_value());
  EXPECT_EQ(error_of([&] { svc->classify("a=1"); }), ErrorCode::kUnavailable);
  EXPECT_EQ(error_of([&] { svc->trigger_retrain(); }), ErrorCode::kUnavailable);
}

TEST_F(GatewayTest, OversizedRequestIsRejected) {
  auto cfg = config();
  cfg.max_body_bytes = 16;
  auto svc = start(cfg, fixed_model(logits_for(Label::kBenign, 0.99)));
  EXPECT_NO_THROW(svc->classify(std::string(16, 'a')));
  EXPECT_EQ(error_of([&] { svc->classify(std::string(17, 'a')); }), ErrorCode::kRejected);
}

TEST_F(GatewayTest, ConfidentBenignIsAllowedWithoutCapture) {
  auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99)));
  const auto r = svc->classify("page=2");
  EXPECT_EQ(r.decision, Decision::kAllow);
  EXPECT_EQ(r.verdict.predicted, Label::kBenign);
  EXPECT_NEAR(r.verdict.confidence, 0.99, 1e-6);
  EXPECT_FALSE(r.captured);
  EXPECT_EQ(svc->status().queue_depth, 0u);
}

TEST_F(GatewayTest, LowConfidenceIsCaptured) {
  auto svc = start_low_confidence(config());
  const auto r = svc->classify("q=%27maybe");
  EXPECT_NEAR(r.verdict.confidence, 0.6, 1e-6);
  ASSERT_TRUE(r.captured);
  const auto page = svc->list_pending(10, std::nullopt);
  ASSERT_EQ(page.items.size(), 1u);
  EXPECT_EQ(page.items[0].id, *r.review_id);
  EXPECT_EQ(page.items[0].text, "q=%27maybe");
  EXPECT_EQ(page.items[0].probs, r.verdict.probs);
  EXPECT_EQ(page.items[0].model_version, 0u);
  EXPECT_EQ(page.items[0].status, ReviewStatus::kPending);
  EXPECT_EQ(svc->counters().captures, 1u);
  EXPECT_EQ(svc->counters().low_confidence, 1u);
}

TEST_F(GatewayTest, SamplingRateZeroNeverCaptures) {
  auto cfg = config();
  cfg.sampling_rate = 0.0;
  auto svc = start_low_confidence(cfg);
  for (int i = 0; i < 20; ++i) EXPECT_FALSE(svc->classify("a=" + std::to_string(i)).captured);
  EXPECT_EQ(svc->counters().low_confidence, 20u);
  EXPECT_EQ(svc->counters().captures, 0u);
}

TEST_F(GatewayTest, PartialSamplingIsSeededAndProportional) {
  auto cfg = config();
  cfg.sampling_rate = 0.3;
  std::vector<bool> first;
  for (int run = 0; run < 2; ++run) {
    qshield::testing::TempDir other;
    cfg.data_dir = other / "data";
    auto svc = start_low_confidence(cfg);
    std::vector<bool> got;
    for (int i = 0; i < 1000; ++i) got.push_back(svc->classify("a=" + std::to_string(i)).captured);
    if (run == 0) first = got;
    else EXPECT_EQ(got, first);
    const auto n = std::count(got.begin(), got.end(), true);
    EXPECT_GT(n, 240);
    EXPECT_LT(n, 360);
  }
}

TEST_F(GatewayTest, AttackIsBlockedAndCounted) {
  auto svc = start(config(), fixed_model(logits_for(Label::kSqli, 0.99)));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(svc->classify("id=1").decision, Decision::kBlock);
  EXPECT_EQ(svc->status().counters.blocks, 4u);
  EXPECT_EQ(svc->status().counters.requests, 4u);
}

TEST_F(GatewayTest, BlockPolicyIsConfigurable) {
  auto cfg = config();
  cfg.block_policy = {Label::kXss};
  auto svc = start(cfg, fixed_model(logits_for(Label::kSqli, 0.99)));
  EXPECT_EQ(svc->classify("id=1").decision, Decision::kAllow);
}

TEST_F(GatewayTest, UncertainBlocksAreStillSampled) {
  auto svc = start(config(), fixed_model(logits_for(Label::kXss, 0.5)));
  const auto r = svc->classify("x=<b>");
  EXPECT_EQ(r.decision, Decision::kBlock);
  EXPECT_TRUE(r.captured);
}

TEST_F(GatewayTest, TruncationIsCounted) {
  auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99)));
  svc->classify(std::string(32, 'a'));
  EXPECT_EQ(svc->counters().truncations, 0u);
  svc->classify(std::string(33, 'a'));
  EXPECT_EQ(svc->counters().truncations, 1u);
}

// ---------------------------------------------------------------------------
// Review queue

TEST_F(GatewayTest, EmptyQueueGivesEmptyPage) {
  auto svc = start_low_confidence(config());
  const auto page = svc->list_pending(10, std::nullopt);
  EXPECT_TRUE(page.items.empty());
  EXPECT_FALSE(page.next_cursor.has_value());
}

TEST_F(GatewayTest, PendingIsFifoWithStablePagination) {
  auto svc = start_low_confidence(config());
  for (const char* t : {"a=1", "b=2", "c=3"}) svc->classify(t);
  const auto all = svc->list_pending(10, std::nullopt);
  ASSERT_EQ(all.items.size(), 3u);
  EXPECT_EQ(all.items[0].text, "a=1");
  EXPECT_EQ(all.items[1].text, "b=2");
  EXPECT_EQ(all.items[2].text, "c=3");

  const auto first = svc->list_pending(2, std::nullopt);
  ASSERT_EQ(first.items.size(), 2u);
  ASSERT_TRUE(first.next_cursor.has_value());
  const auto second = svc->list_pending(2, first.next_cursor);
  ASSERT_EQ(second.items.size(), 1u);
  EXPECT_EQ(second.items[0].text, "c=3");
  EXPECT_FALSE(second.next_cursor.has_value());

  // Resolving an item on the first page does not shift the cursor.
  svc->submit_label(first.items[0].id, "discard");
  EXPECT_EQ(svc->list_pending(2, first.next_cursor).items[0].text, "c=3");
}

TEST_F(GatewayTest, BadCursorIsAnError) {
  auto svc = start_low_confidence(config());
  EXPECT_EQ(error_of([&] { svc->list_pending(5, std::string("abc")); }), ErrorCode::kBadCursor);
  EXPECT_EQ(error_of([&] { svc->list_pending(5, std::string("-1")); }), ErrorCode::kBadCursor);
}

TEST_F(GatewayTest, LabelAppendsReviewSample) {
  auto svc = start_low_confidence(config());
  const auto id = *svc->classify("x=<svg onload=1>").review_id;
  const std::size_t before = svc->status().labeled_db_size;
  const auto item = svc->submit_label(id, "xss");
  EXPECT_EQ(item.status, ReviewStatus::kLabeled);
  EXPECT_EQ(item.assigned_label, Label::kXss);
  svc->flush();
  const auto s = svc->status();
  EXPECT_EQ(s.labeled_db_size, before + 1);
  EXPECT_EQ(s.queue_depth, 0u);
  EXPECT_EQ(s.new_labels_since_retrain, 1u);
  const Corpus db = load_corpus(data() / "labeled.jsonl");
  EXPECT_EQ(db.back().text, "x=<svg onload=1>");
  EXPECT_EQ(db.back().label, Label::kXss);
  EXPECT_EQ(db.back().source, SampleSource::kReview);
}

TEST_F(GatewayTest, SecondLabelConflictsAndLeavesDbUnchanged) {
  auto svc = start_low_confidence(config());
  const auto id = *svc->classify("a=1").review_id;
  svc->submit_label(id, "sqli");
  const std::size_t size = svc->status().labeled_db_size;
  EXPECT_EQ(error_of([&] { svc->submit_label(id, "xss"); }), ErrorCode::kConflict);
  EXPECT_EQ(error_of([&] { svc->submit_label(id, "discard"); }), ErrorCode::kConflict);
  EXPECT_EQ(svc->status().labeled_db_size, size);
  EXPECT_EQ(svc->status().new_labels_since_retrain, 1u);
}

TEST_F(GatewayTest, DiscardShrinksQueueOnly) {
  auto svc = start_low_confidence(config());
  const auto id = *svc->classify("a=1").review_id;
  svc->classify("a=2");
  const std::size_t size = svc->status().labeled_db_size;
  const auto item = svc->submit_label(id, "discard");
  EXPECT_EQ(item.status, ReviewStatus::kDiscarded);
  EXPECT_FALSE(item.assigned_label.has_value());
  EXPECT_EQ(svc->status().queue_depth, 1u);
  EXPECT_EQ(svc->status().labeled_db_size, size);
  EXPECT_EQ(svc->status().new_labels_since_retrain, 0u);
  EXPECT_EQ(svc->counters().discards, 1u);
}

TEST_F(GatewayTest, UnknownIdOrLabel) {
  auto svc = start_low_confidence(config());
  const auto id = *svc->classify("a=1").review_id;
  EXPECT_EQ(error_of([&] { svc->submit_label("r999", "xss"); }), ErrorCode::kNotFound);
  EXPECT_EQ(error_of([&] { svc->submit_label(id, "ssrf"); }), ErrorCode::kUnknownLabel);
  EXPECT_EQ(svc->status().queue_depth, 1u);
}

TEST_F(GatewayTest, CapturedProbsReplayUnderStampedVersion) {
  const ModelParams p = qshield::testing::random_model(4);
  auto cfg = config();
  cfg.confidence_threshold = 1.0;  // capture everything
  auto svc = start(cfg, p);
  for (int i = 0; i < 20; ++i) svc->classify("k=" + std::to_string(i * 37) + "&x=%3Cb%3E");
  const auto items = svc->list_pending(100, std::nullopt).items;
  ASSERT_EQ(items.size(), 20u);
  for (const auto& item : items) {
    const auto m = load_model(GatewayService::model_path(data(), item.model_version));
    EXPECT_EQ(predict(m.params, m.config, item.text).probs, item.probs);
  }
}

// ---------------------------------------------------------------------------
// Retraining and swapping

TEST_F(GatewayTest, AutoRetrainFiresAtTheHundredthLabel) {
  auto svc = start_low_confidence(config());
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back(*svc->classify("n=" + std::to_string(i)).review_id);
  for (int i = 0; i < 99; ++i) svc->submit_label(ids[i], i % 2 ? "benign" : "dt");
  EXPECT_EQ(svc->status().retrain_state, RetrainState::kIdle);
  EXPECT_EQ(svc->status().new_labels_since_retrain, 99u);
  EXPECT_EQ(*svc->status().model_version, 0u);
  svc->submit_label(ids[99], "benign");
  svc->wait_for_retrain();
  const auto s = svc->status();
  EXPECT_EQ(s.counters.retrains_succeeded, 1u);
  EXPECT_EQ(*s.model_version, 1u);
  EXPECT_EQ(s.new_labels_since_retrain, 0u);
  EXPECT_EQ(s.retrain_state, RetrainState::kIdle);
}

TEST_F(GatewayTest, DiscardsDoNotCountTowardRetrain) {
  auto cfg = config();
  cfg.retrain_trigger_count = 2;
  auto svc = start_low_confidence(cfg);
  for (int i = 0; i < 3; ++i) svc->submit_label(*svc->classify("n=" + std::to_string(i)).review_id, "discard");
  svc->wait_for_retrain();
  EXPECT_EQ(svc->counters().retrains_succeeded, 0u);
}

TEST_F(GatewayTest, SuccessfulRetrainBumpsVersionForNewVerdicts) {
  auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99)));
  EXPECT_EQ(svc->classify("a=1").verdict.model_version, 0u);
  svc->trigger_retrain();
  svc->wait_for_retrain();
  EXPECT_EQ(svc->classify("a=1").verdict.model_version, 1u);
  EXPECT_EQ(svc->status().retrain_state, RetrainState::kIdle);
  EXPECT_TRUE(std::filesystem::exists(GatewayService::model_path(data(), 1)));
  EXPECT_EQ(load_model(GatewayService::model_path(data(), 1)).params, svc->snapshot()->params);
}

TEST_F(GatewayTest, FailedRetrainKeepsOldModel) {
  auto cfg = config();
  cfg.retrain.optimizer = OptimizerKind::kSgd;
  cfg.retrain.learning_rate = 1e300;
  cfg.retrain.batch_size = 4;
  auto svc = start(cfg, qshield::testing::random_model(9));
  const auto before = svc->snapshot();
  svc->trigger_retrain();
  svc->wait_for_retrain();
  const auto s = svc->status();
  EXPECT_EQ(s.retrain_state, RetrainState::kFailed);
  EXPECT_NE(s.retrain_error.find("diverged"), std::string::npos) << s.retrain_error;
  EXPECT_EQ(*s.model_version, 0u);
  EXPECT_EQ(svc->snapshot(), before);
  EXPECT_EQ(svc->classify("a=1").verdict.model_version, 0u);
  EXPECT_FALSE(std::filesystem::exists(GatewayService::model_path(data(), 1)));
  // A failed state does not block the next attempt.
  EXPECT_NO_THROW(svc->trigger_retrain());
  svc->wait_for_retrain();
}

TEST_F(GatewayTest, RunningRetrainConflictsAndReadsContinue) {
  auto cfg = config();
  cfg.retrain.epochs = 300;
  auto svc = start(cfg, fixed_model(logits_for(Label::kBenign, 0.99)));
  svc->trigger_retrain();
  EXPECT_EQ(svc->status().retrain_state, RetrainState::kRunning);
  EXPECT_EQ(error_of([&] { svc->trigger_retrain(); }), ErrorCode::kConflict);
  std::size_t served = 0;
  while (svc->status().retrain_state == RetrainState::kRunning && served < 100000) {
    const auto r = svc->classify("during=" + std::to_string(served));
    ASSERT_EQ(r.verdict.probs.size(), kNumClasses);
    ++served;
  }
  svc->wait_for_retrain();
  EXPECT_GT(served, 0u);
  EXPECT_EQ(*svc->status().model_version, 1u);
}

TEST_F(GatewayTest, SwapValidatesVersionVocabAndShape) {
  auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99), 5));
  const auto before = svc->snapshot();
  EXPECT_EQ(error_of([&] { svc->swap_model(fixed_model(logits_for(Label::kXss, 0.9), 5)); }),
            ErrorCode::kRejected);
  EXPECT_EQ(error_of([&] { svc->swap_model(fixed_model(logits_for(Label::kXss, 0.9), 7)); }),
            ErrorCode::kRejected);
  ModelParams alien = fixed_model(logits_for(Label::kXss, 0.9), 6);
  alien.vocab_hash ^= 1;
  EXPECT_EQ(error_of([&] { svc->swap_model(alien); }), ErrorCode::kRejected);
  ModelParams misshapen = fixed_model(logits_for(Label::kXss, 0.9), 6);
  misshapen.output_bias.pop_back();
  EXPECT_EQ(error_of([&] { svc->swap_model(misshapen); }), ErrorCode::kRejected);
  EXPECT_EQ(svc->snapshot(), before);

  svc->swap_model(fixed_model(logits_for(Label::kXss, 0.9), 6));
  EXPECT_EQ(svc->classify("a").verdict.predicted, Label::kXss);
  EXPECT_EQ(svc->classify("a").verdict.model_version, 6u);
}

TEST_F(GatewayTest, ConcurrentClassificationsSeeWholeSnapshots) {
  const auto old_model = fixed_model(logits_for(Label::kBenign, 0.95));
  const auto new_model = fixed_model(logits_for(Label::kXss, 0.8), 1);
  auto svc = start(config(), old_model);

  std::atomic<bool> go{false};
  std::vector<std::vector<Verdict>> results(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] {
      while (!go.load()) std::this_thread::yield();
      for (int i = 0; i < 125; ++i) results[t].push_back(svc->classify("x").verdict);
    });
  }
  go.store(true);
  std::this_thread::sleep_for(std::chrono::microseconds(200));
  svc->swap_model(new_model);
  for (auto& th : threads) th.join();

  // Oracle: the persisted models, which are what the service serves.
  const auto replay = [&](std::uint64_t v) {
    const auto m = load_model(GatewayService::model_path(data(), v));
    return predict(m.params, m.config, "x").probs;
  };
  const auto expect_old = replay(0);
  const auto expect_new = replay(1);
  ASSERT_NE(expect_old, expect_new);
  std::size_t total = 0;
  for (const auto& rs : results) {
    for (const auto& v : rs) {
      ++total;
      ASSERT_TRUE(v.model_version == 0 || v.model_version == 1);
      ASSERT_EQ(v.probs, v.model_version == 0 ? expect_old : expect_new);
    }
  }
  EXPECT_EQ(total, 1000u);
}

// ---------------------------------------------------------------------------
// Persistence

TEST_F(GatewayTest, RestartReloadsNewestModelAndState) {
  std::string labeled_id, pending_id;
  {
    auto svc = start_low_confidence(config());
    labeled_id = *svc->classify("a=1").review_id;
    pending_id = *svc->classify("a=2").review_id;
    svc->submit_label(labeled_id, "rfi");
    svc->swap_model(fixed_model(logits_for(Label::kBenign, 0.7), 1));
  }
  auto svc = start(config(), fixed_model(logits_for(Label::kSqli, 0.99)));  // ignored
  EXPECT_EQ(*svc->status().model_version, 1u);
  EXPECT_NEAR(svc->classify("z").verdict.confidence, 0.7, 1e-6);
  const auto pending = svc->list_pending(10, std::nullopt).items;
  ASSERT_EQ(pending.size(), 2u);  // a=2 plus z
  EXPECT_EQ(pending[0].id, pending_id);
  EXPECT_EQ(error_of([&] { svc->submit_label(labeled_id, "xss"); }), ErrorCode::kConflict);
  EXPECT_EQ(svc->status().labeled_db_size, qshield::testing::small_seed_corpus().size() + 1);
  EXPECT_TRUE(svc->recovery_warnings().empty());
  // New captures continue the id sequence.
  EXPECT_NE(pending[1].id, pending_id);
  EXPECT_NE(pending[1].id, labeled_id);
}

TEST_F(GatewayTest, CrashWithTornWritesRecoversCompleteRecords) {
  std::string id;
  {
    auto svc = start_low_confidence(config());
    id = *svc->classify("a=1").review_id;
    svc->classify("a=2");
    svc->submit_label(id, "dt");
    svc->flush();
  }
  const auto labeled_before = qshield::testing::read_file(data() / "labeled.jsonl");
  const auto queue_before = qshield::testing::read_file(data() / "queue.jsonl");
  {
    std::ofstream(data() / "labeled.jsonl", std::ios::app) << R"({"id":"review-r9","te)";
    std::ofstream(data() / "queue.jsonl", std::ios::app) << R"({"event":"capture","id":"r)";
  }
  auto svc = start_low_confidence(config());
  EXPECT_EQ(svc->recovery_warnings().size(), 2u);
  EXPECT_EQ(qshield::testing::read_file(data() / "labeled.jsonl"), labeled_before);
  EXPECT_EQ(qshield::testing::read_file(data() / "queue.jsonl"), queue_before);
  EXPECT_EQ(svc->status().queue_depth, 1u);
  EXPECT_EQ(svc->status().labeled_db_size, qshield::testing::small_seed_corpus().size() + 1);
  // Appends after recovery start on a clean line.
  svc->submit_label(*svc->classify("a=3").review_id, "xss");
  svc->flush();
  EXPECT_NO_THROW(load_corpus(data() / "labeled.jsonl"));
}

TEST_F(GatewayTest, CorruptMiddleRecordRefusesToStart) {
  {
    auto svc = start_low_confidence(config());
    svc->classify("a=1");
    svc->classify("a=2");
    svc->flush();
  }
  auto lines = lines_of(data() / "queue.jsonl");
  ASSERT_EQ(lines.size(), 2u);
  qshield::testing::write_file(data() / "queue.jsonl", "garbage\n" + lines[1] + "\n");
  EXPECT_THROW(start_low_confidence(config()), Error);
}

TEST_F(GatewayTest, LabeledDatabaseIsAppendOnly) {
  auto svc = start_low_confidence(config());
  svc->flush();
  std::string prev = qshield::testing::read_file(data() / "labeled.jsonl");
  for (int i = 0; i < 5; ++i) {
    const auto id = *svc->classify("v=" + std::to_string(i)).review_id;
    svc->submit_label(id, i % 2 ? "benign" : "discard");
    if (i == 2) {
      svc->trigger_retrain();
      svc->wait_for_retrain();
    }
    svc->flush();
    const std::string now = qshield::testing::read_file(data() / "labeled.jsonl");
    ASSERT_EQ(now.substr(0, prev.size()), prev);
    prev = now;
  }
}

TEST_F(GatewayTest, SeedCorpusIsOnlyWrittenOnce) {
  { auto svc = start_low_confidence(config()); }
  save_corpus(generate_synthetic({1, 0, 0, 0, 0}, 3), dir_ / "seed.jsonl");
  auto svc = start_low_confidence(config());
  EXPECT_EQ(svc->status().labeled_db_size, qshield::testing::small_seed_corpus().size());
}

TEST_F(GatewayTest, UnreadableNewestModelFallsBack) {
  {
    auto svc = start(config(), fixed_model(logits_for(Label::kBenign, 0.99)));
    svc->swap_model(fixed_model(logits_for(Label::kDt, 0.99), 1));
  }
  qshield::testing::write_file(GatewayService::model_path(data(), 1), "CCNNtruncated");
  auto svc = start(config(), std::nullopt);
  EXPECT_EQ(*svc->status().model_version, 0u);
  EXPECT_FALSE(svc->recovery_warnings().empty());
}

TEST(ModelPath, ZeroPaddedVersion) {
  EXPECT_EQ(GatewayService::model_path("d", 12).string(), "d/models/model-v000012.ccnn");
}

}  // namespace
}  // namespace qshield::gateway
