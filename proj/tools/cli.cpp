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

#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "qshield/baseline.hpp"
#include "qshield/dataset.hpp"
#include "qshield/error.hpp"
#include "qshield/gateway/http_server.hpp"
#include "qshield/gateway/service.hpp"
#include "qshield/metrics.hpp"
#include "qshield/model.hpp"
#include "qshield/model_io.hpp"
#include "qshield/synthetic.hpp"
#include "qshield/trainer.hpp"

namespace qshield::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 20190101;

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested.store(true); }

// "benign=10,sqli=10" -> counts; classes not named get zero.
ClassCounts parse_counts(const std::string& spec) {
  ClassCounts counts{};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "bad count \"" + item + "\"");
    const auto label = parse_label(item.substr(0, eq));
    if (!label) throw Error(ErrorCode::kUnknownLabel, "unknown class \"" + item.substr(0, eq) + "\"");
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
    }
    if (n < 0 || used != item.size() - eq - 1) {
      throw Error(ErrorCode::kConfig, "bad count \"" + item + "\"");
    }
    counts[label_index(*label)] = static_cast<std::size_t>(n);
  }
  return counts;
}

json verdict_json(const Verdict& v) {
  return {{"class", label_name(v.predicted)},
          {"probs", v.probs},
          {"confidence", v.confidence},
          {"model_version", v.model_version}};
}

void print_report(std::ostream& out, const MetricsReport& report, const std::string& format) {
  if (format != "table") out << metrics_to_json(report) << '\n';
  if (format == "both") out << '\n';
  if (format != "json") out << metrics_to_table(report);
}

struct TrainArgs {
  std::string corpus, output, history, validation, init;
  TrainConfig train;
  ModelConfig model;
  std::uint64_t seed = kDefaultSeed;
};

int do_train(const TrainArgs& a, std::ostream& out) {
  const Corpus corpus = load_corpus(a.corpus);
  std::optional<Corpus> validation;
  if (!a.validation.empty()) validation = load_corpus(a.validation);

  TrainConfig tc = a.train;
  tc.seed = a.seed;
  ModelParams init;
  ModelConfig mc = a.model;
  if (!a.init.empty()) {
    auto loaded = load_model(a.init);
    init = std::move(loaded.params);
    mc = loaded.config;
  } else {
    mc.seed = a.seed;
    mc.validate();
    init = init_params(mc);
  }

  const auto result = train(init, mc, corpus, tc, validation ? &*validation : nullptr);
  save_model(result.params, mc, a.output);

  const std::string history_path = a.history.empty() ? a.output + ".history.csv" : a.history;
  std::ofstream history(history_path, std::ios::trunc);
  if (!history) throw Error(ErrorCode::kIo, "cannot write history " + history_path);
  write_history_csv(history, result.history);

  for (const auto& e : result.history.epochs) {
    out << "epoch " << e.epoch << "  mean loss " << std::fixed << std::setprecision(4) << e.mean_loss;
    if (e.validation) out << "  val acc " << std::setprecision(2) << e.validation->accuracy * 100 << '%';
    out << '\n';
  }
  out << "model v" << result.params.version << " written to " << a.output << '\n'
      << "history written to " << history_path << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string model, corpus, train_corpus, format = "both";
  bool baseline = false;
  TrainConfig baseline_train;
  std::uint64_t seed = kDefaultSeed;
};

int do_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.model.empty() && !a.baseline) {
    err << "eval: --model is required unless --baseline is given\n";
    return kExitUsage;
  }
  if (a.baseline && a.train_corpus.empty()) {
    err << "eval: --baseline needs --train to fit the TF-IDF model\n";
    return kExitUsage;
  }
  const Corpus test = load_corpus(a.corpus);
  if (!a.model.empty()) {
    const auto loaded = load_model(a.model);
    print_report(out, evaluate(loaded.params, loaded.config, test), a.format);
  }
  if (a.baseline) {
    TrainConfig tc = a.baseline_train;
    tc.seed = a.seed;
    if (!a.model.empty()) out << '\n';
    print_report(out, baseline_train_eval(load_corpus(a.train_corpus), test, tc), a.format);
  }
  return kExitOk;
}

struct InitArgs {
  std::string output;
  ModelConfig model;
  std::uint64_t seed = kDefaultSeed;
  bool zero = false;
};

int do_init(const InitArgs& a, std::ostream& out) {
  ModelConfig mc = a.model;
  mc.seed = a.seed;
  mc.validate();
  ModelParams params = init_params(mc);
  if (a.zero) {
    for (auto& t : tensors(params)) std::fill(t.values.begin(), t.values.end(), 0.0);
  }
  save_model(params, mc, a.output);
  out << "model v" << params.version << " written to " << a.output << '\n';
  return kExitOk;
}

struct ServeArgs {
  std::string config, data_dir, host, model, seed_corpus, ui_dir;
  int port = 0;
  double threshold = 0, sampling_rate = 0;
  std::size_t retrain_count = 0;
  std::uint64_t seed = 0;
};

int do_serve(const ServeArgs& a, const CLI::App& cmd, std::ostream& out) {
  using gateway::ServiceConfig;
  std::optional<std::filesystem::path> explicit_config;
  if (!a.config.empty()) explicit_config = a.config;
  ServiceConfig config;
  if (const auto path = gateway::resolve_config_path(explicit_config)) {
    config = gateway::load_service_config(*path);
  }
  if (cmd.count("--data-dir")) config.data_dir = a.data_dir;
  if (cmd.count("--host")) config.listen_host = a.host;
  if (cmd.count("--port")) config.listen_port = a.port;
  if (cmd.count("--threshold")) config.confidence_threshold = a.threshold;
  if (cmd.count("--sampling-rate")) config.sampling_rate = a.sampling_rate;
  if (cmd.count("--retrain-count")) config.retrain_trigger_count = a.retrain_count;
  if (cmd.count("--seed")) config.seed = a.seed;
  if (cmd.count("--ui-dir")) config.ui_dir = a.ui_dir;
  config.validate();

  gateway::GatewayService::Options options{config, std::nullopt, std::nullopt};
  if (!a.model.empty()) options.initial_model = a.model;
  if (!a.seed_corpus.empty()) options.seed_corpus = a.seed_corpus;
  gateway::GatewayService service(std::move(options));
  if (!service.snapshot()) {
    throw Error(ErrorCode::kUnavailable,
                "no model in " + (config.data_dir / "models").string() + " and no --model given");
  }

  std::optional<std::filesystem::path> ui;
  if (!config.ui_dir.empty()) ui = config.ui_dir;
  gateway::HttpServer server(service, ui);
  const int port = server.bind(config.listen_host, config.listen_port);

  g_stop_requested.store(false);
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);
  server.start();
  out << "serving model v" << service.snapshot()->params.version << " on http://"
      << config.listen_host << ':' << port << '\n'
      << std::flush;
  while (!g_stop_requested.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  service.flush();
  out << "stopped\n";
  return kExitOk;
}

// Maps an HTTP reply from the gateway to an exit code, printing the body.
int report_http(const httplib::Result& res, const std::string& server, std::ostream& out,
                std::ostream& err) {
  if (!res) {
    err << "cannot reach " << server << ": " << httplib::to_string(res.error()) << '\n';
    return kExitFailure;
  }
  const json body = json::parse(res->body, nullptr, false);
  if (res->status != 200) {
    err << "server returned " << res->status;
    if (body.is_object() && body.contains("message")) err << ": " << body["message"].get<std::string>();
    err << '\n';
    return kExitFailure;
  }
  out << (body.is_discarded() ? res->body : body.dump(2)) << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Character-embedding CNN detector for malicious web requests.", "qshield"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  const auto add_model_flags = [](CLI::App* cmd, ModelConfig& m) {
    cmd->add_option("--embedding-dim", m.embedding_dim, "Embedding width k")->capture_default_str();
    cmd->add_option("--filter-heights", m.filter_heights, "Filter heights")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--filters-per-height", m.filters_per_height, "Filters per height")
        ->capture_default_str();
    cmd->add_option("--max-seq-len", m.max_seq_len, "Input length L")->capture_default_str();
    cmd->add_option("--dropout", m.dropout_p, "Dropout probability")->capture_default_str();
    cmd->add_flag("--bias", m.use_bias, "Add per-filter and output biases");
  };

  // train
  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled corpus");
  train_cmd->add_option("-c,--corpus", train_args.corpus, "Training corpus (JSONL)")->required();
  train_cmd->add_option("-o,--output", train_args.output, "Model file to write")->required();
  train_cmd->add_option("--history", train_args.history, "Loss history CSV (default <output>.history.csv)");
  train_cmd->add_option("--validation", train_args.validation, "Corpus evaluated after each epoch");
  train_cmd->add_option("--init", train_args.init, "Warm-start from this model file");
  train_cmd->add_option("--epochs", train_args.train.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train_args.train.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", train_args.train.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--lambda", train_args.train.lambda, "L2 strength")->capture_default_str();
  train_cmd->add_option("--patience", train_args.train.early_stop_patience,
                        "Early stopping patience in epochs (0 = off)");
  train_cmd->add_option("--optimizer", train_args.train.optimizer, "adam or sgd")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, OptimizerKind>{{"adam", OptimizerKind::kAdam},
                                               {"sgd", OptimizerKind::kSgd}}));
  train_cmd->add_option("--seed", train_args.seed)->capture_default_str();
  add_model_flags(train_cmd, train_args.model);

  // eval
  EvalArgs eval_args;
  eval_args.baseline_train.epochs = 10;
  eval_args.baseline_train.learning_rate = 1e-2;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on a labeled corpus");
  eval_cmd->add_option("-m,--model", eval_args.model, "Model file");
  eval_cmd->add_option("-c,--corpus", eval_args.corpus, "Test corpus (JSONL)")->required();
  eval_cmd->add_flag("--baseline", eval_args.baseline, "Also fit and score the TF-IDF baseline");
  eval_cmd->add_option("--train", eval_args.train_corpus, "Training corpus for --baseline");
  eval_cmd->add_option("--baseline-epochs", eval_args.baseline_train.epochs)->capture_default_str();
  eval_cmd->add_option("--baseline-lr", eval_args.baseline_train.learning_rate)->capture_default_str();
  eval_cmd->add_option("--format", eval_args.format, "json, table or both")
      ->check(CLI::IsMember({"json", "table", "both"}))
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed)->capture_default_str();

  // predict
  std::string predict_model, predict_text;
  auto* predict_cmd = app.add_subcommand("predict", "Classify one query string");
  predict_cmd->add_option("-m,--model", predict_model, "Model file")->required();
  predict_cmd->add_option("text", predict_text, "Raw query string")->required();

  // init
  InitArgs init_args;
  auto* init_cmd = app.add_subcommand("init", "Write a freshly initialized model (version 0)");
  init_cmd->add_option("-o,--output", init_args.output, "Model file to write")->required();
  init_cmd->add_flag("--zero", init_args.zero, "Set every weight to zero");
  init_cmd->add_option("--seed", init_args.seed)->capture_default_str();
  add_model_flags(init_cmd, init_args.model);

  // gen-data
  std::string counts_spec, gen_output;
  std::vector<std::string> exclude;
  std::uint64_t gen_seed = kDefaultSeed;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic labeled corpus");
  gen_cmd->add_option("--counts", counts_spec,
                      "Per-class counts, e.g. benign=10,sqli=10 (default 2000/472/720/599/511)");
  gen_cmd->add_option("--exclude", exclude, "Template families to leave out")->delimiter(',');
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();
  gen_cmd->add_option("-o,--output", gen_output, "Corpus file to write")->required();

  // balance
  std::string balance_in, balance_out;
  std::size_t threshold = 0;
  std::uint64_t balance_seed = kDefaultSeed;
  auto* balance_cmd = app.add_subcommand("balance", "Cap every class at a sample threshold");
  balance_cmd->add_option("-c,--corpus", balance_in)->required();
  balance_cmd->add_option("-t,--threshold", threshold, "Per-class cap")->required();
  balance_cmd->add_option("--seed", balance_seed)->capture_default_str();
  balance_cmd->add_option("-o,--output", balance_out)->required();

  // split
  std::string split_in, split_train, split_test;
  double test_fraction = 0.2;
  std::uint64_t split_seed = kDefaultSeed;
  auto* split_cmd = app.add_subcommand("split", "Stratified train/test split");
  split_cmd->add_option("-c,--corpus", split_in)->required();
  split_cmd->add_option("--test-fraction", test_fraction)->capture_default_str();
  split_cmd->add_option("--seed", split_seed)->capture_default_str();
  split_cmd->add_option("--train-out", split_train)->required();
  split_cmd->add_option("--test-out", split_test)->required();

  // serve
  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the detection gateway");
  serve_cmd->add_option("--config", serve_args.config,
                        std::string("Service config JSON (default $") + gateway::kConfigEnvVar + ")");
  serve_cmd->add_option("--data-dir", serve_args.data_dir);
  serve_cmd->add_option("--host", serve_args.host);
  serve_cmd->add_option("--port", serve_args.port, "Listen port (0 picks a free one)");
  serve_cmd->add_option("--model", serve_args.model, "Model used when the data directory has none");
  serve_cmd->add_option("--seed-corpus", serve_args.seed_corpus,
                        "Corpus copied into a new labeled database");
  serve_cmd->add_option("--threshold", serve_args.threshold, "Confidence threshold");
  serve_cmd->add_option("--sampling-rate", serve_args.sampling_rate, "Capture probability");
  serve_cmd->add_option("--retrain-count", serve_args.retrain_count, "Labels per auto retrain");
  serve_cmd->add_option("--seed", serve_args.seed, "Capture sampling seed");
  serve_cmd->add_option("--ui-dir", serve_args.ui_dir, "Static review UI directory");

  // review
  std::string server = "http://127.0.0.1:8080";
  auto* review_cmd = app.add_subcommand("review", "Work the review queue of a running gateway");
  review_cmd->require_subcommand(1);
  review_cmd->add_option("--server", server, "Gateway base URL")->capture_default_str();
  std::size_t list_limit = 50;
  std::string list_cursor;
  auto* list_cmd = review_cmd->add_subcommand("list", "Show pending items");
  list_cmd->add_option("--limit", list_limit)->capture_default_str();
  list_cmd->add_option("--cursor", list_cursor);
  std::string label_id, label_value;
  auto* label_cmd = review_cmd->add_subcommand("label", "Label or discard a pending item");
  label_cmd->add_option("id", label_id, "Review item id")->required();
  label_cmd->add_option("label", label_value, "Class name or \"discard\"")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return do_train(train_args, out);
    if (*eval_cmd) return do_eval(eval_args, out, err);
    if (*predict_cmd) {
      const auto loaded = load_model(predict_model);
      out << verdict_json(predict(loaded.params, loaded.config, predict_text)).dump() << '\n';
      return kExitOk;
    }
    if (*init_cmd) return do_init(init_args, out);
    if (*gen_cmd) {
      std::vector<Family> excluded;
      for (const auto& name : exclude) {
        const auto f = parse_family(name);
        if (!f) throw Error(ErrorCode::kConfig, "unknown template family \"" + name + "\"");
        excluded.push_back(*f);
      }
      const ClassCounts counts = counts_spec.empty() ? kReferenceCounts : parse_counts(counts_spec);
      const Corpus corpus = generate_synthetic(counts, gen_seed, excluded);
      save_corpus(corpus, gen_output);
      out << corpus.size() << " samples written to " << gen_output << '\n';
      return kExitOk;
    }
    if (*balance_cmd) {
      const Corpus corpus = balance_by_threshold(load_corpus(balance_in), threshold, balance_seed);
      save_corpus(corpus, balance_out);
      out << corpus.size() << " samples written to " << balance_out << '\n';
      return kExitOk;
    }
    if (*split_cmd) {
      const auto split = stratified_split(load_corpus(split_in), test_fraction, split_seed);
      save_corpus(split.train, split_train);
      save_corpus(split.test, split_test);
      out << split.train.size() << " train / " << split.test.size() << " test samples\n";
      for (const Label l : split.undersized_classes) {
        err << "warning: class " << label_name(l) << " is too small to appear in both splits\n";
      }
      return kExitOk;
    }
    if (*serve_cmd) return do_serve(serve_args, *serve_cmd, out);
    if (*review_cmd) {
      httplib::Client client(server);
      client.set_connection_timeout(std::chrono::seconds(5));
      if (*list_cmd) {
        std::string path = "/v1/review/pending?limit=" + std::to_string(list_limit);
        if (!list_cursor.empty()) path += "&cursor=" + httplib::detail::encode_query_param(list_cursor);
        return report_http(client.Get(path), server, out, err);
      }
      const json body = {{"label", label_value}};
      return report_http(client.Post("/v1/review/" + label_id + "/label", body.dump(), "application/json"),
                         server, out, err);
    }
  } catch (const Error& e) {
    err << "qshield: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "qshield: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace qshield::cli
