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

#include "qshield/trainer.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "qshield/error.hpp"

namespace qshield {

using tensor::Mode;

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (batch_size == 0) fail("batch_size must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail("learning_rate must be a finite non-negative number");
  }
  if (!(lambda >= 0.0)) fail("lambda must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, const ModelParams& shape) : config_(config) {
    for (const auto& t : tensors(shape)) {
      m_.emplace_back(t.values.size(), 0.0);
      v_.emplace_back(t.values.size(), 0.0);
    }
  }

  void step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    auto ps = tensors(params);
    const auto gs = tensors(grads);
    const double lr = config_.learning_rate;
    if (config_.optimizer == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < ps[i].values.size(); ++j) ps[i].values[j] -= lr * gs[i].values[j];
      }
      return;
    }
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t j = 0; j < ps[i].values.size(); ++j) {
        const double g = gs[i].values[j];
        m[j] = b1 * m[j] + (1.0 - b1) * g;
        v[j] = b2 * v[j] + (1.0 - b2) * g * g;
        const double m_hat = m[j] / c1;
        const double v_hat = v[j] / c2;
        ps[i].values[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
      }
    }
  }

 private:
  const TrainConfig& config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_ = 0;
};

// Adds the L2 gradient into `grads` and returns the penalty.
double apply_l2(const ModelParams& params, ModelParams& grads, double lambda) {
  std::vector<std::span<const double>> reg;
  std::vector<std::span<double>> reg_grads;
  const auto ps = tensors(params);
  auto gs = tensors(grads);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i].regularized) continue;
    reg.push_back(ps[i].values);
    reg_grads.push_back(gs[i].values);
  }
  const auto l2 = tensor::l2_penalty(reg, lambda);
  for (std::size_t i = 0; i < reg_grads.size(); ++i) {
    for (std::size_t j = 0; j < reg_grads[i].size(); ++j) reg_grads[i][j] += l2.gradients[i][j];
  }
  return l2.penalty;
}

std::vector<IndexSequence> encode_corpus(const Corpus& corpus, std::size_t max_seq_len) {
  std::vector<IndexSequence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(encode_query(s.text, max_seq_len));
  return out;
}

double mean_cross_entropy(const ModelParams& params, const ModelConfig& config,
                          const std::vector<IndexSequence>& seqs, const Corpus& corpus) {
  const FilterProjection projection(params);
  Rng unused(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto fr = forward(params, config, projection, seqs[i], Mode::kEval, unused);
    sum += tensor::softmax_cross_entropy(fr.cache.logits, label_index(corpus[i].label)).loss;
  }
  return seqs.empty() ? 0.0 : sum / static_cast<double>(seqs.size());
}

}  // namespace

TrainResult train(const ModelParams& init, const ModelConfig& model_config, const Corpus& corpus,
                  const TrainConfig& config, const Corpus* validation, const StepCallback& on_step) {
  config.validate();
  model_config.validate();
  check_shapes(init, model_config);
  if (corpus.empty()) throw Error(ErrorCode::kConfig, "training corpus is empty");

  TrainResult result{init, {}};
  ModelParams& params = result.params;
  TrainHistory& history = result.history;

  const auto seqs = encode_corpus(corpus, model_config.max_seq_len);
  std::vector<IndexSequence> val_seqs;
  if (validation) val_seqs = encode_corpus(*validation, model_config.max_seq_len);

  Rng root(config.seed);
  Rng shuffle_rng = root.fork();
  Rng dropout_rng = root.fork();
  Optimizer optimizer(config, params);
  ModelParams grads = zeros_like(params);

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::optional<double> best_val;
  ModelParams best_params;
  std::size_t epochs_without_improvement = 0;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& t : tensors(grads)) std::fill(t.values.begin(), t.values.end(), 0.0);

      const FilterProjection projection(params);
      double ce = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto fr = forward(params, model_config, projection, seqs[i], Mode::kTrain, dropout_rng);
        ce += backward(params, model_config, fr.cache, corpus[i].label, scale, grads);
      }
      ce *= scale;
      const double penalty = apply_l2(params, grads, config.lambda);
      TrainStep record{step, epoch, ce, penalty, ce + penalty,
                       {order.begin() + static_cast<std::ptrdiff_t>(start),
                        order.begin() + static_cast<std::ptrdiff_t>(end)}};
      if (!std::isfinite(record.total)) {
        throw Error(ErrorCode::kDivergedTraining,
                    "training diverged at step " + std::to_string(step) + " (epoch " +
                        std::to_string(epoch) + "): loss is not finite");
      }
      if (on_step) on_step(record);
      history.steps.push_back(std::move(record));
      optimizer.step(params, grads);
      if (!params.all_finite()) {
        throw Error(ErrorCode::kDivergedTraining,
                    "training diverged at step " + std::to_string(step) + " (epoch " +
                        std::to_string(epoch) + "): parameters are not finite");
      }
      epoch_loss += record.total;
      ++epoch_steps;
      ++step;
    }

    EpochSummary summary;
    summary.epoch = epoch;
    summary.mean_loss = epoch_steps ? epoch_loss / static_cast<double>(epoch_steps) : 0.0;
    if (validation && !validation->empty()) {
      summary.validation_loss = mean_cross_entropy(params, model_config, val_seqs, *validation);
      summary.validation = evaluate(params, model_config, *validation);
    }
    history.epochs.push_back(summary);

    if (config.early_stop_patience > 0 && summary.validation_loss) {
      if (!best_val || *summary.validation_loss < *best_val) {
        best_val = summary.validation_loss;
        best_params = params;
        epochs_without_improvement = 0;
      } else if (++epochs_without_improvement >= config.early_stop_patience) {
        params = best_params;
        history.early_stopped = true;
        break;
      }
    }
  }

  if (!params.all_finite()) {
    throw Error(ErrorCode::kDivergedTraining, "training produced non-finite parameters");
  }
  params.version = init.version + 1;
  return result;
}

TrainResult warm_start_retrain(const ModelParams& old, const ModelConfig& model_config,
                               const Corpus& updated_corpus, const TrainConfig& config) {
  return train(old, model_config, updated_corpus, config);
}

std::vector<Label> predict_labels(const ModelParams& params, const ModelConfig& config,
                                  const Corpus& corpus) {
  const FilterProjection projection(params);
  std::vector<Label> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(predict(params, config, projection, s.text).predicted);
  return out;
}

MetricsReport evaluate(const ModelParams& params, const ModelConfig& config, const Corpus& corpus) {
  std::vector<Label> actual;
  actual.reserve(corpus.size());
  for (const auto& s : corpus) actual.push_back(s.label);
  const auto predicted = predict_labels(params, config, corpus);
  return metrics_from_confusion(confusion_from_predictions(actual, predicted), "cnn");
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "step,ce_loss,l2_penalty,total\n";
  out.precision(10);
  for (const auto& s : history.steps) {
    out << s.step << ',' << s.ce_loss << ',' << s.l2_penalty << ',' << s.total << '\n';
  }
}

}  // namespace qshield
