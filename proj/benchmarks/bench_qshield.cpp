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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "qshield/baseline.hpp"
#include "qshield/model.hpp"
#include "qshield/random.hpp"
#include "qshield/synthetic.hpp"
#include "qshield/tensor.hpp"
#include "qshield/trainer.hpp"
#include "qshield/vocab.hpp"

namespace {

using namespace qshield;

const Corpus& bench_corpus() {
  static const Corpus corpus = generate_synthetic({200, 50, 70, 60, 50}, 11);
  return corpus;
}

void BM_ConvFullWidth(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t k = 32;
  Rng rng(1);
  tensor::Matrix x(len, k), filter(3, k);
  for (double& v : x.values()) v = rng.uniform(-1, 1);
  for (double& v : filter.values()) v = rng.uniform(-1, 1);
  for (auto _ : state) {
    auto r = tensor::conv_full_width(x, filter, false, {});
    benchmark::DoNotOptimize(r.output.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * len));
}
BENCHMARK(BM_ConvFullWidth)->Arg(64)->Arg(256);

void BM_Predict(benchmark::State& state) {
  const ModelConfig config;
  const ModelParams params = init_params(config);
  const FilterProjection projection(params);
  const auto& corpus = bench_corpus();
  std::vector<IndexSequence> seqs;
  for (const auto& s : corpus) seqs.push_back(encode_query(s.text, config.max_seq_len));
  Rng rng(0);
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = forward(params, config, projection, seqs[i++ % seqs.size()], tensor::Mode::kEval, rng);
    benchmark::DoNotOptimize(r.verdict.confidence);
  }
}
BENCHMARK(BM_Predict);

void BM_FilterProjection(benchmark::State& state) {
  const ModelConfig config;
  const ModelParams params = init_params(config);
  for (auto _ : state) {
    FilterProjection projection(params);
    benchmark::DoNotOptimize(&projection);
  }
}
BENCHMARK(BM_FilterProjection);

void BM_TrainEpoch(benchmark::State& state) {
  const ModelConfig config;
  const ModelParams init = init_params(config);
  TrainConfig tc;
  tc.epochs = 1;
  for (auto _ : state) {
    auto result = train(init, config, bench_corpus(), tc);
    benchmark::DoNotOptimize(result.params.version);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * bench_corpus().size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_TfidfFitTransform(benchmark::State& state) {
  std::vector<std::string> docs;
  for (const auto& s : bench_corpus()) docs.push_back(percent_decode(s.text));
  for (auto _ : state) {
    const auto vocab = tfidf_fit(docs);
    std::size_t nnz = 0;
    for (const auto& d : docs) nnz += tfidf_transform(vocab, d).entries.size();
    benchmark::DoNotOptimize(nnz);
  }
}
BENCHMARK(BM_TfidfFitTransform)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
