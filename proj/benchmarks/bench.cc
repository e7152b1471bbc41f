// Copyright 2026 The ELA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "ela/common/rng.h"
#include "ela/games/demonstrators.h"
#include "ela/games/env.h"
#include "ela/games/kuhn.h"
#include "ela/nn/tape.h"
#include "ela/ol/offline.h"
#include "ela/pvrnn/pvrnn.h"

namespace ela {
namespace {

using nn::Matrix;

Matrix Random(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal();
  return m;
}

// Forward and backward through one affine + tanh layer of a given width.
void BM_TapeAffineTanh(benchmark::State& state) {
  const auto width = static_cast<Eigen::Index>(state.range(0));
  Rng rng(1);
  const Matrix x = Random(32, width, rng);
  const Matrix w = Random(width, width, rng);
  const Matrix b = Random(1, width, rng);
  for (auto _ : state) {
    nn::Tape tape;
    nn::Var out = nn::Sum(nn::Tanh(
        nn::Affine(tape.Constant(x), tape.Variable(w), tape.Variable(b))));
    tape.Backward(out);
    benchmark::DoNotOptimize(tape.Value(out.id));
  }
}
BENCHMARK(BM_TapeAffineTanh)->Arg(8)->Arg(64)->Arg(256);

games::Dataset RpsData(int games, int rounds) {
  const games::EnvConfig env{games::EnvKind::kRps, rounds};
  return games::GenerateDataset(
      games::ParsePoolSpec(env.kind, "uniform:0:1,biased:0.2:1,biased:0.5:1"), games, env, 7);
}

// One P-VRNN batch loss with gradients, batch of 32 sequences of length T.
void BM_PvrnnBatchLoss(benchmark::State& state) {
  const auto data = RpsData(16, static_cast<int>(state.range(0)));
  const auto sequences = pvrnn::ToSequences(data);
  std::vector<const pvrnn::Sequence*> batch;
  for (const auto& s : sequences) batch.push_back(&s);
  pvrnn::PvrnnModel model(sequences[0].obs.cols(), 3, pvrnn::PvrnnHyper{}, 3);
  Rng rng(5);
  const Matrix l = Random(static_cast<Eigen::Index>(batch.size()), model.hyper().l_dim, rng);
  for (auto _ : state) {
    nn::Tape tape;
    Rng noise(9);
    auto loss = model.BatchLoss(tape, batch, tape.Variable(l), std::span<Rng>(&noise, 1));
    tape.Backward(loss.total);
    model.store().ZeroGrad();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch.size()));
}
BENCHMARK(BM_PvrnnBatchLoss)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

// A full behavior-cloning epoch over a small RPS dataset.
void BM_BcEpoch(benchmark::State& state) {
  const auto data = RpsData(100, 100);
  ol::PolicyHyper hyper;
  hyper.epochs = 1;
  for (auto _ : state) {
    auto result = ol::TrainBc(data, hyper, 11);
    benchmark::DoNotOptimize(result.epoch_log_likelihood);
  }
}
BENCHMARK(BM_BcEpoch)->Unit(benchmark::kMillisecond);

void BM_KuhnBestResponse(benchmark::State& state) {
  const auto strategy = games::KuhnNoisyNashStrategy(0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(games::KuhnBestResponse(strategy, 0));
    benchmark::DoNotOptimize(games::KuhnBestResponse(strategy, 1));
  }
}
BENCHMARK(BM_KuhnBestResponse);

}  // namespace
}  // namespace ela

BENCHMARK_MAIN();
