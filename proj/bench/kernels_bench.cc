// Copyright 2026 The sdtag Authors.
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

// Serial reference kernels against their OpenMP counterparts, and one
// training epoch across thread counts. Note nproc in the sandbox may be 1,
// in which case the parallel variants only measure their overhead.

#include <benchmark/benchmark.h>

#include "sdt/embeddings.h"
#include "sdt/kernels.h"
#include "sdt/rng.h"
#include "sdt/synth.h"
#include "sdt/tagger.h"
#include "sdt/train.h"

namespace sdt {
namespace {

Tensor Random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.Uniform(-1, 1);
  return t;
}

template <bool kSerial>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = Random(n, n, 1), b = Random(n, n, 2);
  Tensor c({n, n});
  for (auto _ : state) {
    if constexpr (kSerial) {
      kernels::serial::Gemm(a, b, c);
    } else {
      kernels::Gemm(a, b, c);
    }
    benchmark::DoNotOptimize(c.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Gemm<true>)->Name("Gemm/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Gemm<false>)->Name("Gemm/openmp")->Arg(64)->Arg(128)->Arg(256);

template <bool kSerial>
void BM_Tanh(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor x = Random(1, n, 3);
  Tensor y({1, n});
  for (auto _ : state) {
    if constexpr (kSerial) {
      kernels::serial::Tanh(x, y);
    } else {
      kernels::Tanh(x, y);
    }
    benchmark::DoNotOptimize(y.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Tanh<true>)->Name("Tanh/serial")->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_Tanh<false>)->Name("Tanh/openmp")->Arg(1 << 12)->Arg(1 << 18);

// One epoch of batch-parallel training on a keyword corpus.
void BM_TrainEpoch(benchmark::State& state) {
  const Corpus corpus = KeywordCorpus(ScidtLabels(), {}, 1);
  const EmbeddingStore store = HashedEmbeddings(corpus, 64, 1);
  TaggerConfig cfg = TaggerConfig::ScaledDown(64);
  cfg.max_epochs = 1;
  const int saved = kernels::MaxThreads();
  kernels::SetMaxThreads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Train(corpus, store, cfg).best_epoch);
  kernels::SetMaxThreads(saved);
}
BENCHMARK(BM_TrainEpoch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sdt

BENCHMARK_MAIN();
