/*
 * Copyright 2026 The idioprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <benchmark/benchmark.h>

#include "idioprobe/analyses.hpp"
#include "idioprobe/pca.hpp"
#include "idioprobe/rng.hpp"
#include "idioprobe/stats.hpp"
#include "idioprobe/sweep.hpp"
#include "idioprobe/synth.hpp"

using namespace idioprobe;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.normal();
  return Matrix(rows, cols, std::move(v));
}

Vector gaussian(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void BM_FitRidge(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian(4000, d, 1);
  const Vector y = gaussian(4000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fit_ridge(x, y, 1.0));
}
BENCHMARK(BM_FitRidge)->Arg(10)->Arg(50)->Arg(100);

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector a = gaussian(n, 3), b = gaussian(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(stats::spearman(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity();

void BM_FitPca(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian(5000, dim, 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(x, 50));
}
BENCHMARK(BM_FitPca)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

// Person and population CV on the reference synthetic cell.
void BM_ReferencePipeline(benchmark::State& state) {
  const auto data = generate(SynthConfig::reference());
  const auto projected = reduce(data.embeddings, 50).projected;
  const auto ds = align_participants(projected, data.targets, kSynthSignalFeature);
  const auto plan = plan_for_targets(data.targets, 5, 42);
  const Executor ex(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pipeline(ds, plan, AlphaGrid::standard(), &ex));
  }
}
BENCHMARK(BM_ReferencePipeline)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
