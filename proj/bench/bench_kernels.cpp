/*
 * Copyright 2026 The symsurrogate Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "symsurrogate/megp.hpp"
#include "symsurrogate/spfp.hpp"
#include "symsurrogate/synth.hpp"

namespace {

using namespace symsurrogate;

const Matrix& data() {
  static const Matrix X = [] {
    synth::BlobSpec spec;
    spec.n = 20000;
    return synth::make_blobs(spec).X;
  }();
  return X;
}

megp::Team random_team(std::size_t views, std::size_t classes) {
  megp::GpConfig config;
  Rng rng(7);
  std::vector<std::size_t> dims(data().cols());
  for (std::size_t j = 0; j < dims.size(); ++j) dims[j] = j;
  megp::Team team(views);
  for (auto& view : team) {
    for (std::size_t c = 0; c < classes; ++c) {
      view.push_back(megp::random_tree(dims, 6, megp::InitMethod::kFull, config, rng));
    }
  }
  return team;
}

void BM_EvalReference(benchmark::State& state) {
  const auto team = random_team(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(expr::reference::eval_matrix(team[0][0], data()));
}

void BM_EvalParallel(benchmark::State& state) {
  const auto team = random_team(1, 1);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(expr::eval_matrix(team[0][0], data()));
}

void BM_TeamLogitsReference(benchmark::State& state) {
  const auto team = random_team(4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(megp::reference::team_logits(team, data()));
}

void BM_TeamLogitsParallel(benchmark::State& state) {
  const auto team = random_team(4, 3);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(megp::team_logits(team, data()));
}

void BM_Partition(benchmark::State& state) {
  synth::BlobSpec spec;
  const auto ds = synth::make_blobs(spec);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spfp::partition(ds.X, ds.y));
}

}  // namespace

BENCHMARK(BM_EvalReference);
BENCHMARK(BM_EvalParallel)->Arg(1)->Arg(4);
BENCHMARK(BM_TeamLogitsReference);
BENCHMARK(BM_TeamLogitsParallel)->Arg(1)->Arg(4);
BENCHMARK(BM_Partition)->Arg(1)->Arg(4);

BENCHMARK_MAIN();
