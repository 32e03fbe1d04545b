//
// Copyright 2026 The rpbandit Authors
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
//

#include <benchmark/benchmark.h>

#include <random>

#include "rpbandit/robust.hpp"

namespace {

void BM_SpectralFilter(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  rpbandit::Matrix points(dim, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < dim; ++i) points(i, j) = normal(gen);
  }
  // Five percent of the samples sit far out along the first axis.
  for (int j = 0; j < n / 20; ++j) points(0, j) += 50.0;
  for (auto _ : state) {
    rpbandit::Stream rng(3);
    benchmark::DoNotOptimize(rpbandit::SpectralFilter(points, 1.0, rng));
  }
}
BENCHMARK(BM_SpectralFilter)
    ->Args({5, 1000})
    ->Args({10, 5000})
    ->Unit(benchmark::kMillisecond);

}  // namespace
