// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

// Serial reference against the OpenMP kernel on the default sweep.
// Arg(n) is the OpenMP thread count.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "guarddiv/forensics.hpp"

namespace {

using namespace guarddiv;

const std::vector<double>& gammas() {
  static const auto g = forensics::generate_sweep(forensics::GammaSweep{});
  return g;
}

void BM_Serial(benchmark::State& state) {
  const auto kind = static_cast<fn::FunctionKind>(state.range(0));
  for (auto _ : state) {
    auto out = forensics::run_experiment_serial(kind, fn::GuardConfig{}, gammas());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(gammas().size()));
}

void BM_Parallel(benchmark::State& state) {
  const auto kind = static_cast<fn::FunctionKind>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto out = forensics::run_experiment(kind, fn::GuardConfig{}, gammas());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(gammas().size()));
}

constexpr auto kH = static_cast<std::int64_t>(fn::FunctionKind::H);
constexpr auto kH1 = static_cast<std::int64_t>(fn::FunctionKind::H1);

BENCHMARK(BM_Serial)->ArgName("kind")->Arg(kH)->Arg(kH1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)
    ->ArgNames({"kind", "threads"})
    ->ArgsProduct({{kH, kH1}, {1, 2, 4, 8}})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
