#include <benchmark/benchmark.h>

#include "lfid/enumeration.hpp"

namespace {

std::vector<lfid::Method> methods() {
  return {lfid::method_by_name("LF-HTC"), lfid::method_by_name("Det+eLF-HTC+rec")};
}

void BM_Parallel(benchmark::State& state) {
  const auto pattern = lfid::LatentPattern::by_name("fig5a");
  const auto ms = methods();
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfid::run_benchmark(pattern, static_cast<int>(state.range(0)), ms));
  }
}

void BM_Serial(benchmark::State& state) {
  const auto pattern = lfid::LatentPattern::by_name("fig5a");
  const auto ms = methods();
  for (auto _ : state) {
    benchmark::DoNotOptimize(lfid::run_benchmark_serial(pattern, static_cast<int>(state.range(0)), ms));
  }
}

}  // namespace

BENCHMARK(BM_Parallel)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Serial)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
