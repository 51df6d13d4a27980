// Serial reference vs OpenMP kernels for the verify sweep and the oracle grid.

#include <benchmark/benchmark.h>

#include "kneejerk/problem.hpp"
#include "kneejerk/sweep.hpp"

namespace {

const kj::Problem& problem(const char* name) {
  static const kj::Problem dlr = kj::load_problem(KJ_DATA_DIR "/problems/dlr.json");
  static const kj::Problem k4 = kj::load_problem(KJ_DATA_DIR "/problems/k4.json");
  return std::string_view(name) == "dlr" ? dlr : k4;
}

void BM_VerifySweep(benchmark::State& state, const char* name, kj::Exec exec) {
  const kj::Problem& p = problem(name);
  kj::VerifyOptions opt;
  opt.samples = static_cast<std::size_t>(state.range(0));
  opt.argmax_competitors = 200;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kj::verify_sweep(p.expr, p.structure, opt, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GridSearch(benchmark::State& state, const char* name, kj::Exec exec) {
  const kj::Problem& p = problem(name);
  const auto resolution = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kj::grid_search(p.expr, p.structure, resolution, exec));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(kj::grid_size(p.structure, resolution)));
}

}  // namespace

BENCHMARK_CAPTURE(BM_VerifySweep, dlr_serial, "dlr", kj::Exec::serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VerifySweep, dlr_parallel, "dlr", kj::Exec::parallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VerifySweep, k4_serial, "k4", kj::Exec::serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VerifySweep, k4_parallel, "k4", kj::Exec::parallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridSearch, dlr_serial, "dlr", kj::Exec::serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridSearch, dlr_parallel, "dlr", kj::Exec::parallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridSearch, k4_serial, "k4", kj::Exec::serial)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridSearch, k4_parallel, "k4", kj::Exec::parallel)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
