#include <benchmark/benchmark.h>

#include <map>
#include <utility>

#include "meadow/emit/lp.hpp"
#include "meadow/run.hpp"

using namespace meadow;

namespace {

const gen::GeneratedModel& instance(const std::string& suite, std::size_t size) {
  static std::map<std::pair<std::string, std::size_t>, gen::GeneratedModel> cache;
  auto key = std::make_pair(suite, size);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, bench_instance(suite, size)).first;
  return it->second;
}

void run(benchmark::State& state, const std::string& suite, Algorithm algorithm,
         std::size_t threads) {
  const auto& g = instance(suite, static_cast<std::size_t>(state.range(0)));
  std::size_t nnz = 0;
  for (auto _ : state) {
    CanonicalModel m = instantiate_with(g.model, g.data, algorithm, threads);
    nnz = m.num_entries();
    benchmark::DoNotOptimize(m);
  }
  state.counters["nonzeros"] = static_cast<double>(nnz);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * nnz));
}

void BM_FlowSerial(benchmark::State& s) { run(s, "flow", Algorithm::Efficient, 1); }
void BM_FlowParallel(benchmark::State& s) {
  run(s, "flow", Algorithm::Efficient, static_cast<std::size_t>(s.range(1)));
}
void BM_FlowExhaustive(benchmark::State& s) { run(s, "flow", Algorithm::Exhaustive, 1); }
void BM_PMedianSerial(benchmark::State& s) { run(s, "pmedian", Algorithm::Efficient, 1); }
void BM_PMedianParallel(benchmark::State& s) {
  run(s, "pmedian", Algorithm::Efficient, static_cast<std::size_t>(s.range(1)));
}

void BM_EmitLp(benchmark::State& state) {
  const auto& g = instance("flow", static_cast<std::size_t>(state.range(0)));
  CanonicalModel m = instantiate_with(g.model, g.data, Algorithm::Efficient, 1);
  for (auto _ : state) benchmark::DoNotOptimize(emit::write_lp_string(m));
}

}  // namespace

BENCHMARK(BM_FlowSerial)->RangeMultiplier(2)->Range(100000, 400000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FlowParallel)
    ->ArgsProduct({{100000, 400000}, {2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_FlowExhaustive)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PMedianSerial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PMedianParallel)
    ->ArgsProduct({{20000}, {2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_EmitLp)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
