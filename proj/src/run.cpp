#include "meadow/run.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "meadow/parallel/partition.hpp"

namespace meadow {

const char* to_string(Algorithm a) {
  return a == Algorithm::Efficient ? "efficient" : "exhaustive";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "efficient") return Algorithm::Efficient;
  if (name == "exhaustive") return Algorithm::Exhaustive;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

CanonicalModel instantiate_with(const ir::SymbolicModel& model, const DataBundle& data,
                                Algorithm algorithm, std::size_t threads,
                                const inst::InstantiateOptions& opts, PipelineTimings* timings) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  inst::PreparedModel p = inst::prepare(model, data);
  auto t1 = clock::now();
  CanonicalModel out;
  if (algorithm == Algorithm::Exhaustive) {
    out = inst::build_canonical(p, inst::exhaustive_terms(p), opts);
  } else if (threads > 1) {
    out = par::instantiate_parallel(p, par::plan_partition(p, threads), opts, threads);
  } else {
    out = inst::build_canonical(p, inst::efficient_terms(p), opts);
  }
  auto t2 = clock::now();
  if (timings) {
    timings->normalize_seconds = std::chrono::duration<double>(t1 - t0).count();
    timings->instantiate_seconds = std::chrono::duration<double>(t2 - t1).count();
  }
  return out;
}

const std::vector<std::string>& bench_suites() {
  static const std::vector<std::string> names{"flow", "pmedian", "production"};
  return names;
}

gen::GeneratedModel bench_instance(const std::string& suite, std::size_t size,
                                   std::uint64_t seed) {
  if (suite == "flow") {
    return gen::gen_min_cost_flow(std::max<std::size_t>(2, size / 10), size, seed, true);
  }
  if (suite == "pmedian") return gen::gen_p_median(size, 50, 5, seed);
  if (suite == "production") {
    auto s = gen::gen_production_planning(static_cast<int>(size), 2, 6, seed);
    return {std::move(s.model), std::move(s.data)};
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace meadow
