#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/gen/generators.hpp"
#include "meadow/inst/instantiate.hpp"

namespace meadow {

enum class Algorithm { Efficient, Exhaustive };

const char* to_string(Algorithm a);
/// efficient or exhaustive. Throws std::invalid_argument.
Algorithm parse_algorithm(const std::string& name);

struct PipelineTimings {
  double normalize_seconds = 0;
  double instantiate_seconds = 0;
};

/// prepare + term generation + build. Efficient with threads > 1 goes through
/// the parallel path; exhaustive is always serial.
CanonicalModel instantiate_with(const ir::SymbolicModel& model, const DataBundle& data,
                                Algorithm algorithm, std::size_t threads,
                                const inst::InstantiateOptions& opts = {},
                                PipelineTimings* timings = nullptr);

/// Benchmark suites: flow (size = |E|, |V| = |E|/10, unit costs), pmedian
/// (size = customers, 50 candidates, 5 facilities), production (size = T,
/// 2 plants, 6 items).
const std::vector<std::string>& bench_suites();
/// Throws std::invalid_argument for an unknown suite.
gen::GeneratedModel bench_instance(const std::string& suite, std::size_t size,
                                   std::uint64_t seed = 1);

}  // namespace meadow
