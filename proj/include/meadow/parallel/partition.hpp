#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/inst/instantiate.hpp"

namespace meadow::par {

/// Split of space(pivot) into disjoint value sets, one per worker. Without a
/// pivot there is a single part holding everything.
struct PartitionPlan {
  std::optional<std::string> pivot;
  std::vector<std::vector<Index>> parts;

  std::size_t num_parts() const { return pivot ? parts.size() : 1; }
};

/// Picks the global placeholder whose split gives the smallest maximum part
/// load (tuples of sums binding it; blocks not indexed by it load part 0),
/// and cuts its sorted space into contiguous ranges of near-equal load.
/// Returns a single-part plan when workers <= 1 or no candidate exists.
PartitionPlan plan_partition(const inst::PreparedModel& prepared, std::size_t workers);

/// Throws std::invalid_argument unless the parts are pairwise disjoint and
/// cover space(pivot) exactly.
void check_plan(const inst::PreparedModel& prepared, const PartitionPlan& plan);

/// What worker `part` sees: tuple filters for sums binding the pivot, and
/// which blocks it instantiates (blocks not indexed by the pivot, and the
/// objective, belong to part 0).
struct PartView {
  inst::TupleFilter filter;
  std::vector<char> owns_block;
};
PartView part_view(const inst::PreparedModel& prepared, const PartitionPlan& plan,
                   std::size_t part);

/// Runs the efficient kernel on every part (OpenMP, `threads` workers; 0 means
/// one per part) and concatenates the streams in part order. A failing worker
/// surfaces as WorkerError carrying its part id.
inst::TermStreams parallel_terms(const inst::PreparedModel& prepared, const PartitionPlan& plan,
                                 std::size_t threads = 0,
                                 std::vector<inst::TermStreams>* per_part = nullptr);

CanonicalModel instantiate_parallel(const inst::PreparedModel& prepared, const PartitionPlan& plan,
                                    const inst::InstantiateOptions& opts = {},
                                    std::size_t threads = 0);

/// prepare + plan_partition(workers) + instantiate_parallel.
CanonicalModel instantiate_parallel(const ir::SymbolicModel& model, const DataBundle& data,
                                    std::size_t workers,
                                    const inst::InstantiateOptions& opts = {});

/// Default worker count: MEADOW_THREADS if set and positive, else the OpenMP
/// maximum.
std::size_t default_threads();

}  // namespace meadow::par
