#pragma once

#include <map>
#include <string>

#include "meadow/core/data.hpp"
#include "meadow/ir/model.hpp"

namespace meadow::inst {

/// An expression rewritten so that every leaf is reached through at least one
/// sum and the sums on each root-to-leaf path bind all global placeholders.
/// Rewritten sums refer to `derived_sets`, which shadow the data bundle.
struct NormalizedExpression {
  ir::MultidimExpression expr;
  std::map<std::string, IndexSet> derived_sets;
};

/// Leaves with no sum above them are wrapped in a sum over space(G). A leaf
/// whose path misses some globals gets them appended to the binding of its
/// innermost sum, whose tuples are expanded by the missing spaces.
/// Throws MissingSpace when a space to enumerate is absent from `data`.
NormalizedExpression normalize(const ir::SymbolicModel& model,
                               const ir::MultidimExpression& expr, const DataBundle& data);

/// Looks a set up in `overlay` first, then in `data`. Throws DataError when
/// neither has it.
const IndexSet& resolve_set(const std::string& name, const std::map<std::string, IndexSet>& overlay,
                            const DataBundle& data);

/// Cartesian product of the named spaces, last position fastest.
IndexSet space_product(const ir::SymbolicModel& model, const std::vector<std::string>& placeholders,
                       const DataBundle& data);

}  // namespace meadow::inst
