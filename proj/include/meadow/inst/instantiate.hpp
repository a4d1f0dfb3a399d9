#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/core/data.hpp"
#include "meadow/inst/normalize.hpp"
#include "meadow/ir/model.hpp"

namespace meadow::inst {

enum class RowMode {
  /// Rows for every G* that receives a term, plus every nonzero entry of an
  /// rhs parameter (restricted to space(G) where spaces are known).
  Sparse,
  /// One row per element of space(G).
  Dense,
};

enum class ColumnMode {
  /// Columns that appear in some row or in the objective.
  Sparse,
  /// The full Cartesian product of each family's declared domains.
  Dense,
};

struct InstantiateOptions {
  RowMode rows = RowMode::Sparse;
  ColumnMode columns = ColumnMode::Sparse;
  /// Treat rhs entries missing from a parameter array as 0 instead of
  /// raising MissingRhs.
  bool missing_rhs_is_zero = false;
};

/// Flat stream of indexed terms `(G*, variable[index], coefficient)` for one
/// expression.
struct TermBuffer {
  std::size_t global_arity = 0;
  std::vector<Index> globals;
  std::vector<std::uint32_t> families;
  std::vector<std::size_t> index_begin{0};
  std::vector<Index> indices;
  std::vector<double> coefficients;

  std::size_t size() const { return families.size(); }
  std::span<const Index> global(std::size_t k) const {
    return {globals.data() + k * global_arity, global_arity};
  }
  std::span<const Index> index(std::size_t k) const {
    return {indices.data() + index_begin[k], index_begin[k + 1] - index_begin[k]};
  }
  void push(std::span<const Index> g, std::uint32_t family, std::span<const Index> idx,
            double coef) {
    globals.insert(globals.end(), g.begin(), g.end());
    families.push_back(family);
    indices.insert(indices.end(), idx.begin(), idx.end());
    index_begin.push_back(indices.size());
    coefficients.push_back(coef);
  }
  void append(const TermBuffer& other);
  void clear();
};

/// Term streams of a whole model. Block 0 is the objective (possibly empty);
/// block b >= 1 is constraint b-1.
struct TermStreams {
  std::vector<TermBuffer> blocks;
};

/// A validated model bound to its data with every expression normalized.
/// Shared read-only by all instantiation paths.
struct PreparedModel {
  ir::SymbolicModel model;  ///< after ir::prepare_model (min objective)
  const DataBundle* data = nullptr;
  /// Index = block id (0 objective, b constraint b-1). The objective slot holds
  /// an empty expression when the model has none.
  std::vector<NormalizedExpression> blocks;
  bool has_objective = false;

  std::size_t num_blocks() const { return blocks.size(); }
  /// Family id of a variable (its declaration order).
  std::uint32_t family(const std::string& variable) const;
};

/// Validates (throws ir::ValidationError), negates a max objective, checks set
/// and parameter arities against the data, and normalizes every expression.
PreparedModel prepare(const ir::SymbolicModel& model, const DataBundle& data);

/// Per-sum restriction of the tuples a traversal may visit: for each block,
/// sum_id -> allowed tuple ids (ascending). Sums not listed see all tuples.
struct TupleFilter {
  std::vector<std::map<std::size_t, std::vector<std::uint32_t>>> blocks;
};

struct InstantiateStats {
  double normalize_seconds = 0;
  double traverse_seconds = 0;
  double build_seconds = 0;
  std::size_t terms = 0;
};

/// Exhaustive: for every G* in space(G), traverse the original (non-normalized)
/// expression with G fixed, scanning every sum's full set data. Needs an
/// index space for every global placeholder.
TermStreams exhaustive_terms(const PreparedModel& prepared);

/// Efficient: one traversal per block over the normalized expression; each sum
/// visits only the tuples consistent with already-bound placeholders.
/// `filter` restricts the tuples of individual sums (used by the parallel path).
TermStreams efficient_terms(const PreparedModel& prepared, const TupleFilter* filter = nullptr);
/// Same, one block only.
void efficient_block_terms(const PreparedModel& prepared, std::size_t block,
                           const std::map<std::size_t, std::vector<std::uint32_t>>* filter,
                           TermBuffer& out);

/// Aggregates term streams into the canonical model: rows ordered by (block,
/// lexicographic G*), columns by (family declaration order, index with the
/// last position most significant); duplicate (row, column) terms are summed
/// in stream order and zero results dropped.
CanonicalModel build_canonical(const PreparedModel& prepared, const TermStreams& terms,
                               const InstantiateOptions& opts = {});

CanonicalModel instantiate_exhaustive(const ir::SymbolicModel& model, const DataBundle& data,
                                      const InstantiateOptions& opts = {});
CanonicalModel instantiate_efficient(const ir::SymbolicModel& model, const DataBundle& data,
                                     const InstantiateOptions& opts = {},
                                     InstantiateStats* stats = nullptr);

}  // namespace meadow::inst
