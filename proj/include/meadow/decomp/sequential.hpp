#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meadow/core/canonical.hpp"
#include "meadow/core/data.hpp"
#include "meadow/core/errors.hpp"
#include "meadow/inst/instantiate.hpp"
#include "meadow/ir/model.hpp"

namespace meadow::decomp {

/// How the entries of a period-indexed parameter that fall into one period
/// group are combined.
enum class AggregationPolicy { Sum, First, Last };

/// How period-indexed set tuples are mapped onto period groups. `Map` keeps
/// every tuple (deduplicated); `Link` also drops tuples whose distinct periods
/// collapse into one group, which is what a lag relation such as (t, t-1)
/// needs.
enum class SetPolicy { Map, Link };

const char* to_string(AggregationPolicy p);
const char* to_string(SetPolicy p);

class MissingAggregationPolicy : public DataError {
 public:
  explicit MissingAggregationPolicy(std::string parameter)
      : DataError("no aggregation policy for period-indexed parameter '" + parameter + "'"),
        parameter_(std::move(parameter)) {}
  const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

/// Where the period axis lives in a model's variables and data. Period values
/// are the integers 1..T of `period_space`.
struct PeriodMetadata {
  std::string period_space = "T";
  /// Variable family -> tuple position of its period. Families not listed are
  /// treated as period 1.
  std::map<std::string, std::size_t> variable_period;
  /// Index set -> tuple positions holding periods.
  std::map<std::string, std::vector<std::size_t>> set_periods;
  std::map<std::string, SetPolicy> set_policy;
  /// Parameter array -> tuple position of its period.
  std::map<std::string, std::size_t> parameter_period;
  std::map<std::string, AggregationPolicy> aggregation_policy;
  /// Variable families whose columns stay free during fine-tuning.
  std::set<std::string> state_variables;

  friend bool operator==(const PeriodMetadata&, const PeriodMetadata&) = default;
};

nlohmann::ordered_json emit_metadata(const PeriodMetadata& meta);
/// Throws DataError on malformed documents.
PeriodMetadata parse_metadata(const nlohmann::json& doc);

/// A variable group x^i: one family and its index with the period removed.
struct GroupKey {
  std::string family;
  std::vector<Index> rest;
  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

/// A canonical model with period structure, plus the symbolic source needed
/// to rebuild it from aggregated data.
struct SequentialModel {
  ir::SymbolicModel model;
  DataBundle data;
  PeriodMetadata meta;
  inst::InstantiateOptions options;

  CanonicalModel base;
  int T = 0;
  std::vector<int> var_period;
  std::vector<std::size_t> var_group;
  std::vector<GroupKey> groups;
  std::vector<char> group_is_state;
  /// Latest period among the row's columns (1 for empty rows).
  std::vector<int> row_period;

  std::size_t num_groups() const { return groups.size(); }
  bool is_state(std::size_t col) const { return group_is_state[var_group[col]] != 0; }
  /// Column for (family, full index), or npos.
  std::size_t find_column(const std::string& family, std::span<const Index> index) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::map<std::string, std::map<TupleKey, std::size_t>> column_lookup;
};

/// Instantiates the model and derives the period maps. Throws DataError when
/// the period space is missing or not 1..T, or when a listed position is out
/// of range.
SequentialModel make_sequential(ir::SymbolicModel model, DataBundle data, PeriodMetadata meta,
                                const inst::InstantiateOptions& options = {});

/// Inclusive period ranges, in order, covering 1..T exactly once.
using PeriodGroups = std::vector<std::pair<int, int>>;

/// Data for the model whose period g (1-based) stands for the original
/// periods of groups[g-1]. Throws MissingAggregationPolicy and
/// std::invalid_argument for groups that do not partition 1..T.
DataBundle aggregate_data(const DataBundle& data, const PeriodMetadata& meta, int T,
                          const PeriodGroups& groups);

/// aggregate_data + make_sequential, with every integrality flag dropped.
SequentialModel aggregate_periods(const SequentialModel& seq, const PeriodGroups& groups);

}  // namespace meadow::decomp
