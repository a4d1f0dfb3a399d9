#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "meadow/core/tuple.hpp"

namespace meadow {

enum class Sign : std::uint8_t { Eq, Le, Ge };

const char* to_string(Sign s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Where a row came from: constraint block id and the concrete global index.
struct RowOrigin {
  std::size_t block;
  std::span<const Index> global;
};

struct Entry {
  std::size_t col;
  double value;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse canonical LP/MIP: min c'x s.t. rows (a_i'x sign_i b_i), l <= x <= u.
/// Rows are CSR with entries sorted by column and free of duplicates/zeros.
class CanonicalModel {
 public:
  // Columns.
  std::size_t num_cols() const { return lower_.size(); }
  std::size_t add_column(std::string_view family, std::span<const Index> index,
                         double lower = 0.0, double upper = kInf,
                         bool integer = false, double cost = 0.0);
  std::size_t family_id(std::string_view name);
  const std::string& family_name(std::size_t col) const { return families_[col_family_[col]]; }
  std::uint32_t col_family(std::size_t col) const { return col_family_[col]; }
  std::span<const Index> col_index(std::size_t col) const {
    return {col_indices_.data() + col_index_begin_[col],
            col_index_begin_[col + 1] - col_index_begin_[col]};
  }
  const std::vector<std::string>& families() const { return families_; }

  double lower(std::size_t c) const { return lower_[c]; }
  double upper(std::size_t c) const { return upper_[c]; }
  bool is_integer(std::size_t c) const { return integer_[c] != 0; }
  double cost(std::size_t c) const { return objective_[c]; }
  void set_bounds(std::size_t c, double lo, double up) { lower_[c] = lo; upper_[c] = up; }
  void set_integer(std::size_t c, bool v) { integer_[c] = v ? 1 : 0; }
  void set_cost(std::size_t c, double v) { objective_[c] = v; }
  std::span<const double> objective() const { return objective_; }
  std::span<const double> lowers() const { return lower_; }
  std::span<const double> uppers() const { return upper_; }

  // Rows.
  std::size_t num_rows() const { return sign_.size(); }
  std::size_t num_entries() const { return entry_col_.size(); }
  /// Entries must be sorted by column, unique and non-zero.
  std::size_t add_row(std::span<const Entry> entries, Sign sign, double rhs,
                      std::size_t block, std::span<const Index> global);
  /// Bulk append used by the instantiator: entries already sorted/aggregated.
  void append_row_raw(std::span<const std::size_t> cols, std::span<const double> vals,
                      Sign sign, double rhs, std::size_t block, std::span<const Index> global);
  void reserve(std::size_t rows, std::size_t entries);

  Sign sign(std::size_t r) const { return sign_[r]; }
  double rhs(std::size_t r) const { return rhs_[r]; }
  void set_rhs(std::size_t r, double v) { rhs_[r] = v; }
  RowOrigin origin(std::size_t r) const {
    return {row_block_[r], {row_globals_.data() + row_global_begin_[r],
                            row_global_begin_[r + 1] - row_global_begin_[r]}};
  }
  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {entry_col_.data() + row_begin_[r], row_begin_[r + 1] - row_begin_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {entry_val_.data() + row_begin_[r], row_begin_[r + 1] - row_begin_[r]};
  }

 private:
  std::vector<std::string> families_;
  std::vector<std::uint32_t> col_family_;
  std::vector<std::size_t> col_index_begin_{0};
  std::vector<Index> col_indices_;
  std::vector<double> lower_, upper_, objective_;
  std::vector<std::uint8_t> integer_;

  std::vector<std::size_t> row_begin_{0};
  std::vector<std::size_t> entry_col_;
  std::vector<double> entry_val_;
  std::vector<Sign> sign_;
  std::vector<double> rhs_;
  std::vector<std::size_t> row_block_;
  std::vector<std::size_t> row_global_begin_{0};
  std::vector<Index> row_globals_;
};

/// Triplet-level equality: same columns (family name, index, bounds,
/// integrality, cost bits), same rows (origin, sign, rhs bits, entries bits).
bool equivalent(const CanonicalModel& a, const CanonicalModel& b);

/// Human-readable reason for the first difference, empty when equivalent.
std::string first_difference(const CanonicalModel& a, const CanonicalModel& b);

/// `x_1_2` style name; negative indices are written with an `m` prefix.
std::string column_name(const CanonicalModel& m, std::size_t col);
/// `c<block>_<g1>_<g2>...`
std::string row_name(const CanonicalModel& m, std::size_t row);

}  // namespace meadow
