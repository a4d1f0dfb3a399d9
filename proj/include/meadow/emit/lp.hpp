#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meadow/core/canonical.hpp"

namespace meadow::emit {

class LpSyntaxError : public std::runtime_error {
 public:
  LpSyntaxError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest decimal string that parses back to the same binary64 value.
std::string format_double(double v);
/// Accepts an optional sign, decimal/exponent forms, `inf`, `infinity`, `nan`.
std::optional<double> parse_double(std::string_view s);

/// `x_1_m2` -> ("x", {1, -2}). A name whose tail is not all indices becomes a
/// family of its own with an empty index.
void parse_column_name(std::string_view name, std::string& family, std::vector<Index>& index);
/// `c3_1_2` -> block 3, global {1, 2}. Returns false for other names.
bool parse_row_name(std::string_view name, std::size_t& block, std::vector<Index>& global);

struct LpWriteOptions {
  /// Soft limit on line length; longer rows continue on indented lines.
  std::size_t wrap = 255;
};

/// CPLEX LP text: Minimize / Subject To / Bounds / Generals / End. Every column
/// is listed under Bounds in column order. Throws std::ios_base::failure when
/// the stream goes bad.
void write_lp(const CanonicalModel& model, std::ostream& out, const LpWriteOptions& opts = {});
std::string write_lp_string(const CanonicalModel& model, const LpWriteOptions& opts = {});

/// Reads the subset written by write_lp plus common variations (Maximize,
/// Binaries, unlabeled rows, `free`, one-sided bounds). Columns take the order
/// of the Bounds section, then first appearance. Rows whose label is not a
/// `c<block>_...` name get block 0 and their ordinal as global index.
CanonicalModel read_lp(std::istream& in);
CanonicalModel read_lp_string(std::string_view text);

/// `row,col,val` lines (0-based) plus a JSON sidecar holding column names,
/// bounds, integrality, costs and row names, signs, rhs.
void write_triplets(const CanonicalModel& model, std::ostream& csv, std::ostream& sidecar);
CanonicalModel read_triplets(std::istream& csv, std::istream& sidecar);

}  // namespace meadow::emit
