#include "meadow/core/canonical.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>
#include <string>

namespace meadow {

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Eq: return "=";
    case Sign::Le: return "<=";
    case Sign::Ge: return ">=";
  }
  return "?";
}

std::size_t CanonicalModel::family_id(std::string_view name) {
  for (std::size_t f = 0; f < families_.size(); ++f) {
    if (families_[f] == name) return f;
  }
  families_.emplace_back(name);
  return families_.size() - 1;
}

std::size_t CanonicalModel::add_column(std::string_view family, std::span<const Index> index,
                                       double lower, double upper, bool integer, double cost) {
  col_family_.push_back(static_cast<std::uint32_t>(family_id(family)));
  col_indices_.insert(col_indices_.end(), index.begin(), index.end());
  col_index_begin_.push_back(col_indices_.size());
  lower_.push_back(lower);
  upper_.push_back(upper);
  integer_.push_back(integer ? 1 : 0);
  objective_.push_back(cost);
  return lower_.size() - 1;
}

std::size_t CanonicalModel::add_row(std::span<const Entry> entries, Sign sign, double rhs,
                                    std::size_t block, std::span<const Index> global) {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    if (e.col >= num_cols()) throw std::out_of_range("row entry column out of range");
    if (k && entries[k - 1].col >= e.col) {
      throw std::invalid_argument("row entries must be sorted and unique");
    }
    entry_col_.push_back(e.col);
    entry_val_.push_back(e.value);
  }
  row_begin_.push_back(entry_col_.size());
  sign_.push_back(sign);
  rhs_.push_back(rhs);
  row_block_.push_back(block);
  row_globals_.insert(row_globals_.end(), global.begin(), global.end());
  row_global_begin_.push_back(row_globals_.size());
  return sign_.size() - 1;
}

void CanonicalModel::append_row_raw(std::span<const std::size_t> cols,
                                    std::span<const double> vals, Sign sign, double rhs,
                                    std::size_t block, std::span<const Index> global) {
  entry_col_.insert(entry_col_.end(), cols.begin(), cols.end());
  entry_val_.insert(entry_val_.end(), vals.begin(), vals.end());
  row_begin_.push_back(entry_col_.size());
  sign_.push_back(sign);
  rhs_.push_back(rhs);
  row_block_.push_back(block);
  row_globals_.insert(row_globals_.end(), global.begin(), global.end());
  row_global_begin_.push_back(row_globals_.size());
}

void CanonicalModel::reserve(std::size_t rows, std::size_t entries) {
  row_begin_.reserve(rows + 1);
  sign_.reserve(rows);
  rhs_.reserve(rows);
  row_block_.reserve(rows);
  row_global_begin_.reserve(rows + 1);
  entry_col_.reserve(entries);
  entry_val_.reserve(entries);
}

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_span(std::span<const Index> a, std::span<const Index> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

std::string first_difference(const CanonicalModel& a, const CanonicalModel& b) {
  if (a.num_cols() != b.num_cols()) {
    return "column count " + std::to_string(a.num_cols()) + " vs " + std::to_string(b.num_cols());
  }
  for (std::size_t c = 0; c < a.num_cols(); ++c) {
    if (a.family_name(c) != b.family_name(c) || !same_span(a.col_index(c), b.col_index(c))) {
      return "column " + std::to_string(c) + " key " + column_name(a, c) + " vs " +
             column_name(b, c);
    }
    if (!same_bits(a.lower(c), b.lower(c)) || !same_bits(a.upper(c), b.upper(c)) ||
        a.is_integer(c) != b.is_integer(c)) {
      return "column " + column_name(a, c) + " bounds/integrality";
    }
    if (!same_bits(a.cost(c), b.cost(c))) return "column " + column_name(a, c) + " cost";
  }
  if (a.num_rows() != b.num_rows()) {
    return "row count " + std::to_string(a.num_rows()) + " vs " + std::to_string(b.num_rows());
  }
  for (std::size_t r = 0; r < a.num_rows(); ++r) {
    auto oa = a.origin(r), ob = b.origin(r);
    if (oa.block != ob.block || !same_span(oa.global, ob.global)) {
      return "row " + std::to_string(r) + " origin " + row_name(a, r) + " vs " + row_name(b, r);
    }
    if (a.sign(r) != b.sign(r) || !same_bits(a.rhs(r), b.rhs(r))) {
      return "row " + row_name(a, r) + " sign/rhs";
    }
    auto ca = a.row_cols(r), cb = b.row_cols(r);
    auto va = a.row_values(r), vb = b.row_values(r);
    if (ca.size() != cb.size()) return "row " + row_name(a, r) + " entry count";
    for (std::size_t k = 0; k < ca.size(); ++k) {
      if (ca[k] != cb[k] || !same_bits(va[k], vb[k])) {
        return "row " + row_name(a, r) + " entry " + std::to_string(k);
      }
    }
  }
  return {};
}

bool equivalent(const CanonicalModel& a, const CanonicalModel& b) {
  return first_difference(a, b).empty();
}

namespace {

void append_index(std::string& out, Index v) {
  out += '_';
  if (v < 0) {
    out += 'm';
    out += std::to_string(0ULL - static_cast<unsigned long long>(v));
  } else {
    out += std::to_string(v);
  }
}

}  // namespace

std::string column_name(const CanonicalModel& m, std::size_t col) {
  std::string out = m.family_name(col);
  for (Index v : m.col_index(col)) append_index(out, v);
  return out;
}

std::string row_name(const CanonicalModel& m, std::size_t row) {
  auto o = m.origin(row);
  std::string out = "c" + std::to_string(o.block);
  for (Index v : o.global) append_index(out, v);
  return out;
}

}  // namespace meadow
