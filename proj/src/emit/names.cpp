#include <charconv>
#include <cmath>

#include "meadow/emit/lp.hpp"

namespace meadow::emit {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    char x = a[k], y = b[k];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

bool parse_index(std::string_view s, Index& out) {
  bool neg = false;
  if (!s.empty() && s[0] == 'm') {
    neg = true;
    s.remove_prefix(1);
  }
  if (s.empty()) return false;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
  }
  unsigned long long u = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), u);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return false;
  if (neg) {
    if (u > static_cast<unsigned long long>(INT64_MAX) + 1ULL) return false;
    out = static_cast<Index>(0ULL - u);
  } else {
    if (u > static_cast<unsigned long long>(INT64_MAX)) return false;
    out = static_cast<Index>(u);
  }
  return true;
}

bool parse_indices(std::string_view s, std::vector<Index>& out) {
  out.clear();
  while (!s.empty()) {
    if (s[0] != '_') return false;
    s.remove_prefix(1);
    std::size_t end = s.find('_');
    std::string_view part = s.substr(0, end);
    Index v;
    if (!parse_index(part, v)) return false;
    out.push_back(v);
    s.remove_prefix(part.size());
  }
  return true;
}

}  // namespace

std::optional<double> parse_double(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  double v;
  if (iequals(s, "inf") || iequals(s, "infinity")) {
    v = HUGE_VAL;
  } else {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
  }
  return neg ? -v : v;
}

void parse_column_name(std::string_view name, std::string& family, std::vector<Index>& index) {
  std::size_t cut = name.find('_');
  if (cut != std::string_view::npos && cut > 0 && parse_indices(name.substr(cut), index)) {
    family.assign(name.substr(0, cut));
    return;
  }
  family.assign(name);
  index.clear();
}

bool parse_row_name(std::string_view name, std::size_t& block, std::vector<Index>& global) {
  if (name.size() < 2 || name[0] != 'c') return false;
  std::size_t end = name.find('_');
  std::string_view digits = name.substr(1, end == std::string_view::npos ? name.size() - 1 : end - 1);
  if (digits.empty()) return false;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') return false;
  }
  auto r = std::from_chars(digits.data(), digits.data() + digits.size(), block);
  if (r.ec != std::errc{}) return false;
  return parse_indices(name.substr(1 + digits.size()), global);
}

}  // namespace meadow::emit
