#include "meadow/solve/audit.hpp"

#include <cmath>

namespace meadow::solve {

std::string AuditReport::summary() const {
  if (!size_ok) return "solution length does not match the column count";
  return "max row residual " + std::to_string(max_row_residual) + " (row " +
         std::to_string(worst_row) + "), max bound violation " +
         std::to_string(max_bound_violation) + " (col " + std::to_string(worst_col) + ")";
}

AuditReport audit_rows(const CanonicalModel& m, std::span<const double> x,
                       std::span<const char> rows) {
  AuditReport r;
  if (x.size() != m.num_cols()) {
    r.size_ok = false;
    return r;
  }
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    double v = x[c];
    double viol = 0.0;
    if (std::isnan(v)) viol = INFINITY;
    else if (v < m.lower(c)) viol = m.lower(c) - v;
    else if (v > m.upper(c)) viol = v - m.upper(c);
    if (viol > r.max_bound_violation) {
      r.max_bound_violation = viol;
      r.worst_col = c;
    }
    r.objective += m.cost(c) * v;
  }
  for (std::size_t i = 0; i < m.num_rows(); ++i) {
    if (!rows.empty() && !rows[i]) continue;
    // Compensated sum keeps long rows honest.
    double s = 0.0, comp = 0.0;
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double y = vals[k] * x[cols[k]] - comp;
      double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    double gap = s - m.rhs(i);
    double res = 0.0;
    switch (m.sign(i)) {
      case Sign::Eq: res = std::abs(gap); break;
      case Sign::Le: res = gap > 0 ? gap : 0.0; break;
      case Sign::Ge: res = gap < 0 ? -gap : 0.0; break;
    }
    if (std::isnan(res)) res = INFINITY;
    if (res > r.max_row_residual) {
      r.max_row_residual = res;
      r.worst_row = i;
    }
  }
  return r;
}

AuditReport audit_solution(const CanonicalModel& m, std::span<const double> x) {
  return audit_rows(m, x, {});
}

}  // namespace meadow::solve
