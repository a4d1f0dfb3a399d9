#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "meadow/core/canonical.hpp"

namespace meadow::solve {

/// Residual check of a point against a CanonicalModel, written without any of
/// the simplex code.
struct AuditReport {
  double max_row_residual = 0.0;
  std::size_t worst_row = 0;
  double max_bound_violation = 0.0;
  std::size_t worst_col = 0;
  double objective = 0.0;
  bool size_ok = true;

  bool ok(double tol) const {
    return size_ok && max_row_residual <= tol && max_bound_violation <= tol;
  }
  std::string summary() const;
};

AuditReport audit_solution(const CanonicalModel& model, std::span<const double> x);

/// Audit restricted to rows whose flag is set (partial solutions).
AuditReport audit_rows(const CanonicalModel& model, std::span<const double> x,
                       std::span<const char> rows);

}  // namespace meadow::solve
