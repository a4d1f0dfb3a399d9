#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "meadow/ir/model.hpp"

namespace meadow::ir {

enum class ViolationKind {
  DuplicateName,
  UnboundPlaceholder,
  PlaceholderKindMismatch,
  ArityMismatch,
  SumNumbering,
  MalformedGraph,
  UnknownVariable,
  RankMismatch,
  UnknownConstant,
  ConstantKindMismatch,
  UnknownExpression,
  ObjectiveShape,
  InvalidName,
};

const char* to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  /// Location such as `expressions/balance/nodes/3`.
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const;
  std::string summary() const;
};

/// Checks every structural invariant of the model. Never throws.
ValidationReport validate(const SymbolicModel& model);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report)
      : std::runtime_error("invalid model: " + report.summary()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Validates, then rewrites a max objective as min by negation. The result is
/// what the instantiators consume. Throws ValidationError.
SymbolicModel prepare_model(const SymbolicModel& model);

}  // namespace meadow::ir
