#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadow/core/canonical.hpp"

namespace meadow::solve {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalTrouble };

const char* to_string(Status s);

struct Solution {
  Status status = Status::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;

  bool optimal() const { return status == Status::Optimal; }
};

struct SolveOptions {
  double feas_tol = 1e-7;
  /// Reduced-cost tolerance for optimality.
  double opt_tol = 1e-9;
  std::size_t max_iters = 1000000;
};

/// Anything that can solve a CanonicalModel. Decomposition only talks to this.
class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual Solution solve(const CanonicalModel& model, const SolveOptions& opts) const = 0;
  virtual std::string name() const = 0;
};

/// Dense two-phase primal simplex. Fixed columns are substituted out, bounds
/// shifted, free columns split; Dantzig pricing falls back to Bland's rule
/// after a run of degenerate pivots. Basic values are recomputed from the
/// original data at the end.
class ReferenceSimplex : public LpSolver {
 public:
  Solution solve(const CanonicalModel& model, const SolveOptions& opts) const override;
  std::string name() const override { return "reference"; }
};

/// Runs `<executable> <model.lp> <solution.txt>` and reads `col value` lines
/// back. An optional first line `status <optimal|infeasible|unbounded|
/// iteration_limit>` sets the status; missing output is NumericalTrouble.
class ExternalSolver : public LpSolver {
 public:
  explicit ExternalSolver(std::string executable, std::string workdir = "");
  Solution solve(const CanonicalModel& model, const SolveOptions& opts) const override;
  std::string name() const override { return "exec:" + executable_; }

 private:
  std::string executable_;
  std::string workdir_;
};

/// `reference` or `exec:PATH`.
std::unique_ptr<LpSolver> make_solver(const std::string& spec);

Solution solve_lp(const CanonicalModel& model, const SolveOptions& opts = {});

class BoundViolation : public std::invalid_argument {
 public:
  BoundViolation(std::size_t col, double value, double lower, double upper);
  std::size_t col() const { return col_; }

 private:
  std::size_t col_;
};

/// Same model with each assigned column's bounds set to [v, v]. Throws
/// BoundViolation when v lies outside the column's bounds.
CanonicalModel fix_variables(const CanonicalModel& model,
                             const std::map<std::size_t, double>& assignments);

struct RoundingOptions {
  /// After a failed rounding, retry flipping one column at a time (column
  /// order) to its floor, then its ceiling.
  bool retry_ladder = true;
};

/// Rounds the integer columns of `solution` to the nearest integer (ties
/// toward zero), fixes them and re-solves the continuous remainder.
Solution round_and_fix(const CanonicalModel& model, const Solution& solution,
                       std::span<const std::size_t> integer_cols, const LpSolver& solver,
                       const SolveOptions& opts = {}, const RoundingOptions& ropts = {});

/// Nearest integer, ties toward zero.
double round_half_toward_zero(double v);

/// `col value` lines using column names; values in shortest round-trip form.
void write_solution(const CanonicalModel& model, const Solution& s, std::ostream& out);
/// Inverse of write_solution; unknown names raise std::runtime_error, columns
/// not listed read as 0.
Solution read_solution(const CanonicalModel& model, std::istream& in);

}  // namespace meadow::solve
