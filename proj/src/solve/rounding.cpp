#include <algorithm>
#include <cmath>

#include "meadow/emit/lp.hpp"
#include "meadow/solve/solver.hpp"

namespace meadow::solve {

BoundViolation::BoundViolation(std::size_t col, double value, double lower, double upper)
    : std::invalid_argument("value " + emit::format_double(value) + " for column " +
                            std::to_string(col) + " lies outside [" + emit::format_double(lower) +
                            ", " + emit::format_double(upper) + "]"),
      col_(col) {}

CanonicalModel fix_variables(const CanonicalModel& model,
                             const std::map<std::size_t, double>& assignments) {
  CanonicalModel out = model;
  for (const auto& [c, v] : assignments) {
    if (c >= model.num_cols()) throw std::out_of_range("fix_variables: column out of range");
    if (!(v >= model.lower(c) && v <= model.upper(c))) {
      throw BoundViolation(c, v, model.lower(c), model.upper(c));
    }
    out.set_bounds(c, v, v);
  }
  return out;
}

double round_half_toward_zero(double v) {
  double f = std::floor(v);
  double frac = v - f;
  if (frac > 0.5) return f + 1.0;
  if (frac < 0.5) return f;
  return v > 0 ? f : f + 1.0;
}

namespace {

// Nearest integer inside [lo, up] to `target`, or NaN when there is none.
double integer_in_bounds(double target, double lo, double up) {
  double a = std::ceil(lo), b = std::floor(up);
  if (a > b) return NAN;
  return std::clamp(target, a, b);
}

}  // namespace

Solution round_and_fix(const CanonicalModel& model, const Solution& solution,
                       std::span<const std::size_t> integer_cols, const LpSolver& solver,
                       const SolveOptions& opts, const RoundingOptions& ropts) {
  Solution failed;
  failed.status = Status::Infeasible;
  if (solution.x.size() != model.num_cols()) return failed;

  std::map<std::size_t, double> fixed;
  for (std::size_t c : integer_cols) {
    double v = integer_in_bounds(round_half_toward_zero(solution.x[c]), model.lower(c),
                                 model.upper(c));
    if (std::isnan(v)) return failed;
    fixed[c] = v;
  }
  std::size_t iterations = 0;
  auto attempt = [&](const std::map<std::size_t, double>& fx) {
    Solution s = solver.solve(fix_variables(model, fx), opts);
    iterations += s.iterations;
    s.iterations = iterations;
    return s;
  };
  Solution s = attempt(fixed);
  if (s.status != Status::Infeasible || !ropts.retry_ladder) return s;

  for (std::size_t c : integer_cols) {
    double x = solution.x[c];
    for (double cand : {std::floor(x), std::ceil(x)}) {
      double v = integer_in_bounds(cand, model.lower(c), model.upper(c));
      if (std::isnan(v) || v == fixed[c]) continue;
      auto trial = fixed;
      trial[c] = v;
      Solution t = attempt(trial);
      if (t.status != Status::Infeasible) return t;
    }
  }
  s.iterations = iterations;
  return s;
}

}  // namespace meadow::solve
