#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "meadow/decomp/sequential.hpp"
#include "meadow/solve/solver.hpp"

namespace meadow::decomp {

/// Splits 1..T into h sub-models at boundaries t_1 = 1 < ... < t_{h+1} = T+1.
struct HorizonPlan {
  std::size_t h = 1;
  std::vector<int> boundaries;
  /// Aggregated tail length for forward rolling horizon.
  int M = 1;
  /// Guidance weights: empty (default weight), one value, or one per horizon.
  std::vector<double> lambdas;
  /// Extra periods solved past each horizon; only the horizon itself is kept.
  int overlap = 0;
  /// Stop once the accepted periods reach this period.
  std::optional<int> stop_after_period;
  /// Re-solve the master after each horizon with the accepted periods fixed.
  bool resolve_master = false;
};

/// h nearly equal horizons: t_k = 1 + floor((k-1) T / h).
HorizonPlan even_plan(int T, std::size_t h);

/// Throws std::invalid_argument.
void check_plan(const HorizonPlan& plan, int T);

class DecompositionInfeasible : public std::runtime_error {
 public:
  DecompositionInfeasible(std::size_t horizon, solve::Status status)
      : std::runtime_error("sub-problem of horizon " + std::to_string(horizon) + " is " +
                           solve::to_string(status)),
        horizon_(horizon),
        status_(status) {}
  /// 1-based.
  std::size_t horizon() const { return horizon_; }
  solve::Status status() const { return status_; }

 private:
  std::size_t horizon_;
  solve::Status status_;
};

class MasterInfeasible : public std::runtime_error {
 public:
  explicit MasterInfeasible(solve::Status status)
      : std::runtime_error(std::string("master problem is ") + solve::to_string(status)),
        status_(status) {}
  solve::Status status() const { return status_; }

 private:
  solve::Status status_;
};

enum class Method { RH, FRH, GRH, GFRH };

const char* to_string(Method m);
/// rh, frh, grh, gfrh. Throws std::invalid_argument.
Method parse_method(const std::string& name);

struct DecompositionOptions {
  /// nullptr selects the reference simplex.
  const solve::LpSolver* solver = nullptr;
  solve::SolveOptions solve;
  /// Feasibility tolerance of the final audit.
  double audit_tol = 1e-7;
};

struct StageRecord {
  std::string stage;
  std::size_t horizon = 0;
  int first_period = 0;
  int last_period = 0;
  int accept_until = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double build_seconds = 0;
  double solve_seconds = 0;
  double objective = 0;
  std::size_t iterations = 0;
  std::string status;
};

struct RunManifest {
  std::string method;
  HorizonPlan plan;
  std::vector<double> lambdas;
  std::vector<StageRecord> stages;
  double objective = 0;
  bool partial = false;
  int solved_until = 0;
  double max_residual = 0;
  std::optional<double> baseline;
  std::optional<int> fine_tune_k;
  std::optional<double> objective_before_fine_tune;
  double total_seconds = 0;

  /// (objective - baseline) / |baseline| when a baseline is set.
  std::optional<double> gap() const;
  nlohmann::ordered_json to_json() const;
};

/// Result of a decomposition run. When `partial` is set only periods up to
/// `solved_until` carry decisions; later columns are 0.
struct DecompositionResult {
  solve::Solution solution;
  bool partial = false;
  int solved_until = 0;
  RunManifest manifest;
};

/// lambda = 1e-3 times the mean absolute objective coefficient.
double default_lambda(const SequentialModel& seq);

DecompositionResult rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                    const DecompositionOptions& opts = {});
DecompositionResult forward_rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                            const DecompositionOptions& opts = {});
DecompositionResult guided_rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                           const DecompositionOptions& opts = {});
DecompositionResult guided_frh(const SequentialModel& seq, const HorizonPlan& plan,
                               const DecompositionOptions& opts = {});
DecompositionResult decompose(Method method, const SequentialModel& seq, const HorizonPlan& plan,
                              const DecompositionOptions& opts = {});

/// Re-optimizes periods 1..k with later non-state columns fixed to `solution`.
/// Returns the input whenever the re-solve fails or would not improve it.
solve::Solution fine_tune(const SequentialModel& seq, const solve::Solution& solution, int k,
                          const DecompositionOptions& opts = {});

}  // namespace meadow::decomp
