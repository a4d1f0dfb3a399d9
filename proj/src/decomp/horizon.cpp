#include "meadow/decomp/horizon.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

#include "meadow/solve/audit.hpp"

namespace meadow::decomp {

using solve::Solution;
using solve::Status;

const char* to_string(Method m) {
  switch (m) {
    case Method::RH: return "rh";
    case Method::FRH: return "frh";
    case Method::GRH: return "grh";
    case Method::GFRH: return "gfrh";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "rh") return Method::RH;
  if (name == "frh") return Method::FRH;
  if (name == "grh") return Method::GRH;
  if (name == "gfrh") return Method::GFRH;
  throw std::invalid_argument("unknown method '" + name + "' (rh, frh, grh, gfrh)");
}

HorizonPlan even_plan(int T, std::size_t h) {
  if (T < 1 || h < 1 || h > static_cast<std::size_t>(T)) {
    throw std::invalid_argument("need 1 <= h <= T");
  }
  HorizonPlan plan;
  plan.h = h;
  for (std::size_t k = 0; k <= h; ++k) {
    plan.boundaries.push_back(1 + static_cast<int>(k * static_cast<std::size_t>(T) / h));
  }
  return plan;
}

void check_plan(const HorizonPlan& plan, int T) {
  const auto& b = plan.boundaries;
  if (plan.h < 1 || b.size() != plan.h + 1) {
    throw std::invalid_argument("plan needs h >= 1 and h+1 boundaries");
  }
  if (b.front() != 1 || b.back() != T + 1) {
    throw std::invalid_argument("boundaries must run from 1 to T+1");
  }
  for (std::size_t k = 1; k < b.size(); ++k) {
    if (b[k] <= b[k - 1]) throw std::invalid_argument("boundaries must be strictly increasing");
  }
  if (plan.M < 1) throw std::invalid_argument("M must be at least 1");
  if (plan.overlap < 0) throw std::invalid_argument("overlap must be non-negative");
  if (!plan.lambdas.empty() && plan.lambdas.size() != 1 && plan.lambdas.size() != plan.h) {
    throw std::invalid_argument("lambdas must be empty, one value, or one per horizon");
  }
  for (double l : plan.lambdas) {
    if (!(l >= 0) || !std::isfinite(l)) throw std::invalid_argument("lambdas must be finite and >= 0");
  }
}

double default_lambda(const SequentialModel& seq) {
  const auto& c = seq.base.objective();
  if (c.empty()) return 1e-3;
  double s = 0;
  for (double v : c) s += std::abs(v);
  double mean = s / static_cast<double>(c.size());
  return mean > 0 ? 1e-3 * mean : 1e-3;
}

std::optional<double> RunManifest::gap() const {
  if (!baseline) return std::nullopt;
  double d = std::abs(*baseline);
  return (objective - *baseline) / (d > 0 ? d : 1.0);
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["method"] = method;
  nlohmann::ordered_json p;
  p["h"] = plan.h;
  p["boundaries"] = plan.boundaries;
  p["M"] = plan.M;
  p["lambdas"] = lambdas;
  p["overlap"] = plan.overlap;
  p["stop_after_period"] = plan.stop_after_period ? nlohmann::ordered_json(*plan.stop_after_period)
                                                  : nlohmann::ordered_json(nullptr);
  p["resolve_master"] = plan.resolve_master;
  doc["plan"] = p;
  doc["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    nlohmann::ordered_json e;
    e["stage"] = s.stage;
    if (s.stage == "horizon") {
      e["horizon"] = s.horizon;
      e["first_period"] = s.first_period;
      e["last_period"] = s.last_period;
      e["accept_until"] = s.accept_until;
    }
    e["rows"] = s.rows;
    e["cols"] = s.cols;
    e["build_seconds"] = s.build_seconds;
    e["solve_seconds"] = s.solve_seconds;
    e["objective"] = s.objective;
    e["iterations"] = s.iterations;
    e["status"] = s.status;
    doc["stages"].push_back(e);
  }
  doc["objective"] = objective;
  doc["partial"] = partial;
  doc["solved_until"] = solved_until;
  doc["max_residual"] = max_residual;
  if (fine_tune_k) {
    doc["fine_tune"] = {{"k", *fine_tune_k}, {"objective_before", *objective_before_fine_tune}};
  }
  if (baseline) {
    doc["baseline"] = *baseline;
    doc["gap"] = *gap();
  }
  doc["total_seconds"] = total_seconds;
  return doc;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double clamp_to(double v, double lo, double up) { return std::min(std::max(v, lo), up); }

/// Targets z^i_k: per horizon k (1-based), base group id -> master value.
using Guidance = std::vector<std::unordered_map<std::size_t, double>>;

class Runner {
 public:
  Runner(const SequentialModel& seq, const HorizonPlan& plan, const DecompositionOptions& opts,
         bool forward, bool guided, const char* name)
      : seq_(seq), plan_(plan), opts_(opts), forward_(forward), name_(name) {
    check_plan(plan, seq.T);
    solver_ = opts.solver ? opts.solver : &reference_;
    guided_ = guided && plan.h > 1;
    lambdas_.assign(plan.h, plan.lambdas.empty() ? default_lambda(seq) : plan.lambdas.front());
    if (plan.lambdas.size() == plan.h) lambdas_ = plan.lambdas;
    for (std::size_t g = 0; g < seq.groups.size(); ++g) group_id_.emplace(seq.groups[g], g);
  }

  DecompositionResult run() {
    auto t0 = Clock::now();
    DecompositionResult out;
    out.manifest.method = name_;
    out.manifest.plan = plan_;
    out.manifest.lambdas = lambdas_;
    accepted_.assign(seq_.base.num_cols(), 0.0);
    if (guided_) solve_master(out.manifest);

    int solved_until = 0;
    for (std::size_t k = 1; k <= plan_.h; ++k) {
      solve_horizon(k, out.manifest);
      solved_until = plan_.boundaries[k] - 1;
      if (guided_ && plan_.resolve_master && k < plan_.h) resolve_master(k, out.manifest);
      if (plan_.stop_after_period && solved_until >= *plan_.stop_after_period) break;
    }

    auto& s = out.solution;
    s.x = accepted_;
    s.iterations = iterations_;
    for (std::size_t c = 0; c < s.x.size(); ++c) s.objective += seq_.base.cost(c) * s.x[c];
    out.partial = solved_until < seq_.T;
    out.solved_until = solved_until;
    solve::AuditReport audit;
    if (out.partial) {
      int K = plan_.stop_after_period.value_or(solved_until);
      std::vector<char> rows(seq_.base.num_rows());
      for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = seq_.row_period[r] <= K ? 1 : 0;
      audit = solve::audit_rows(seq_.base, s.x, rows);
    } else {
      audit = solve::audit_solution(seq_.base, s.x);
    }
    s.status = audit.ok(opts_.audit_tol) ? Status::Optimal : Status::NumericalTrouble;

    auto& m = out.manifest;
    m.objective = s.objective;
    m.partial = out.partial;
    m.solved_until = solved_until;
    m.max_residual = std::max(audit.max_row_residual, audit.max_bound_violation);
    m.total_seconds = seconds_since(t0);
    return out;
  }

 private:
  struct Source {
    const SequentialModel* model;
    SequentialModel owned;
    /// Source column -> base column (npos for aggregated tail columns).
    std::vector<std::size_t> to_base;
    int last_period;
  };

  /// Base model for plain windows; an aggregated model with a tail otherwise.
  void make_source(Source& src, int end) {
    if (!forward_ || end >= seq_.T) {
      src.model = &seq_;
      src.to_base.resize(seq_.base.num_cols());
      for (std::size_t c = 0; c < src.to_base.size(); ++c) src.to_base[c] = c;
      src.last_period = end;
      return;
    }
    PeriodGroups groups;
    for (int t = 1; t <= end; ++t) groups.emplace_back(t, t);
    int tail = seq_.T - end;
    int m = std::min(plan_.M, tail);
    for (int g = 0; g < m; ++g) {
      int a = end + 1 + g * tail / m;
      int b = end + (g + 1) * tail / m;
      groups.emplace_back(a, b);
    }
    src.owned = aggregate_periods(seq_, groups);
    src.model = &src.owned;
    const auto& agg = src.owned.base;
    src.to_base.assign(agg.num_cols(), SequentialModel::npos);
    for (std::size_t c = 0; c < agg.num_cols(); ++c) {
      if (src.owned.var_period[c] > end) continue;
      std::size_t b = seq_.find_column(agg.family_name(c), agg.col_index(c));
      src.to_base[c] = b;
      if (b != SequentialModel::npos) src.owned.base.set_integer(c, seq_.base.is_integer(b));
    }
    src.last_period = src.owned.T;
  }

  void solve_horizon(std::size_t k, RunManifest& manifest) {
    auto t0 = Clock::now();
    const int start = plan_.boundaries[k - 1];
    const int accept = plan_.boundaries[k] - 1;
    const int end = std::min(seq_.T, accept + plan_.overlap);

    Source src;
    make_source(src, end);
    const SequentialModel& sm = *src.model;
    const CanonicalModel& model = sm.base;

    std::vector<char> keep_row(model.num_rows(), 0);
    std::vector<char> keep_col(model.num_cols(), 0);
    for (std::size_t c = 0; c < model.num_cols(); ++c) {
      int p = sm.var_period[c];
      if (p >= start && p <= src.last_period) keep_col[c] = 1;
    }
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
      int p = sm.row_period[r];
      if (p < start || p > src.last_period) continue;
      keep_row[r] = 1;
      for (std::size_t c : model.row_cols(r)) keep_col[c] = 1;
    }

    CanonicalModel sub;
    std::vector<std::size_t> sub_of(model.num_cols(), SequentialModel::npos);
    std::vector<std::size_t> src_of;
    for (std::size_t c = 0; c < model.num_cols(); ++c) {
      if (!keep_col[c]) continue;
      double lo = model.lower(c), up = model.upper(c);
      if (sm.var_period[c] < start) {
        std::size_t b = src.to_base[c];
        double v = b == SequentialModel::npos ? 0.0 : accepted_[b];
        lo = up = clamp_to(v, model.lower(c), model.upper(c));
      }
      sub_of[c] = sub.add_column(model.family_name(c), model.col_index(c), lo, up,
                                 model.is_integer(c), model.cost(c));
      src_of.push_back(c);
    }
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
      if (!keep_row[r]) continue;
      entries.clear();
      auto cols = model.row_cols(r);
      auto vals = model.row_values(r);
      for (std::size_t e = 0; e < cols.size(); ++e) entries.push_back({sub_of[cols[e]], vals[e]});
      auto o = model.origin(r);
      sub.add_row(entries, model.sign(r), model.rhs(r), o.block, o.global);
    }
    if (guided_ && lambdas_[k - 1] > 0) add_guidance(sub, sm, src, src_of, k, start, accept);

    double build = seconds_since(t0);
    auto t1 = Clock::now();
    Solution s = solver_->solve(sub, opts_.solve);
    iterations_ += s.iterations;
    StageRecord rec{"horizon", k, start, src.last_period, accept, sub.num_rows(), sub.num_cols(),
                    build, seconds_since(t1), s.objective, s.iterations, solve::to_string(s.status)};
    manifest.stages.push_back(rec);
    if (!s.optimal()) throw DecompositionInfeasible(k, s.status);

    for (std::size_t j = 0; j < src_of.size(); ++j) {
      std::size_t c = src_of[j];
      int p = sm.var_period[c];
      if (p < start || p > accept) continue;
      std::size_t b = src.to_base[c];
      if (b != SequentialModel::npos) accepted_[b] = s.x[j];
    }
  }

  /// sum_{t in horizon} x^i_t - z^i_k = u - v, with lambda_k (u + v) in the objective.
  void add_guidance(CanonicalModel& sub, const SequentialModel& sm, const Source& src,
                    const std::vector<std::size_t>& src_of, std::size_t k, int start, int accept) {
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t j = 0; j < src_of.size(); ++j) {
      std::size_t c = src_of[j];
      int p = sm.var_period[c];
      if (p < start || p > accept) continue;
      std::size_t b = src.to_base[c];
      if (b == SequentialModel::npos) continue;
      members[seq_.var_group[b]].push_back(j);
    }
    double lambda = lambdas_[k - 1];
    std::vector<Entry> row;
    for (const auto& [g, cols] : members) {
      auto it = guidance_[k].find(g);
      double z = it == guidance_[k].end() ? 0.0 : it->second;
      Index gi = static_cast<Index>(g);
      std::size_t u = sub.add_column("gu", std::span<const Index>(&gi, 1), 0, kInf, false, lambda);
      std::size_t v = sub.add_column("gv", std::span<const Index>(&gi, 1), 0, kInf, false, lambda);
      row.clear();
      for (std::size_t j : cols) row.push_back({j, 1.0});
      row.push_back({u, -1.0});
      row.push_back({v, 1.0});
      Index global[2] = {static_cast<Index>(k), gi};
      sub.add_row(row, Sign::Eq, z, 0, global);
    }
  }

  void read_guidance(const Solution& s, std::size_t from) {
    for (std::size_t c = 0; c < master_.base.num_cols(); ++c) {
      std::size_t k = static_cast<std::size_t>(master_.var_period[c]);
      if (k < from) continue;
      auto it = group_id_.find(master_.groups[master_.var_group[c]]);
      if (it != group_id_.end()) guidance_[k][it->second] = s.x[c];
    }
  }

  void solve_master(RunManifest& manifest) {
    auto t0 = Clock::now();
    PeriodGroups groups;
    for (std::size_t k = 0; k < plan_.h; ++k) {
      groups.emplace_back(plan_.boundaries[k], plan_.boundaries[k + 1] - 1);
    }
    master_ = aggregate_periods(seq_, groups);
    double build = seconds_since(t0);
    auto t1 = Clock::now();
    Solution s = solver_->solve(master_.base, opts_.solve);
    iterations_ += s.iterations;
    manifest.stages.push_back({"master", 0, 1, static_cast<int>(plan_.h), 0,
                               master_.base.num_rows(), master_.base.num_cols(), build,
                               seconds_since(t1), s.objective, s.iterations,
                               solve::to_string(s.status)});
    if (!s.optimal()) throw MasterInfeasible(s.status);
    guidance_.assign(plan_.h + 1, {});
    read_guidance(s, 1);
  }

  /// Fixes master periods 1..k to the accepted period sums and re-solves;
  /// keeps the previous targets when that fails.
  void resolve_master(std::size_t k, RunManifest& manifest) {
    auto t0 = Clock::now();
    std::map<std::pair<std::size_t, int>, double> sums;
    for (std::size_t c = 0; c < seq_.base.num_cols(); ++c) {
      int p = seq_.var_period[c];
      if (p >= plan_.boundaries[k]) continue;
      int horizon = static_cast<int>(std::upper_bound(plan_.boundaries.begin(),
                                                      plan_.boundaries.end(), p) -
                                     plan_.boundaries.begin());
      sums[{seq_.var_group[c], horizon}] += accepted_[c];
    }
    CanonicalModel fixed = master_.base;
    for (std::size_t c = 0; c < fixed.num_cols(); ++c) {
      int p = master_.var_period[c];
      if (p > static_cast<int>(k)) continue;
      double v = 0;
      auto it = group_id_.find(master_.groups[master_.var_group[c]]);
      if (it != group_id_.end()) {
        auto s = sums.find({it->second, p});
        if (s != sums.end()) v = s->second;
      }
      v = clamp_to(v, fixed.lower(c), fixed.upper(c));
      fixed.set_bounds(c, v, v);
    }
    double build = seconds_since(t0);
    auto t1 = Clock::now();
    Solution s = solver_->solve(fixed, opts_.solve);
    iterations_ += s.iterations;
    manifest.stages.push_back({"master", k, static_cast<int>(k) + 1, static_cast<int>(plan_.h), 0,
                               fixed.num_rows(), fixed.num_cols(), build, seconds_since(t1),
                               s.objective, s.iterations, solve::to_string(s.status)});
    if (s.optimal()) read_guidance(s, k + 1);
  }

  const SequentialModel& seq_;
  const HorizonPlan& plan_;
  const DecompositionOptions& opts_;
  bool forward_;
  bool guided_ = false;
  const char* name_;
  solve::ReferenceSimplex reference_;
  const solve::LpSolver* solver_ = nullptr;
  std::vector<double> lambdas_;
  std::map<GroupKey, std::size_t> group_id_;
  std::vector<double> accepted_;
  std::size_t iterations_ = 0;
  SequentialModel master_;
  Guidance guidance_;
};

}  // namespace

DecompositionResult rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                    const DecompositionOptions& opts) {
  return Runner(seq, plan, opts, false, false, "rh").run();
}

DecompositionResult forward_rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                            const DecompositionOptions& opts) {
  return Runner(seq, plan, opts, true, false, "frh").run();
}

DecompositionResult guided_rolling_horizon(const SequentialModel& seq, const HorizonPlan& plan,
                                           const DecompositionOptions& opts) {
  return Runner(seq, plan, opts, false, true, "grh").run();
}

DecompositionResult guided_frh(const SequentialModel& seq, const HorizonPlan& plan,
                               const DecompositionOptions& opts) {
  return Runner(seq, plan, opts, true, true, "gfrh").run();
}

DecompositionResult decompose(Method method, const SequentialModel& seq, const HorizonPlan& plan,
                              const DecompositionOptions& opts) {
  switch (method) {
    case Method::RH: return rolling_horizon(seq, plan, opts);
    case Method::FRH: return forward_rolling_horizon(seq, plan, opts);
    case Method::GRH: return guided_rolling_horizon(seq, plan, opts);
    case Method::GFRH: return guided_frh(seq, plan, opts);
  }
  throw std::invalid_argument("unknown method");
}

Solution fine_tune(const SequentialModel& seq, const Solution& solution, int k,
                   const DecompositionOptions& opts) {
  const CanonicalModel& base = seq.base;
  if (solution.x.size() != base.num_cols()) return solution;
  double before = 0;
  for (std::size_t c = 0; c < base.num_cols(); ++c) before += base.cost(c) * solution.x[c];

  CanonicalModel restricted = base;
  for (std::size_t c = 0; c < base.num_cols(); ++c) {
    if (seq.var_period[c] <= k || seq.is_state(c)) continue;
    double v = clamp_to(solution.x[c], base.lower(c), base.upper(c));
    restricted.set_bounds(c, v, v);
  }
  solve::ReferenceSimplex reference;
  const solve::LpSolver& solver = opts.solver ? *opts.solver : reference;
  Solution s = solver.solve(restricted, opts.solve);
  if (!s.optimal() || s.x.size() != base.num_cols()) return solution;
  double after = 0;
  for (std::size_t c = 0; c < base.num_cols(); ++c) after += base.cost(c) * s.x[c];
  if (after > before) return solution;
  if (!solve::audit_solution(base, s.x).ok(opts.audit_tol)) return solution;
  s.objective = after;
  s.iterations += solution.iterations;
  return s;
}

}  // namespace meadow::decomp
