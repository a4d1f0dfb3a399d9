#include <algorithm>
#include <cmath>
#include <utility>

#include "meadow/solve/audit.hpp"
#include "meadow/solve/solver.hpp"

namespace meadow::solve {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
    case Status::NumericalTrouble: return "numerical_trouble";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-12;
constexpr double kTieTol = 1e-12;
constexpr std::size_t kDegenerateRun = 50;

// Original column j in terms of nonnegative standard columns.
struct ColumnMap {
  enum Kind { Fixed, Lower, Upper, Free } kind = Lower;
  double shift = 0.0;  // fixed value, lower or upper bound
  std::size_t a = 0, b = 0;
};

struct StdRow {
  std::vector<std::pair<std::size_t, double>> entries;
  Sign sign = Sign::Eq;
  double rhs = 0.0;
};

struct StandardForm {
  std::vector<ColumnMap> maps;
  std::size_t n_struct = 0;
  std::vector<double> cost;
  std::vector<StdRow> rows;
  bool infeasible_bounds = false;
};

StandardForm standardize(const CanonicalModel& m) {
  StandardForm f;
  f.maps.resize(m.num_cols());
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    double lo = m.lower(c), up = m.upper(c);
    ColumnMap& cm = f.maps[c];
    if (lo > up || lo == kInf || up == -kInf || std::isnan(lo) || std::isnan(up)) {
      f.infeasible_bounds = true;
      cm.kind = ColumnMap::Fixed;
      continue;
    }
    if (lo == up) {
      cm.kind = ColumnMap::Fixed;
      cm.shift = lo;
    } else if (lo > -kInf) {
      cm.kind = ColumnMap::Lower;
      cm.shift = lo;
      cm.a = f.n_struct++;
    } else if (up < kInf) {
      cm.kind = ColumnMap::Upper;
      cm.shift = up;
      cm.a = f.n_struct++;
    } else {
      cm.kind = ColumnMap::Free;
      cm.a = f.n_struct++;
      cm.b = f.n_struct++;
    }
  }
  f.cost.assign(f.n_struct, 0.0);
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    const ColumnMap& cm = f.maps[c];
    double v = m.cost(c);
    switch (cm.kind) {
      case ColumnMap::Fixed: break;
      case ColumnMap::Lower: f.cost[cm.a] += v; break;
      case ColumnMap::Upper: f.cost[cm.a] -= v; break;
      case ColumnMap::Free:
        f.cost[cm.a] += v;
        f.cost[cm.b] -= v;
        break;
    }
  }
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    StdRow row;
    row.sign = m.sign(r);
    row.rhs = m.rhs(r);
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const ColumnMap& cm = f.maps[cols[k]];
      double v = vals[k];
      switch (cm.kind) {
        case ColumnMap::Fixed: row.rhs -= v * cm.shift; break;
        case ColumnMap::Lower:
          row.rhs -= v * cm.shift;
          row.entries.push_back({cm.a, v});
          break;
        case ColumnMap::Upper:
          row.rhs -= v * cm.shift;
          row.entries.push_back({cm.a, -v});
          break;
        case ColumnMap::Free:
          row.entries.push_back({cm.a, v});
          row.entries.push_back({cm.b, -v});
          break;
      }
    }
    f.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    const ColumnMap& cm = f.maps[c];
    if (cm.kind == ColumnMap::Lower && m.upper(c) < kInf) {
      f.rows.push_back({{{cm.a, 1.0}}, Sign::Le, m.upper(c) - m.lower(c)});
    }
  }
  for (StdRow& row : f.rows) {
    if (row.rhs < 0) {
      row.rhs = -row.rhs;
      for (auto& e : row.entries) e.second = -e.second;
      if (row.sign == Sign::Le) row.sign = Sign::Ge;
      else if (row.sign == Sign::Ge) row.sign = Sign::Le;
    }
  }
  return f;
}

// Solves a dense square system in place by Gaussian elimination with partial
// pivoting. Returns false when singular.
bool dense_solve(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(A[i * n + k]) > std::abs(A[p * n + k])) p = i;
    }
    if (std::abs(A[p * n + k]) < 1e-14) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = A[i * n + k] / A[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= A[k * n + j] * b[j];
    b[k] = s / A[k * n + k];
  }
  return true;
}

class Tableau {
 public:
  Tableau(const StandardForm& f, const SolveOptions& opts) : f_(f), opts_(opts) {
    m_ = f.rows.size();
    n_struct_ = f.n_struct;
    n_slack_ = 0;
    n_art_ = 0;
    for (const StdRow& r : f.rows) {
      if (r.sign != Sign::Eq) ++n_slack_;
      if (r.sign != Sign::Le) ++n_art_;
    }
    n_ = n_struct_ + n_slack_ + n_art_;
    w_ = n_ + 1;
    t_.assign(m_ * w_, 0.0);
    basis_.assign(m_, 0);
    col_kind_.assign(n_, 0);
    unit_row_.assign(n_ - n_struct_, 0);
    unit_val_.assign(n_ - n_struct_, 0.0);
    std::size_t slack = n_struct_, art = n_struct_ + n_slack_;
    for (std::size_t i = 0; i < m_; ++i) {
      const StdRow& r = f.rows[i];
      double* row = &t_[i * w_];
      for (const auto& [c, v] : r.entries) row[c] += v;
      row[n_] = r.rhs;
      if (r.sign != Sign::Eq) {
        row[slack] = r.sign == Sign::Le ? 1.0 : -1.0;
        unit_row_[slack - n_struct_] = i;
        unit_val_[slack - n_struct_] = row[slack];
        if (r.sign == Sign::Le) basis_[i] = slack;
        col_kind_[slack++] = 1;
      }
      if (r.sign != Sign::Le) {
        row[art] = 1.0;
        unit_row_[art - n_struct_] = i;
        unit_val_[art - n_struct_] = 1.0;
        basis_[i] = art;
        col_kind_[art++] = 2;
      }
    }
    d2_.assign(w_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) d2_[j] = f.cost[j];
  }

  Status run(std::size_t& iterations) {
    // Phase 1: minimize the sum of artificials.
    if (n_art_ > 0) {
      d1_.assign(w_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (col_kind_[basis_[i]] != 2) continue;
        const double* row = &t_[i * w_];
        for (std::size_t j = 0; j < w_; ++j) {
          if (j < n_ && col_kind_[j] == 2) continue;
          d1_[j] -= row[j];
        }
      }
      barred_.assign(n_, 0);
      Status s = iterate(d1_, true, iterations);
      if (s == Status::IterationLimit) return s;
      if (-d1_[n_] > opts_.feas_tol) return Status::Infeasible;
      drive_out_artificials();
      d1_.clear();
    }
    barred_.assign(n_, 0);
    for (std::size_t j = 0; j < n_; ++j) barred_[j] = col_kind_[j] == 2;
    return iterate(d2_, false, iterations);
  }

  // Standard-form values of the structural columns, recomputed from the
  // original rows when the tableau has drifted.
  std::vector<double> structural_values() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = std::max(0.0, t_[i * w_ + n_]);
    if (residual(x) > 1e-10 && m_ > 0) {
      std::vector<double> B(m_ * m_, 0.0), b(m_);
      std::vector<std::size_t> pos(n_, SIZE_MAX);
      for (std::size_t k = 0; k < m_; ++k) pos[basis_[k]] = k;
      for (std::size_t i = 0; i < m_; ++i) {
        b[i] = f_.rows[i].rhs;
        for (const auto& [c, v] : f_.rows[i].entries) {
          if (pos[c] != SIZE_MAX) B[i * m_ + pos[c]] += v;
        }
      }
      for (std::size_t j = n_struct_; j < n_; ++j) {
        if (pos[j] != SIZE_MAX) B[unit_row_[j - n_struct_] * m_ + pos[j]] = unit_val_[j - n_struct_];
      }
      if (dense_solve(B, b, m_)) {
        std::vector<double> y(n_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) y[basis_[k]] = std::max(0.0, b[k]);
        if (residual(y) < residual(x)) x = std::move(y);
      }
    }
    x.resize(n_struct_);
    return x;
  }

 private:
  double residual(const std::vector<double>& x) const {
    std::vector<double> s(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& [c, v] : f_.rows[i].entries) s[i] += v * x[c];
    }
    for (std::size_t j = n_struct_; j < n_; ++j) {
      s[unit_row_[j - n_struct_]] += unit_val_[j - n_struct_] * x[j];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) worst = std::max(worst, std::abs(s[i] - f_.rows[i].rhs));
    return worst;
  }

  Status iterate(std::vector<double>& d, bool phase1, std::size_t& iterations) {
    bool bland = false;
    std::size_t degenerate = 0;
    while (true) {
      std::size_t s = SIZE_MAX;
      double best = -opts_.opt_tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (barred_[j] || d[j] >= best) continue;
        s = j;
        if (bland) break;
        best = d[j];
      }
      if (s == SIZE_MAX) return Status::Optimal;
      if (iterations >= opts_.max_iters) return Status::IterationLimit;

      std::size_t r = SIZE_MAX;
      double ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        double a = t_[i * w_ + s];
        if (a <= kPivotTol) continue;
        double q = std::max(0.0, t_[i * w_ + n_]) / a;
        if (r == SIZE_MAX || q < ratio - kTieTol) {
          r = i;
          ratio = q;
        } else if (q <= ratio + kTieTol) {
          bool take = bland ? basis_[i] < basis_[r] : a > t_[r * w_ + s];
          if (take) {
            r = i;
            ratio = std::min(ratio, q);
          }
        }
      }
      if (r == SIZE_MAX) return phase1 ? Status::NumericalTrouble : Status::Unbounded;
      if (ratio <= kTieTol) {
        if (++degenerate > kDegenerateRun) bland = true;
      } else {
        degenerate = 0;
      }
      pivot(r, s);
      ++iterations;
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    double* pr = &t_[r * w_];
    double inv = 1.0 / pr[s];
    nz_.clear();
    for (std::size_t j = 0; j < w_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] *= inv;
      if (std::abs(pr[j]) < kDropTol && j != n_) {
        pr[j] = 0.0;
        continue;
      }
      nz_.push_back(j);
    }
    pr[s] = 1.0;
    auto eliminate = [&](double* row) {
      double f = row[s];
      if (f == 0.0) return;
      for (std::size_t j : nz_) row[j] -= f * pr[j];
      row[s] = 0.0;
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) eliminate(&t_[i * w_]);
    }
    if (!d1_.empty()) eliminate(d1_.data());
    eliminate(d2_.data());
    basis_[r] = s;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (col_kind_[basis_[i]] != 2) continue;
      const double* row = &t_[i * w_];
      std::size_t pick = SIZE_MAX;
      double mag = 1e-9;
      for (std::size_t j = 0; j < n_; ++j) {
        if (col_kind_[j] == 2) continue;
        if (std::abs(row[j]) > mag) {
          mag = std::abs(row[j]);
          pick = j;
        }
      }
      // No candidate: the row is redundant and its artificial stays at zero.
      if (pick != SIZE_MAX) pivot(i, pick);
    }
  }

  const StandardForm& f_;
  const SolveOptions& opts_;
  std::size_t m_ = 0, n_ = 0, w_ = 0;
  std::size_t n_struct_ = 0, n_slack_ = 0, n_art_ = 0;
  std::vector<double> t_;
  std::vector<double> d1_, d2_;
  std::vector<std::size_t> basis_;
  std::vector<std::uint8_t> col_kind_;  // 0 structural, 1 slack, 2 artificial
  std::vector<std::size_t> unit_row_;    // slack/artificial columns: their row
  std::vector<double> unit_val_;
  std::vector<char> barred_;
  std::vector<std::size_t> nz_;
};

std::vector<double> map_back(const CanonicalModel& m, const StandardForm& f,
                             const std::vector<double>& xs) {
  std::vector<double> x(m.num_cols(), 0.0);
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    const ColumnMap& cm = f.maps[c];
    switch (cm.kind) {
      case ColumnMap::Fixed: x[c] = cm.shift; break;
      case ColumnMap::Lower: x[c] = cm.shift + xs[cm.a]; break;
      case ColumnMap::Upper: x[c] = cm.shift - xs[cm.a]; break;
      case ColumnMap::Free: x[c] = xs[cm.a] - xs[cm.b]; break;
    }
    x[c] = std::clamp(x[c], m.lower(c), m.upper(c));
  }
  return x;
}

}  // namespace

Solution ReferenceSimplex::solve(const CanonicalModel& m, const SolveOptions& opts) const {
  Solution sol;
  StandardForm f = standardize(m);
  if (f.infeasible_bounds) {
    sol.status = Status::Infeasible;
    return sol;
  }
  Tableau t(f, opts);
  sol.status = t.run(sol.iterations);
  if (sol.status == Status::Infeasible) return sol;
  sol.x = map_back(m, f, t.structural_values());
  for (std::size_t c = 0; c < m.num_cols(); ++c) sol.objective += m.cost(c) * sol.x[c];
  if (sol.status == Status::Optimal && !audit_solution(m, sol.x).ok(opts.feas_tol)) {
    sol.status = Status::NumericalTrouble;
  }
  return sol;
}

Solution solve_lp(const CanonicalModel& model, const SolveOptions& opts) {
  return ReferenceSimplex().solve(model, opts);
}

}  // namespace meadow::solve
