#pragma once

// Small-LP oracles: vertex enumeration for boxed LPs, exhaustive search for
// binary programs, and a random LP generator.

#include <cmath>
#include <optional>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/gen/generators.hpp"

namespace lp_oracle {

using meadow::CanonicalModel;
using meadow::Entry;
using meadow::Sign;

struct Dense {
  std::size_t n = 0;
  std::vector<std::vector<double>> A;
  std::vector<Sign> sign;
  std::vector<double> b;
  std::vector<double> c, lo, up;
};

inline Dense dense(const CanonicalModel& m) {
  Dense d;
  d.n = m.num_cols();
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    std::vector<double> row(d.n, 0.0);
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) row[cols[k]] = vals[k];
    d.A.push_back(row);
    d.sign.push_back(m.sign(r));
    d.b.push_back(m.rhs(r));
  }
  for (std::size_t j = 0; j < d.n; ++j) {
    d.c.push_back(m.cost(j));
    d.lo.push_back(m.lower(j));
    d.up.push_back(m.upper(j));
  }
  return d;
}

inline bool feasible(const Dense& d, const std::vector<double>& x, double tol) {
  for (std::size_t j = 0; j < d.n; ++j) {
    if (x[j] < d.lo[j] - tol || x[j] > d.up[j] + tol) return false;
  }
  for (std::size_t r = 0; r < d.A.size(); ++r) {
    double s = 0;
    for (std::size_t j = 0; j < d.n; ++j) s += d.A[r][j] * x[j];
    double g = s - d.b[r];
    if (d.sign[r] == Sign::Eq && std::abs(g) > tol) return false;
    if (d.sign[r] == Sign::Le && g > tol) return false;
    if (d.sign[r] == Sign::Ge && g < -tol) return false;
  }
  return true;
}

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> A,
                                                       std::vector<double> b) {
  std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
    }
    if (std::abs(A[p][k]) < 1e-10) return std::nullopt;
    std::swap(A[p], A[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t k = 0; k < n; ++k) b[k] /= A[k][k];
  return b;
}

/// Minimum objective over all vertices; requires finite bounds on every
/// column (so the LP is bounded). nullopt when infeasible.
inline std::optional<double> vertex_optimum(const CanonicalModel& m, double tol = 1e-7) {
  Dense d = dense(m);
  // Candidate hyperplanes: every row, every lower and upper bound.
  std::vector<std::vector<double>> H;
  std::vector<double> h;
  for (std::size_t r = 0; r < d.A.size(); ++r) {
    H.push_back(d.A[r]);
    h.push_back(d.b[r]);
  }
  for (std::size_t j = 0; j < d.n; ++j) {
    std::vector<double> e(d.n, 0.0);
    e[j] = 1.0;
    H.push_back(e);
    h.push_back(d.lo[j]);
    H.push_back(e);
    h.push_back(d.up[j]);
  }
  std::optional<double> best;
  std::vector<std::size_t> pick(d.n);
  auto visit = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == d.n) {
      std::vector<std::vector<double>> A;
      std::vector<double> b;
      for (std::size_t k : pick) {
        A.push_back(H[k]);
        b.push_back(h[k]);
      }
      auto x = solve_square(A, b);
      if (!x || !feasible(d, *x, tol)) return;
      double z = 0;
      for (std::size_t j = 0; j < d.n; ++j) z += d.c[j] * (*x)[j];
      if (!best || z < *best) best = z;
      return;
    }
    for (std::size_t k = start; k < H.size(); ++k) {
      pick[depth] = k;
      self(self, k + 1, depth + 1);
    }
  };
  if (d.n == 0) {
    return feasible(d, {}, tol) ? std::optional<double>(0.0) : std::nullopt;
  }
  visit(visit, 0, 0);
  return best;
}

/// Exhaustive minimum over x in {0,1}^n.
inline std::optional<double> binary_optimum(const CanonicalModel& m) {
  Dense d = dense(m);
  std::optional<double> best;
  std::vector<double> x(d.n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d.n); ++mask) {
    for (std::size_t j = 0; j < d.n; ++j) x[j] = (mask >> j) & 1 ? 1.0 : 0.0;
    if (!feasible(d, x, 1e-9)) continue;
    double z = 0;
    for (std::size_t j = 0; j < d.n; ++j) z += d.c[j] * x[j];
    if (!best || z < *best) best = z;
  }
  return best;
}

/// Random LP. With `boxed` every column gets finite bounds; otherwise some
/// are free or one-sided. Right-hand sides are usually built around a point
/// inside the bounds so most instances are feasible.
inline CanonicalModel random_lp(meadow::gen::SplitMix64& rng, std::size_t max_cols,
                                std::size_t max_rows, bool boxed) {
  CanonicalModel m;
  std::size_t n = 1 + rng.below(max_cols);
  std::size_t rows = rng.below(max_rows + 1);
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = static_cast<double>(rng.between(-4, 1));
    double up = lo + static_cast<double>(rng.between(1, 6));
    if (!boxed) {
      switch (rng.below(5)) {
        case 0: lo = -meadow::kInf; break;
        case 1: up = meadow::kInf; break;
        case 2: lo = -meadow::kInf; up = meadow::kInf; break;
        default: break;
      }
    }
    double a = std::isfinite(lo) ? lo : -3.0, b = std::isfinite(up) ? up : a + 5.0;
    x0[j] = a + (b - a) * rng.unit();
    meadow::Index idx = static_cast<meadow::Index>(j);
    double cost = static_cast<double>(rng.between(-5, 5));
    m.add_column("x", std::span<const meadow::Index>(&idx, 1), lo, up, false, cost);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<Entry> e;
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.below(3) == 0) continue;
      double v = static_cast<double>(rng.between(-5, 5));
      if (v == 0) continue;
      e.push_back({j, v});
      s += v * x0[j];
    }
    Sign sign = static_cast<Sign>(rng.below(3));
    double rhs;
    if (rng.below(6) == 0) {
      rhs = static_cast<double>(rng.between(-10, 10));
    } else if (sign == Sign::Eq) {
      rhs = s;
    } else {
      rhs = sign == Sign::Le ? std::ceil(s) : std::floor(s);
    }
    meadow::Index g = static_cast<meadow::Index>(r);
    m.add_row(e, sign, rhs, 1, std::span<const meadow::Index>(&g, 1));
  }
  return m;
}

}  // namespace lp_oracle
