#include <doctest.h>

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "meadow/gen/generators.hpp"
#include "meadow/inst/instantiate.hpp"
#include "meadow/solve/audit.hpp"
#include "meadow/solve/solver.hpp"
#include "support/lp_oracle.hpp"

using namespace meadow;
using namespace meadow::solve;

namespace {

CanonicalModel worked_flow() {
  auto g = gen::worked_min_cost_flow();
  return inst::instantiate_efficient(g.model, g.data);
}

std::size_t col(const CanonicalModel& m, const std::string& name) {
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    if (column_name(m, c) == name) return c;
  }
  FAIL("no column " << name);
  return 0;
}

CanonicalModel one_var(double lo, double up, double cost) {
  CanonicalModel m;
  m.add_column("x", {}, lo, up, false, cost);
  return m;
}

}  // namespace

TEST_CASE("worked flow example solves to 2") {
  auto m = worked_flow();
  auto s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(2.0));
  double p1 = s.x[col(m, "x_1_2")] + s.x[col(m, "x_2_4")];
  double p2 = s.x[col(m, "x_1_3")] + s.x[col(m, "x_3_4")];
  CHECK(p1 + p2 == doctest::Approx(2.0));
  CHECK(audit_solution(m, s.x).ok(1e-7));
}

TEST_CASE("trivial infeasible and unbounded") {
  auto inf = one_var(0, kInf, 1);
  inf.add_row(std::vector<Entry>{{0, 1.0}}, Sign::Le, -1, 1, {});
  CHECK(solve_lp(inf).status == Status::Infeasible);

  CHECK(solve_lp(one_var(0, kInf, -1)).status == Status::Unbounded);
  CHECK(solve_lp(one_var(3, 1, 0)).status == Status::Infeasible);

  // Certificate: y = (1, 1) on rows x1 + x2 <= 1 and -x1 - x2 <= -2 sums to 0 <= -1.
  CanonicalModel m;
  m.add_column("x", std::vector<Index>{1}, 0, kInf);
  m.add_column("x", std::vector<Index>{2}, 0, kInf);
  m.add_row(std::vector<Entry>{{0, 1.0}, {1, 1.0}}, Sign::Le, 1, 1, {});
  m.add_row(std::vector<Entry>{{0, -1.0}, {1, -1.0}}, Sign::Le, -2, 2, {});
  CHECK(solve_lp(m).status == Status::Infeasible);

  // Ray d = (1, 1) keeps feasibility and lowers the objective.
  CanonicalModel u;
  u.add_column("x", std::vector<Index>{1}, 0, kInf, false, -1);
  u.add_column("x", std::vector<Index>{2}, 0, kInf, false, 0);
  u.add_row(std::vector<Entry>{{0, 1.0}, {1, -1.0}}, Sign::Le, 2, 1, {});
  CHECK(solve_lp(u).status == Status::Unbounded);
}

TEST_CASE("bounds forms") {
  CHECK(solve_lp(one_var(-kInf, 4, -1)).objective == -4);
  CHECK(solve_lp(one_var(-kInf, kInf, 0)).status == Status::Optimal);
  CHECK(solve_lp(one_var(-2.5, 7, 1)).x[0] == -2.5);
  CHECK(solve_lp(one_var(1.25, 1.25, 3)).x[0] == 1.25);
  auto free_col = one_var(-kInf, kInf, 1);
  free_col.add_row(std::vector<Entry>{{0, 1.0}}, Sign::Ge, -3, 1, {});
  CHECK(solve_lp(free_col).x[0] == doctest::Approx(-3));
}

TEST_CASE("empty model is optimal at zero") {
  CanonicalModel m;
  auto s = solve_lp(m);
  CHECK(s.status == Status::Optimal);
  CHECK(s.objective == 0);
}

TEST_CASE("iteration limit") {
  SolveOptions o;
  o.max_iters = 0;
  CHECK(solve_lp(worked_flow(), o).status == Status::IterationLimit);
}

TEST_CASE("vertex enumeration agrees on boxed random LPs") {
  gen::SplitMix64 rng(101);
  std::size_t optimal = 0, infeasible = 0;
  for (int k = 0; k < 300; ++k) {
    auto m = lp_oracle::random_lp(rng, 5, 5, true);
    auto s = solve_lp(m);
    auto oracle = lp_oracle::vertex_optimum(m);
    if (!oracle) {
      CHECK(s.status == Status::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(*oracle).epsilon(1e-7));
    CHECK_MESSAGE(audit_solution(m, s.x).ok(1e-7), audit_solution(m, s.x).summary());
    ++optimal;
  }
  CHECK(optimal > 150);
  CHECK(infeasible > 0);
}

TEST_CASE("unboxed random LPs pass the audit") {
  gen::SplitMix64 rng(103);
  for (int k = 0; k < 300; ++k) {
    auto m = lp_oracle::random_lp(rng, 12, 10, false);
    auto s = solve_lp(m);
    CHECK(s.status != Status::NumericalTrouble);
    if (s.status == Status::Optimal) {
      CHECK_MESSAGE(audit_solution(m, s.x).ok(1e-7), audit_solution(m, s.x).summary());
    }
  }
}

TEST_CASE("solves are deterministic") {
  gen::SplitMix64 rng(5);
  auto m = lp_oracle::random_lp(rng, 12, 10, true);
  auto a = solve_lp(m), b = solve_lp(m);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  for (std::size_t j = 0; j < a.x.size(); ++j) {
    CHECK(std::bit_cast<std::uint64_t>(a.x[j]) == std::bit_cast<std::uint64_t>(b.x[j]));
  }
}

TEST_CASE("audit flags violations") {
  auto m = worked_flow();
  std::vector<double> x(m.num_cols(), 0.0);
  auto r = audit_solution(m, x);
  CHECK_FALSE(r.ok(1e-7));
  CHECK(r.max_row_residual == 1.0);
  x[col(m, "x_1_2")] = 1;
  x[col(m, "x_2_4")] = 1;
  CHECK(audit_solution(m, x).ok(0));
  CHECK(audit_solution(m, x).objective == 2);
  x[0] = -1e-3;
  CHECK(audit_solution(m, x).max_bound_violation == doctest::Approx(1e-3));
  CHECK_FALSE(audit_solution(m, std::vector<double>(2)).ok(1));
}

TEST_CASE("fixing variables") {
  auto m = worked_flow();
  auto fixed = fix_variables(m, {{col(m, "x_1_2"), 1.0}});
  auto s = solve_lp(fixed);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.x[col(m, "x_2_4")] == doctest::Approx(1.0));
  CHECK(fixed.num_rows() == m.num_rows());

  CHECK(equivalent(fix_variables(m, {}), m));

  auto capped = m;
  capped.set_bounds(0, 0, 1);
  CHECK_THROWS_AS(fix_variables(capped, {{0, 2.0}}), BoundViolation);
  CHECK_THROWS_AS(fix_variables(m, {{0, -1.0}}), BoundViolation);
}

TEST_CASE("rounding ties go toward zero") {
  CHECK(round_half_toward_zero(0.5) == 0);
  CHECK(round_half_toward_zero(-0.5) == 0);
  CHECK(round_half_toward_zero(1.5) == 1);
  CHECK(round_half_toward_zero(-1.5) == -1);
  CHECK(round_half_toward_zero(2.6) == 3);
  CHECK(round_half_toward_zero(-2.6) == -3);
}

TEST_CASE("round and fix") {
  ReferenceSimplex lp;
  SUBCASE("already integral") {
    auto m = worked_flow();
    auto s = solve_lp(m);
    std::vector<std::size_t> ints(m.num_cols());
    for (std::size_t c = 0; c < ints.size(); ++c) ints[c] = c;
    auto r = round_and_fix(m, s, ints, lp);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.x == s.x);
    CHECK(r.iterations == 0);
  }
  SUBCASE("half rounds down, up is rejected") {
    auto m = one_var(0, 1, -1);
    m.add_row(std::vector<Entry>{{0, 1.0}}, Sign::Le, 0.5, 1, {});
    auto s = solve_lp(m);
    REQUIRE(s.x[0] == 0.5);
    std::vector<std::size_t> ints{0};
    auto r = round_and_fix(m, s, ints, lp);
    CHECK(r.status == Status::Optimal);
    CHECK(r.x[0] == 0.0);
    CHECK(solve_lp(fix_variables(m, {{0, 1.0}})).status == Status::Infeasible);
  }
  SUBCASE("knapsack toy against exhaustive search") {
    // min -(v . x)  s.t.  w . x <= cap, x in {0,1}^5
    gen::SplitMix64 rng(77);
    for (int k = 0; k < 30; ++k) {
      CanonicalModel m;
      std::vector<Entry> w;
      for (Index j = 0; j < 5; ++j) {
        m.add_column("x", std::vector<Index>{j}, 0, 1, true,
                     -static_cast<double>(rng.between(1, 20)));
        w.push_back({static_cast<std::size_t>(j), static_cast<double>(rng.between(1, 10))});
      }
      m.add_row(w, Sign::Le, static_cast<double>(rng.between(5, 25)), 1, {});
      auto best = lp_oracle::binary_optimum(m);
      REQUIRE(best);
      auto s = solve_lp(m);
      REQUIRE(s.optimal());
      CHECK(s.objective <= *best + 1e-9);
      std::vector<std::size_t> ints{0, 1, 2, 3, 4};
      auto r = round_and_fix(m, s, ints, lp);
      if (r.optimal()) {
        CHECK(r.objective >= *best - 1e-9);
        CHECK(audit_solution(m, r.x).ok(1e-7));
      }
    }
  }
}

TEST_CASE("p-median relaxation against exhaustive open sets") {
  auto g = gen::gen_p_median(100, 10, 3, 7);
  auto m = inst::instantiate_efficient(g.model, g.data);
  auto s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(audit_solution(m, s.x).ok(1e-7));

  const auto& d = g.data.parameters.at("d");
  double best = kInf;
  for (int a = 1; a <= 10; ++a) {
    for (int b = a + 1; b <= 10; ++b) {
      for (int c = b + 1; c <= 10; ++c) {
        double total = 0;
        for (Index i = 1; i <= 100; ++i) {
          double near = kInf;
          for (Index j : {a, b, c}) near = std::min(near, *d.find(std::vector<Index>{i, j}));
          total += near;
        }
        best = std::min(best, total);
      }
    }
  }
  CHECK(s.objective <= best + 1e-6);
  std::vector<std::size_t> ints;
  for (std::size_t c = 0; c < m.num_cols(); ++c) {
    if (m.is_integer(c)) ints.push_back(c);
  }
  auto r = round_and_fix(m, s, ints, ReferenceSimplex());
  if (r.optimal()) CHECK(r.objective >= best - 1e-6);
  MESSAGE("p-median LP " << s.objective << ", exhaustive " << best);
}

TEST_CASE("solution files and the external adapter") {
  auto m = worked_flow();
  auto s = solve_lp(m);
  std::stringstream buf;
  write_solution(m, s, buf);
  auto back = read_solution(m, buf);
  CHECK(back.status == Status::Optimal);
  CHECK(back.x == s.x);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "meadow_stub_solver";
  fs::create_directories(dir);
  fs::path canned = dir / "canned.sol";
  {
    std::ofstream f(canned);
    write_solution(m, s, f);
  }
  fs::path script = dir / "stub.sh";
  {
    std::ofstream f(script);
    f << "#!/bin/sh\ngrep -q 'Subject To' \"$1\" || exit 1\ncp '" << canned.string()
      << "' \"$2\"\n";
  }
  fs::permissions(script, fs::perms::owner_all);
  auto ext = make_solver("exec:" + script.string());
  auto e = ext->solve(m, {});
  CHECK(e.status == Status::Optimal);
  CHECK(e.x == s.x);
  CHECK(e.objective == doctest::Approx(2.0));

  auto missing = make_solver("exec:/nonexistent/solver");
  CHECK(missing->solve(m, {}).status == Status::NumericalTrouble);
  CHECK_THROWS_AS(make_solver("gurobi"), std::invalid_argument);
  CHECK(make_solver("reference")->name() == "reference");
  fs::remove_all(dir);
}
