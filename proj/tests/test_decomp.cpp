#include <doctest.h>

#include <cmath>

#include "meadow/decomp/horizon.hpp"
#include "meadow/gen/generators.hpp"
#include "meadow/inst/instantiate.hpp"
#include "meadow/ir/validate.hpp"
#include "meadow/solve/audit.hpp"
#include "support/chain.hpp"

using namespace meadow;
using namespace meadow::decomp;
using meadow::testing::chain;

namespace {

SequentialModel production(int T, std::size_t plants, std::size_t items, std::uint64_t seed,
                           gen::ProductionOptions opts = {}) {
  auto g = gen::gen_production_planning(T, plants, items, seed, opts);
  return make_sequential(g.model, g.data, g.meta);
}

double whole_optimum(const SequentialModel& seq) {
  auto s = solve::solve_lp(seq.base);
  REQUIRE(s.optimal());
  return s.objective;
}

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

SequentialModel chain_model(const std::vector<double>& d, const std::vector<double>& cap,
                            const std::vector<double>& c) {
  auto g = chain(d, cap, c);
  return make_sequential(g.model, g.data, g.meta);
}

}  // namespace

TEST_CASE("aggregation policies") {
  auto g = chain({3, 4, 5}, {1, 2, 3}, {7, 8, 9});
  g.data.parameters["c"].set({2}, 8);
  auto agg = aggregate_data(g.data, g.meta, 3, {{1, 2}, {3, 3}});
  CHECK(*agg.parameters["d"].find(std::vector<Index>{1}) == -7);
  CHECK(*agg.parameters["d"].find(std::vector<Index>{2}) == -5);
  CHECK(*agg.parameters["cap"].find(std::vector<Index>{1}) == 3);
  CHECK(*agg.parameters["c"].find(std::vector<Index>{1}) == 7);
  CHECK(agg.index_spaces["T"] == std::vector<Index>{1, 2});
  CHECK(agg.index_sets["TS"] == IndexSet(1, {{1}, {2}}));
  // (2,1) collapses inside the first group; (3,2) becomes (2,1).
  CHECK(agg.index_sets["PREV"] == IndexSet(2, {{2, 1}}));

  g.meta.aggregation_policy["c"] = AggregationPolicy::Last;
  agg = aggregate_data(g.data, g.meta, 3, {{1, 2}, {3, 3}});
  CHECK(*agg.parameters["c"].find(std::vector<Index>{1}) == 8);

  g.meta.set_policy.clear();
  agg = aggregate_data(g.data, g.meta, 3, {{1, 3}});
  CHECK(agg.index_sets["PREV"] == IndexSet(2, {{1, 1}}));
}

TEST_CASE("singleton groups leave the data alone") {
  auto g = gen::gen_production_planning(5, 2, 6, 3);
  PeriodGroups singles;
  for (int t = 1; t <= 5; ++t) singles.emplace_back(t, t);
  CHECK(aggregate_data(g.data, g.meta, 5, singles) == g.data);
  auto seq = make_sequential(g.model, g.data, g.meta);
  seq.base.set_integer(0, true);
  auto same = aggregate_periods(seq, singles);
  CHECK_FALSE(same.base.is_integer(0));
  same.base.set_integer(0, true);
  CHECK(equivalent(same.base, seq.base));
}

TEST_CASE("aggregation errors") {
  auto g = chain({1, 2}, {5, 5}, {1, 1});
  g.meta.aggregation_policy.erase("cap");
  CHECK_THROWS_AS(aggregate_data(g.data, g.meta, 2, {{1, 2}}), MissingAggregationPolicy);
  g = chain({1, 2}, {5, 5}, {1, 1});
  CHECK_THROWS_AS(aggregate_data(g.data, g.meta, 2, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_data(g.data, g.meta, 2, {{1, 1}, {3, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_data(g.data, g.meta, 2, {{2, 2}, {1, 1}}), std::invalid_argument);
  g.data.index_spaces["T"] = {1, 3};
  CHECK_THROWS_AS(make_sequential(g.model, g.data, g.meta), DataError);
}

TEST_CASE("metadata json round trip") {
  auto meta = gen::production_planning_metadata();
  auto doc = emit_metadata(meta);
  CHECK(parse_metadata(nlohmann::json::parse(doc.dump())) == meta);
  CHECK_THROWS_AS(parse_metadata(nlohmann::json::parse(R"({"parameters":{"D":{"period":-1}}})")),
                  DataError);
  CHECK_THROWS_AS(
      parse_metadata(nlohmann::json::parse(R"({"sets":{"A":{"periods":[0],"policy":"x"}}})")),
      DataError);
  auto partial = parse_metadata(nlohmann::json::parse(R"({"parameters":{"D":{"period":0}}})"));
  CHECK(partial.parameter_period.at("D") == 0);
  CHECK(partial.aggregation_policy.empty());
}

TEST_CASE("sequential structure of generated models") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto seq = production(8, 2, 7, seed);
    CHECK(seq.T == 8);
    for (std::size_t r = 0; r < seq.base.num_rows(); ++r) {
      for (std::size_t c : seq.base.row_cols(r)) CHECK(seq.var_period[c] <= seq.row_period[r]);
    }
    for (std::size_t c = 0; c < seq.base.num_cols(); ++c) {
      CHECK(seq.var_period[c] == seq.base.col_index(c)[0]);
      const auto& key = seq.groups[seq.var_group[c]];
      CHECK(key.family == seq.base.family_name(c));
      CHECK(key.rest.size() + 1 == seq.base.col_index(c).size());
      CHECK(seq.is_state(c) == (key.family == "inv" || key.family == "m"));
      CHECK(seq.find_column(key.family, seq.base.col_index(c)) == c);
    }
  }
}

TEST_CASE("production generator") {
  SUBCASE("valid, both algorithms agree, deterministic") {
    auto a = gen::gen_production_planning(6, 2, 8, 11);
    auto b = gen::gen_production_planning(6, 2, 8, 11);
    CHECK(ir::validate(a.model).ok());
    CHECK(a.data == b.data);
    auto eff = inst::instantiate_efficient(a.model, a.data);
    auto exh = inst::instantiate_exhaustive(a.model, a.data);
    CHECK_MESSAGE(equivalent(eff, exh), first_difference(eff, exh));
  }
  SUBCASE("zero demand costs nothing") {
    auto seq = production(2, 1, 2, 4, {0.0});
    auto s = solve::solve_lp(seq.base);
    REQUIRE(s.optimal());
    CHECK(s.objective == 0);
  }
  SUBCASE("delay absorbs what capacity cannot make") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto seq = production(4, 1 + seed % 3, 2 + seed % 7, seed, {5.0});
      auto s = solve::solve_lp(seq.base);
      REQUIRE(s.optimal());
      CHECK(solve::audit_solution(seq.base, s.x).ok(1e-7));
    }
    auto seq = production(4, 1, 5, 2, {50.0});
    auto s = solve::solve_lp(seq.base);
    double delay = 0;
    for (std::size_t c = 0; c < seq.base.num_cols(); ++c) {
      if (seq.base.family_name(c) == "m") delay += s.x[c];
    }
    CHECK(delay > 0);
  }
  CHECK_THROWS_AS(gen::gen_production_planning(1, 1, 3, 1), gen::GenerationError);
  CHECK_THROWS_AS(gen::gen_production_planning(3, 0, 3, 1), gen::GenerationError);
  CHECK_THROWS_AS(gen::gen_production_planning(3, 1, 1, 1), gen::GenerationError);
}

TEST_CASE("plans") {
  auto p = even_plan(16, 4);
  CHECK(p.boundaries == std::vector<int>{1, 5, 9, 13, 17});
  CHECK(even_plan(7, 3).boundaries == std::vector<int>{1, 3, 5, 8});
  CHECK_NOTHROW(check_plan(p, 16));
  CHECK_THROWS_AS(check_plan(p, 15), std::invalid_argument);
  auto bad = p;
  bad.boundaries[2] = 5;
  CHECK_THROWS_AS(check_plan(bad, 16), std::invalid_argument);
  bad = p;
  bad.lambdas = {1, 2};
  CHECK_THROWS_AS(check_plan(bad, 16), std::invalid_argument);
  bad.lambdas = {-1};
  CHECK_THROWS_AS(check_plan(bad, 16), std::invalid_argument);
  bad = p;
  bad.M = 0;
  CHECK_THROWS_AS(check_plan(bad, 16), std::invalid_argument);
  CHECK_THROWS_AS(even_plan(3, 4), std::invalid_argument);
  CHECK(parse_method("gfrh") == Method::GFRH);
  CHECK_THROWS_AS(parse_method("benders"), std::invalid_argument);
}

TEST_CASE("single horizon equals the whole solve for every method") {
  auto seq = production(8, 2, 6, 9);
  double opt = whole_optimum(seq);
  for (Method m : {Method::RH, Method::FRH, Method::GRH, Method::GFRH}) {
    auto r = decompose(m, seq, even_plan(8, 1));
    CHECK(r.solution.optimal());
    CHECK(close(r.solution.objective, opt));
  }
}

TEST_CASE("one period per horizon on a short chain") {
  // Production gets dearer over time; holding costs 1 per unit and period.
  // Whole: make 3 up front, hold 2 then 1: 3 + 3 = 6. Myopic RH: 1 + 5 + 5.
  auto seq = chain_model({1, 1, 1}, {3, 3, 3}, {1, 5, 5});
  CHECK(whole_optimum(seq) == doctest::Approx(6));
  auto rh = rolling_horizon(seq, even_plan(3, 3));
  CHECK(rh.solution.optimal());
  CHECK(rh.solution.objective == doctest::Approx(11));
  // One aggregated tail period (demand 2, price 5) is enough to pre-build.
  auto frh = forward_rolling_horizon(seq, even_plan(3, 3));
  CHECK(frh.solution.objective == doctest::Approx(6));
}

TEST_CASE("infeasibility reports the horizon") {
  // Period 3 needs 6 with capacity 2; the myopic plan builds nothing ahead.
  auto seq = chain_model({1, 1, 6, 1}, {4, 4, 2, 4}, {1, 1, 1, 1});
  CHECK(whole_optimum(seq) == doctest::Approx(9 + 1 + 4));
  try {
    rolling_horizon(seq, even_plan(4, 4));
    FAIL("expected DecompositionInfeasible");
  } catch (const DecompositionInfeasible& e) {
    CHECK(e.horizon() == 3);
    CHECK(e.status() == solve::Status::Infeasible);
  }
  // A tail as long as the rest of the horizon is no aggregation at all.
  auto plan = even_plan(4, 4);
  plan.M = 3;
  auto frh = forward_rolling_horizon(seq, plan);
  CHECK(frh.solution.objective == doctest::Approx(whole_optimum(seq)));

  auto hopeless = chain_model({1, 9, 1, 1}, {2, 2, 2, 2}, {1, 1, 1, 1});
  CHECK_THROWS_AS(guided_rolling_horizon(hopeless, even_plan(4, 2)), MasterInfeasible);
}

TEST_CASE("forward tails: M periods on every sub-model but the last") {
  auto seq = production(12, 2, 6, 5);
  auto plan = even_plan(12, 4);
  plan.M = 2;
  auto r = forward_rolling_horizon(seq, plan);
  REQUIRE(r.manifest.stages.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& st = r.manifest.stages[k];
    CHECK(st.stage == "horizon");
    CHECK(st.accept_until == plan.boundaries[k + 1] - 1);
    CHECK(st.last_period == (k < 3 ? st.accept_until + 2 : 12));
  }
  CHECK(r.solution.optimal());
}

TEST_CASE("decomposition suite properties") {
  int strict = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto seq = production(16, 2, 6, seed);
    double opt = whole_optimum(seq);
    auto plan = even_plan(16, 4);
    for (Method m : {Method::RH, Method::FRH, Method::GRH, Method::GFRH}) {
      auto r = decompose(m, seq, plan);
      CHECK_MESSAGE(r.solution.optimal(), to_string(m) << " seed " << seed);
      CHECK(solve::audit_solution(seq.base, r.solution.x).ok(1e-7));
      CHECK(r.solution.objective >= opt - 1e-6 * std::abs(opt));
      CHECK_FALSE(r.partial);
      auto ft = fine_tune(seq, r.solution, 8);
      CHECK(ft.objective <= r.solution.objective);
      CHECK(solve::audit_solution(seq.base, ft.x).ok(1e-7));
      if (ft.objective < r.solution.objective - 1e-6) ++strict;
    }
    auto zero = plan;
    zero.lambdas = {0.0};
    CHECK(guided_rolling_horizon(seq, zero).solution.objective ==
          rolling_horizon(seq, plan).solution.objective);
  }
  CHECK(strict > 0);
}

TEST_CASE("strong guidance with one period per horizon follows the master") {
  // With h = T the master is the model itself; a heavy penalty pins every
  // column to its master value, so the result is optimal.
  auto seq = production(4, 1, 5, 13);
  auto plan = even_plan(4, 4);
  plan.lambdas = {1e4};
  auto r = guided_rolling_horizon(seq, plan);
  CHECK(r.solution.objective == doctest::Approx(whole_optimum(seq)).epsilon(1e-9));
  CHECK(r.manifest.stages.front().stage == "master");
  CHECK(r.manifest.stages.front().objective == doctest::Approx(r.solution.objective));
}

TEST_CASE("fine tuning extremes") {
  auto seq = production(8, 2, 6, 21);
  double opt = whole_optimum(seq);
  auto rh = rolling_horizon(seq, even_plan(8, 4));
  auto full = fine_tune(seq, rh.solution, 8);
  CHECK(full.objective == doctest::Approx(opt));
  auto none = fine_tune(seq, rh.solution, 0);
  CHECK(none.objective == doctest::Approx(rh.solution.objective));
  solve::Solution junk;
  junk.x.assign(3, 0.0);
  CHECK(fine_tune(seq, junk, 4).x.size() == 3);
}

TEST_CASE("early stop returns a partial solution") {
  auto seq = production(16, 2, 6, 2);
  auto plan = even_plan(16, 4);
  plan.stop_after_period = 6;
  auto r = guided_frh(seq, plan);
  CHECK(r.partial);
  CHECK(r.solved_until == 8);
  CHECK(r.solution.optimal());
  CHECK(r.manifest.stages.size() == 3);
  for (std::size_t c = 0; c < seq.base.num_cols(); ++c) {
    if (seq.var_period[c] > 8) CHECK(r.solution.x[c] == 0);
  }
}

TEST_CASE("overlap and master re-solve stay feasible") {
  auto seq = production(16, 2, 6, 6);
  double opt = whole_optimum(seq);
  auto plan = even_plan(16, 4);
  plan.overlap = 2;
  auto o = rolling_horizon(seq, plan);
  CHECK(o.solution.optimal());
  CHECK(o.solution.objective >= opt - 1e-6 * opt);
  CHECK(o.manifest.stages[0].last_period == 6);
  CHECK(o.manifest.stages[3].last_period == 16);

  plan = even_plan(16, 4);
  plan.resolve_master = true;
  auto g = guided_frh(seq, plan);
  CHECK(g.solution.optimal());
  std::size_t masters = 0;
  for (const auto& st : g.manifest.stages) masters += st.stage == "master";
  CHECK(masters == 4);
}

namespace {

struct CountingSolver : solve::LpSolver {
  mutable int calls = 0;
  solve::Solution solve(const CanonicalModel& m, const solve::SolveOptions& o) const override {
    ++calls;
    return solve::ReferenceSimplex().solve(m, o);
  }
  std::string name() const override { return "counting"; }
};

}  // namespace

TEST_CASE("any solver behind the interface gives the same run") {
  auto seq = production(12, 2, 6, 8);
  CountingSolver counting;
  DecompositionOptions opts;
  opts.solver = &counting;
  auto a = guided_frh(seq, even_plan(12, 3), opts);
  auto b = guided_frh(seq, even_plan(12, 3));
  CHECK(counting.calls == 4);
  CHECK(a.solution.x == b.solution.x);
}

TEST_CASE("manifest") {
  auto seq = production(16, 2, 6, 4);
  auto r = guided_frh(seq, even_plan(16, 4));
  r.manifest.baseline = whole_optimum(seq);
  auto doc = r.manifest.to_json();
  CHECK(doc["method"] == "gfrh");
  CHECK(doc["stages"].size() == 5);
  CHECK(doc["stages"][0]["stage"] == "master");
  CHECK(doc["plan"]["boundaries"] == nlohmann::json({1, 5, 9, 13, 17}));
  CHECK(doc["gap"].get<double>() >= -1e-9);
  CHECK(doc["plan"]["lambdas"].size() == 4);
  CHECK(doc["plan"]["lambdas"][0].get<double>() == doctest::Approx(default_lambda(seq)));
}
