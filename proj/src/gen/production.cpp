#include <algorithm>

#include "meadow/gen/generators.hpp"

namespace meadow::gen {

using namespace meadow::ir;

SymbolicModel production_planning_model() {
  SymbolicModel m;
  m.variables = {{"inv", 3, false, {"T", "P", "I"}},     {"m", 3, false, {"T", "P", "I"}},
                 {"x", 3, false, {"T", "P", "I"}},       {"pur", 3, false, {"T", "P", "I"}},
                 {"z", 3, false, {"T", "P", "I"}},       {"s", 4, false, {"T", "P", "P", "I"}},
                 {"r", 4, false, {"T", "P", "I", "I"}},  {"rp", 5, false, {"T", "P", "I", "I", "I"}}};
  auto set = [](const char* n, std::size_t a) { return DataPlaceholder{n, DataKind::IndexSet, a}; };
  auto par = [](const char* n, std::size_t a) {
    return DataPlaceholder{n, DataKind::ParameterArray, a};
  };
  m.constants = {set("ITEMS", 3), set("PREV", 4),  set("MAKE", 3),  set("BUY", 3),
                 set("DEM", 3),   set("LANE", 4),  set("BOM", 4),   set("ALT", 5),
                 set("REPL", 4),  par("R", 3),     par("D", 3),     par("B", 4),
                 par("cap", 3),   par("Cm", 3),    par("Cx", 3),    par("Cpur", 3),
                 par("Cs", 4),    par("Crp", 5),   par("Cr", 4)};
  m.index_placeholders = {
      {"t", PlaceholderKind::Global, "T"},  {"p", PlaceholderKind::Global, "P"},
      {"i", PlaceholderKind::Global, "I"},  {"j", PlaceholderKind::Global, "I"},
      {"tq", PlaceholderKind::Local, "T"},  {"pq", PlaceholderKind::Local, "P"},
      {"iq", PlaceholderKind::Local, "I"},  {"jq", PlaceholderKind::Local, "I"},
      {"lt", PlaceholderKind::Local, "T"},  {"lp", PlaceholderKind::Local, "P"},
      {"lq", PlaceholderKind::Local, "P"},  {"li", PlaceholderKind::Local, "I"},
      {"lk", PlaceholderKind::Local, "I"},  {"lj", PlaceholderKind::Local, "I"}};

  ExpressionBuilder obj("cost", {});
  auto priced = [&obj](const char* var, const char* cost, const char* over,
                       std::vector<std::string> idx) {
    return obj.sum(idx, over, obj.term(var, idx, Coefficient{1.0, cost, idx}));
  };
  auto cost = obj.add_all({priced("m", "Cm", "DEM", {"lt", "lp", "li"}),
                           priced("x", "Cx", "MAKE", {"lt", "lp", "li"}),
                           priced("pur", "Cpur", "BUY", {"lt", "lp", "li"}),
                           priced("s", "Cs", "LANE", {"lt", "lp", "lq", "li"}),
                           priced("rp", "Crp", "ALT", {"lt", "lp", "li", "lk", "lj"}),
                           priced("r", "Cr", "REPL", {"lt", "lp", "li", "lj"})});
  m.expressions.push_back(std::move(obj).finish(cost, ObjectiveSense::Min));

  ExpressionBuilder inv("inventory", {"t", "p", "i"});
  auto over = [&inv](std::vector<std::string> b, const char* s, const char* var,
                     std::vector<std::string> idx, Coefficient c = {}) {
    return inv.sum(std::move(b), s, inv.term(var, std::move(idx), std::move(c)));
  };
  auto out = inv.add_all({
      over({"t", "p", "i"}, "ITEMS", "inv", {"t", "p", "i"}),
      over({"t", "p", "i", "jq"}, "BOM", "x", {"t", "p", "jq"},
           Coefficient{1.0, "B", {"t", "p", "i", "jq"}}),
      over({"t", "p", "pq", "i"}, "LANE", "s", {"t", "p", "pq", "i"}),
      over({"t", "p", "iq", "i", "jq"}, "ALT", "rp", {"t", "p", "iq", "i", "jq"}),
      over({"t", "p", "i", "jq"}, "REPL", "r", {"t", "p", "i", "jq"}),
      over({"t", "p", "i"}, "DEM", "z", {"t", "p", "i"}),
  });
  auto in = inv.add_all({
      over({"t", "p", "i", "tq"}, "PREV", "inv", {"tq", "p", "i"}),
      over({"t", "p", "i"}, "MAKE", "x", {"t", "p", "i"}),
      over({"t", "p", "i"}, "BUY", "pur", {"t", "p", "i"}),
      over({"t", "pq", "p", "i"}, "LANE", "s", {"t", "pq", "p", "i"}),
      over({"t", "p", "i", "iq", "jq"}, "ALT", "rp", {"t", "p", "i", "iq", "jq"}),
      over({"t", "p", "jq", "i"}, "REPL", "r", {"t", "p", "jq", "i"}),
  });
  m.expressions.push_back(std::move(inv).finish(inv.sub(out, in)));

  ExpressionBuilder delay("delay", {"t", "p", "i"});
  auto now = delay.sum({"t", "p", "i"}, "DEM",
                       delay.add(delay.term("m", {"t", "p", "i"}), delay.term("z", {"t", "p", "i"})));
  auto before = delay.sum({"t", "p", "i", "tq"}, "PREV",
                          delay.sum({"tq", "p", "i"}, "DEM", delay.term("m", {"tq", "p", "i"})));
  m.expressions.push_back(std::move(delay).finish(delay.sub(now, before)));

  ExpressionBuilder rp("replacement", {"t", "p", "i", "j"});
  auto used = rp.sum({"t", "p", "i", "iq", "j"}, "ALT", rp.term("rp", {"t", "p", "i", "iq", "j"}));
  auto need = rp.sum({"t", "p", "i", "j"}, "BOM",
                     rp.term("x", {"t", "p", "j"}, Coefficient{1.0, "B", {"t", "p", "i", "j"}}));
  m.expressions.push_back(std::move(rp).finish(rp.sub(used, need)));

  m.constraints = {{"inventory", "inventory", Sign::Eq, Rhs{0.0, "R"}},
                   {"delay", "delay", Sign::Eq, Rhs{0.0, "D"}},
                   {"replacement", "replacement", Sign::Le, Rhs{0.0, std::nullopt}}};
  m.bounds = {{"x", std::nullopt, BoundValue{kInf, "cap"}}};
  return m;
}

decomp::PeriodMetadata production_planning_metadata() {
  using decomp::AggregationPolicy;
  decomp::PeriodMetadata meta;
  meta.period_space = "T";
  for (const char* v : {"inv", "m", "x", "pur", "z", "s", "r", "rp"}) meta.variable_period[v] = 0;
  for (const char* s : {"ITEMS", "MAKE", "BUY", "DEM", "LANE", "BOM", "ALT", "REPL"}) {
    meta.set_periods[s] = {0};
  }
  meta.set_periods["PREV"] = {0, 3};
  meta.set_policy["PREV"] = decomp::SetPolicy::Link;
  // Quantities add up over a period group; rates and prices keep the group's
  // first value. Delay is charged per period, so its price adds up too.
  for (const char* p : {"R", "D", "cap", "Cm"}) {
    meta.parameter_period[p] = 0;
    meta.aggregation_policy[p] = AggregationPolicy::Sum;
  }
  for (const char* p : {"B", "Cx", "Cpur", "Cs", "Crp", "Cr"}) {
    meta.parameter_period[p] = 0;
    meta.aggregation_policy[p] = AggregationPolicy::First;
  }
  meta.state_variables = {"inv", "m"};
  return meta;
}

SequentialInstance gen_production_planning(int T, std::size_t plants, std::size_t items,
                                           std::uint64_t seed, const ProductionOptions& opts) {
  if (T < 2) throw GenerationError("production planning needs T >= 2");
  if (plants < 1) throw GenerationError("production planning needs at least one plant");
  if (items < 2) throw GenerationError("production planning needs at least two items");
  SequentialInstance g{production_planning_model(), {}, production_planning_metadata()};
  SplitMix64 rng(seed);

  const std::size_t ends = std::max<std::size_t>(1, items / 4);
  const std::size_t subs = items >= 3 ? std::max<std::size_t>(1, items / 3) : 0;
  const std::size_t raws = items - ends - subs;
  auto raw = [&](std::size_t k) { return static_cast<Index>(k + 1); };
  auto sub = [&](std::size_t k) { return static_cast<Index>(raws + k + 1); };
  auto end = [&](std::size_t k) { return static_cast<Index>(raws + subs + k + 1); };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.below(n)); };

  // Time-invariant structure first: (component, parent, rate).
  struct Edge {
    Index i, j;
    double b;
  };
  std::vector<Edge> bom;
  auto add_edge = [&](Index i, Index j, double b) {
    for (const auto& e : bom) {
      if (e.i == i && e.j == j) return;
    }
    bom.push_back({i, j, b});
  };
  for (std::size_t k = 0; k < subs; ++k) {
    std::size_t n = 1 + pick(std::min<std::size_t>(2, raws));
    for (std::size_t c = 0; c < n; ++c) add_edge(raw(pick(raws)), sub(k), double(rng.between(1, 2)));
  }
  for (std::size_t k = 0; k < ends; ++k) {
    if (subs > 0) {
      std::size_t n = 1 + pick(std::min<std::size_t>(2, subs));
      for (std::size_t c = 0; c < n; ++c) add_edge(sub(pick(subs)), end(k), double(rng.between(1, 3)));
      if (rng.below(2) == 0) add_edge(raw(pick(raws)), end(k), 1.0);
    } else {
      add_edge(raw(pick(raws)), end(k), double(rng.between(1, 2)));
    }
  }
  // rp alternates: another raw standing in for a raw component.
  struct Alt {
    Index i, alt, j;
  };
  std::vector<Alt> alts;
  for (const auto& e : bom) {
    if (e.i > static_cast<Index>(raws) || raws < 2 || rng.below(2) != 0) continue;
    Index a = raw(pick(raws));
    if (a != e.i) alts.push_back({e.i, a, e.j});
  }
  std::vector<std::pair<Index, Index>> repl;
  for (std::size_t a = 0; a < subs; ++a) {
    for (std::size_t b = 0; b < subs; ++b) {
      if (a != b && rng.below(10) < 3) repl.emplace_back(sub(a), sub(b));
    }
  }
  std::vector<std::vector<char>> makes(plants, std::vector<char>(items + 1, 0));
  std::vector<double> base_cap(items + 1, 0.0);
  for (Index i = static_cast<Index>(raws) + 1; i <= static_cast<Index>(items); ++i) {
    base_cap[i] = double(rng.between(4, 10));
    bool any = false;
    for (std::size_t p = 0; p < plants; ++p) {
      makes[p][i] = rng.below(5) != 0;
      any = any || makes[p][i];
    }
    if (!any) makes[pick(plants)][i] = 1;
  }
  std::vector<double> base_demand(items + 1, 0.0);
  for (std::size_t k = 0; k < ends; ++k) base_demand[end(k)] = double(rng.between(2, 6));

  DataBundle& d = g.data;
  std::vector<Index> Ts, Ps, Is;
  for (int t = 1; t <= T; ++t) Ts.push_back(t);
  for (std::size_t p = 1; p <= plants; ++p) Ps.push_back(static_cast<Index>(p));
  for (std::size_t i = 1; i <= items; ++i) Is.push_back(static_cast<Index>(i));
  d.index_spaces = {{"T", Ts}, {"P", Ps}, {"I", Is}};
  IndexSet ITEMS(3), PREV(4), MAKE(3), BUY(3), DEM(3), LANE(4), BOM(4), ALT(5), REPL(4);
  ParameterArray R(3), D(3), B(4), cap(3), Cm(3), Cx(3), Cpur(3), Cs(4), Crp(5), Cr(4);

  for (Index t : Ts) {
    for (Index p : Ps) {
      for (Index i : Is) {
        std::vector<Index> k3 = {t, p, i};
        ITEMS.push_back(k3);
        double receipts = 0;
        if (t == 1) receipts += double(rng.between(0, 6));
        if (i <= static_cast<Index>(raws) && rng.below(4) == 0) receipts += double(rng.between(1, 8));
        R.set(k3, receipts);
        if (t > 1) PREV.push_back(std::vector<Index>{t, p, i, t - 1});
        if (i <= static_cast<Index>(raws)) {
          BUY.push_back(k3);
          Cpur.set(k3, double(rng.between(2, 6)));
        } else if (makes[static_cast<std::size_t>(p - 1)][i]) {
          MAKE.push_back(k3);
          cap.set(k3, base_cap[i] + double(rng.between(-2, 2)));
          Cx.set(k3, double(rng.between(1, 5)));
        }
        if (base_demand[i] > 0) {
          DEM.push_back(k3);
          double dem = base_demand[i] + double(rng.between(-2, 2));
          if (rng.below(5) == 0) dem *= 3;
          D.set(k3, std::max(0.0, dem) * opts.demand_scale);
          Cm.set(k3, double(rng.between(40, 80)));
        }
        for (Index q : Ps) {
          if (q == p) continue;
          std::vector<Index> k4 = {t, p, q, i};
          LANE.push_back(k4);
          Cs.set(k4, double(rng.between(1, 4)));
        }
      }
      const auto& made = makes[static_cast<std::size_t>(p - 1)];
      for (const auto& e : bom) {
        if (!made[e.j]) continue;
        std::vector<Index> k4 = {t, p, e.i, e.j};
        BOM.push_back(k4);
        B.set(k4, e.b);
      }
      for (const auto& a : alts) {
        if (!made[a.j]) continue;
        std::vector<Index> k5 = {t, p, a.i, a.alt, a.j};
        ALT.push_back(k5);
        Crp.set(k5, double(rng.between(1, 4)));
      }
      for (const auto& [a, b] : repl) {
        std::vector<Index> k4 = {t, p, a, b};
        REPL.push_back(k4);
        Cr.set(k4, double(rng.between(2, 6)));
      }
    }
  }
  d.index_sets = {{"ITEMS", ITEMS}, {"PREV", PREV}, {"MAKE", MAKE}, {"BUY", BUY},
                  {"DEM", DEM},     {"LANE", LANE}, {"BOM", BOM},   {"ALT", ALT},
                  {"REPL", REPL}};
  d.parameters = {{"R", R},   {"D", D},   {"B", B},     {"cap", cap}, {"Cm", Cm},
                  {"Cx", Cx}, {"Cpur", Cpur}, {"Cs", Cs}, {"Crp", Crp}, {"Cr", Cr}};
  return g;
}

}  // namespace meadow::gen
