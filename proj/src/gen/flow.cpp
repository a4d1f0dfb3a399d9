#include <unordered_set>

#include "meadow/gen/generators.hpp"

namespace meadow::gen {

using namespace meadow::ir;

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::int64_t SplitMix64::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double SplitMix64::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

SymbolicModel min_cost_flow_model() {
  SymbolicModel m;
  m.variables.push_back({"x", 2, false, {"V", "V"}});
  m.constants = {{"E", DataKind::IndexSet, 2},
                 {"s", DataKind::ParameterArray, 1},
                 {"c", DataKind::ParameterArray, 2}};
  m.index_placeholders = {{"i", PlaceholderKind::Global, "V"},
                          {"j", PlaceholderKind::Local, "V"},
                          {"p", PlaceholderKind::Local, "V"},
                          {"q", PlaceholderKind::Local, "V"}};

  ExpressionBuilder cost("cost", {});
  auto t = cost.term("x", {"p", "q"}, Coefficient{1.0, "c", {"p", "q"}});
  m.expressions.push_back(std::move(cost).finish(cost.sum({"p", "q"}, "E", t), ObjectiveSense::Min));

  ExpressionBuilder bal("balance", {"i"});
  auto out = bal.sum({"i", "j"}, "E", bal.term("x", {"i", "j"}));
  auto in = bal.sum({"j", "i"}, "E", bal.term("x", {"j", "i"}));
  m.expressions.push_back(std::move(bal).finish(bal.sub(out, in)));

  m.constraints.push_back({"flow", "balance", Sign::Eq, Rhs{0.0, "s"}});
  return m;
}

namespace {

GeneratedModel flow_instance(std::size_t n, const std::vector<std::pair<Index, Index>>& edges,
                             const std::vector<double>& costs, Index supply, Index demand) {
  GeneratedModel g{min_cost_flow_model(), {}};
  std::vector<Index> V(n);
  for (std::size_t k = 0; k < n; ++k) V[k] = static_cast<Index>(k + 1);
  g.data.index_spaces["V"] = V;
  IndexSet E(2);
  E.reserve(edges.size());
  ParameterArray c(2);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    Index t[2] = {edges[k].first, edges[k].second};
    E.push_back(t);
    c.set(t, costs[k]);
  }
  ParameterArray s(1);
  for (Index v : V) {
    Index key[1] = {v};
    s.set(key, v == supply ? 1.0 : v == demand ? -1.0 : 0.0);
  }
  g.data.index_sets["E"] = std::move(E);
  g.data.parameters["c"] = std::move(c);
  g.data.parameters["s"] = std::move(s);
  return g;
}

}  // namespace

GeneratedModel worked_min_cost_flow() {
  return flow_instance(4, {{1, 2}, {2, 4}, {1, 3}, {3, 4}}, {1, 1, 1, 1}, 1, 4);
}

GeneratedModel gen_min_cost_flow(std::size_t nodes, std::size_t edges, std::uint64_t seed,
                                 bool unit_costs) {
  if (nodes < 2) throw GenerationError("need at least 2 nodes");
  if (edges + 1 < nodes) throw GenerationError("need at least nodes-1 edges to connect the graph");
  if (edges > nodes * (nodes - 1)) throw GenerationError("more edges than a simple digraph holds");
  SplitMix64 rng(seed);
  std::vector<std::pair<Index, Index>> arcs;
  arcs.reserve(edges);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges * 2);
  auto code = [&](Index u, Index v) {
    return static_cast<std::uint64_t>(u) * (nodes + 1) + static_cast<std::uint64_t>(v);
  };
  for (std::size_t v = 2; v <= nodes; ++v) {
    Index parent = static_cast<Index>(1 + rng.below(v - 1));
    arcs.emplace_back(parent, static_cast<Index>(v));
    seen.insert(code(parent, static_cast<Index>(v)));
  }
  while (arcs.size() < edges) {
    Index u = static_cast<Index>(1 + rng.below(nodes));
    Index v = static_cast<Index>(1 + rng.below(nodes));
    if (u == v || !seen.insert(code(u, v)).second) continue;
    arcs.emplace_back(u, v);
  }
  for (std::size_t k = arcs.size(); k > 1; --k) std::swap(arcs[k - 1], arcs[rng.below(k)]);
  std::vector<double> costs(arcs.size(), 1.0);
  if (!unit_costs) {
    for (auto& c : costs) c = static_cast<double>(rng.between(1, 100));
  }
  Index demand = static_cast<Index>(2 + rng.below(nodes - 1));
  return flow_instance(nodes, arcs, costs, 1, demand);
}

}  // namespace meadow::gen
