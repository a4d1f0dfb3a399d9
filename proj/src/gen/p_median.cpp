#include "meadow/gen/generators.hpp"

namespace meadow::gen {

using namespace meadow::ir;

GeneratedModel gen_p_median(std::size_t customers, std::size_t candidates, std::size_t facilities,
                            std::uint64_t seed) {
  if (facilities > candidates) throw GenerationError("more facilities than candidates");
  GeneratedModel g;
  SymbolicModel& m = g.model;
  m.variables = {{"y", 2, true, {"I", "J"}}, {"open", 1, true, {"J"}}};
  m.constants = {{"A", DataKind::IndexSet, 2},
                 {"J", DataKind::IndexSet, 1},
                 {"d", DataKind::ParameterArray, 2},
                 {"p", DataKind::Scalar, 0}};
  m.index_placeholders = {{"i", PlaceholderKind::Global, "I"},
                          {"j", PlaceholderKind::Global, "J"},
                          {"a", PlaceholderKind::Local, "I"},
                          {"b", PlaceholderKind::Local, "J"}};

  ExpressionBuilder obj("distance", {});
  auto t = obj.term("y", {"a", "b"}, Coefficient{1.0, "d", {"a", "b"}});
  m.expressions.push_back(std::move(obj).finish(obj.sum({"a", "b"}, "A", t), ObjectiveSense::Min));

  ExpressionBuilder assign("assigned", {"i"});
  m.expressions.push_back(
      std::move(assign).finish(assign.sum({"i", "b"}, "A", assign.term("y", {"i", "b"}))));

  // The open[j] sum binds only j; instantiation expands it over space(i).
  ExpressionBuilder link("link", {"i", "j"});
  auto y = link.sum({"i", "j"}, "A", link.term("y", {"i", "j"}));
  auto open = link.sum({"j"}, "J", link.term("open", {"j"}));
  m.expressions.push_back(std::move(link).finish(link.sub(y, open)));

  ExpressionBuilder card("opened", {});
  m.expressions.push_back(
      std::move(card).finish(card.sum({"b"}, "J", card.term("open", {"b"}))));

  m.constraints = {{"assign", "assigned", Sign::Eq, Rhs{1.0, std::nullopt}},
                   {"link", "link", Sign::Le, Rhs{0.0, std::nullopt}},
                   {"cardinality", "opened", Sign::Eq, Rhs{0.0, "p"}}};
  m.bounds = {{"y", std::nullopt, BoundValue{1.0, std::nullopt}},
              {"open", std::nullopt, BoundValue{1.0, std::nullopt}}};

  SplitMix64 rng(seed);
  std::vector<Index> I(customers), J(candidates);
  for (std::size_t k = 0; k < customers; ++k) I[k] = static_cast<Index>(k + 1);
  for (std::size_t k = 0; k < candidates; ++k) J[k] = static_cast<Index>(k + 1);
  IndexSet A(2), Jset(1);
  ParameterArray d(2);
  A.reserve(customers * candidates);
  for (Index i : I) {
    for (Index j : J) {
      Index key[2] = {i, j};
      A.push_back(key);
      d.set(key, static_cast<double>(rng.between(1, 100)));
    }
  }
  for (Index j : J) {
    Index key[1] = {j};
    Jset.push_back(key);
  }
  g.data.index_spaces["I"] = I;
  g.data.index_spaces["J"] = J;
  g.data.index_sets["A"] = std::move(A);
  g.data.index_sets["J"] = std::move(Jset);
  g.data.parameters["d"] = std::move(d);
  g.data.scalars["p"] = static_cast<double>(facilities);
  return g;
}

}  // namespace meadow::gen
