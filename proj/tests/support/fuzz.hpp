#pragma once

// Random (model, data) pairs for oracle comparisons. Coefficients are
// integers or halves so every aggregation is exact regardless of order.

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/core/data.hpp"
#include "meadow/gen/generators.hpp"
#include "meadow/inst/instantiate.hpp"
#include "meadow/ir/model.hpp"

namespace fuzz {

using meadow::Index;
using meadow::Sign;
using meadow::gen::SplitMix64;
using namespace meadow::ir;

struct Limits {
  std::size_t max_globals = 3;
  std::size_t max_sums = 4;
  std::size_t max_op_depth = 2;
  std::size_t max_set_size = 200;
  std::size_t max_blocks = 3;
  /// Upper bound on the product of set sizes along one root-to-leaf path.
  std::size_t path_budget = 4000;
};

struct Case {
  SymbolicModel model;
  meadow::DataBundle data;
};

inline double small_value(SplitMix64& rng) {
  double v = static_cast<double>(rng.between(-6, 6));
  if (rng.below(4) == 0) v += 0.5;
  return v;
}

class Builder {
 public:
  Builder(SplitMix64& rng, const Limits& lim) : rng_(rng), lim_(lim) {}

  Case build() {
    Case c;
    SymbolicModel& m = c.model;
    const char* globals[] = {"g1", "g2", "g3"};
    const char* locals[] = {"l1", "l2", "l3", "l4"};
    for (std::size_t k = 0; k < 3; ++k) {
      m.index_placeholders.push_back({globals[k], PlaceholderKind::Global, std::nullopt});
      c.data.index_spaces[globals[k]] = random_space();
    }
    for (std::size_t k = 0; k < 4; ++k) {
      m.index_placeholders.push_back({locals[k], PlaceholderKind::Local, std::string("L")});
    }
    c.data.index_spaces["L"] = random_space();
    m.variables = {{"x", 2, false, {}}, {"z", 1, false, {}}, {"w", 3, false, {}}};
    model_ = &m;
    data_ = &c.data;

    std::size_t blocks = 1 + rng_.below(lim_.max_blocks);
    if (rng_.below(2)) {
      add_expression("obj", {}, true);
    }
    for (std::size_t b = 0; b < blocks; ++b) {
      std::vector<std::string> G;
      std::size_t ng = rng_.below(lim_.max_globals + 1);
      std::vector<std::string> pool(globals, globals + 3);
      for (std::size_t k = 0; k < ng; ++k) {
        std::size_t pick = rng_.below(pool.size());
        G.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
      }
      std::string name = "e" + std::to_string(b);
      add_expression(name, G, false);
      Rhs rhs;
      if (!G.empty() && rng_.below(3) != 0) {
        std::string pname = "rhs" + std::to_string(b);
        m.constants.push_back({pname, DataKind::ParameterArray, G.size()});
        meadow::ParameterArray arr(G.size());
        fill_dense(arr, G, [&] { return small_value(rng_); });
        c.data.parameters[pname] = std::move(arr);
        rhs.parameter = pname;
      } else {
        rhs.value = small_value(rng_);
      }
      Sign sign = static_cast<Sign>(rng_.below(3));
      m.constraints.push_back({"k" + std::to_string(b), name, sign, rhs});
    }
    return c;
  }

 private:
  std::vector<Index> random_space() {
    std::size_t n = 2 + rng_.below(4);
    std::vector<Index> v;
    Index start = static_cast<Index>(rng_.between(-2, 3));
    for (std::size_t k = 0; k < n; ++k) v.push_back(start + static_cast<Index>(k));
    return v;
  }

  const std::vector<Index>& space_of(const std::string& ph) {
    const IndexPlaceholder* p = model_->find_placeholder(ph);
    return data_->index_spaces.at(p->space_name());
  }

  template <typename F>
  void fill_dense(meadow::ParameterArray& arr, const std::vector<std::string>& phs, F&& value) {
    std::vector<std::size_t> pos(phs.size(), 0);
    std::vector<Index> key(phs.size());
    while (true) {
      for (std::size_t k = 0; k < phs.size(); ++k) key[k] = space_of(phs[k])[pos[k]];
      arr.set(key, value());
      std::size_t k = phs.size();
      while (k > 0 && ++pos[k - 1] == space_of(phs[k - 1]).size()) pos[--k] = 0;
      if (k == 0) break;
    }
  }

  void add_expression(const std::string& name, const std::vector<std::string>& G, bool objective) {
    ExpressionBuilder b(name, G);
    sums_ = 0;
    scope_ = G;
    globals_ = G;
    NodeId root = node(b, 0, 0);
    model_->expressions.push_back(
        std::move(b).finish(root, objective ? std::optional(ObjectiveSense::Min) : std::nullopt));
  }

  NodeId node(ExpressionBuilder& b, std::size_t op_depth, std::size_t sum_depth) {
    std::uint64_t r = rng_.below(10);
    if (r < 3 && op_depth < lim_.max_op_depth) {
      NodeId l = node(b, op_depth + 1, sum_depth);
      NodeId rr = node(b, op_depth + 1, sum_depth);
      return rng_.below(2) ? b.add(l, rr) : b.sub(l, rr);
    }
    if (r < 8 && sums_ < lim_.max_sums) return sum(b, op_depth, sum_depth);
    return term(b);
  }

  NodeId sum(ExpressionBuilder& b, std::size_t op_depth, std::size_t sum_depth) {
    ++sums_;
    std::vector<std::string> candidates = {"g1", "g2", "g3", "l1", "l2", "l3", "l4"};
    // Globals outside G are not in scope.
    const auto& G = globals_;
    candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                    [&](const std::string& c) {
                                      return c[0] == 'g' &&
                                             std::find(G.begin(), G.end(), c) == G.end();
                                    }),
                     candidates.end());
    std::size_t arity = 1 + rng_.below(std::min<std::size_t>(3, candidates.size()));
    std::vector<std::string> binding;
    for (std::size_t k = 0; k < arity; ++k) {
      std::size_t pick = rng_.below(candidates.size());
      binding.push_back(candidates[pick]);
      candidates.erase(candidates.begin() + pick);
    }
    std::string set = "S" + std::to_string(set_counter_++);
    model_->constants.push_back({set, DataKind::IndexSet, arity});
    meadow::IndexSet data(arity);
    // Nested sums multiply; keep the tuple product along a path bounded.
    std::size_t cap = std::max<std::size_t>(1, std::min(lim_.max_set_size, lim_.path_budget / path_product_));
    std::size_t n = rng_.below(cap + 1);
    if (rng_.below(4) == 0) n = rng_.below(std::min<std::size_t>(8, cap + 1));
    std::vector<Index> t(arity);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t p = 0; p < arity; ++p) {
        const auto& sp = space_of(binding[p]);
        t[p] = sp[rng_.below(sp.size())];
        // Occasionally a global value outside its space.
        if (binding[p][0] == 'g' && rng_.below(20) == 0) t[p] = 100 + static_cast<Index>(p);
      }
      data.push_back(t);
    }
    data_->index_sets[set] = std::move(data);

    std::size_t mark = scope_.size();
    for (const auto& ph : binding) {
      if (std::find(scope_.begin(), scope_.end(), ph) == scope_.end()) scope_.push_back(ph);
    }
    std::size_t saved = path_product_;
    path_product_ *= std::max<std::size_t>(1, n);
    NodeId child = node(b, op_depth, sum_depth + 1);
    path_product_ = saved;
    scope_.resize(mark);
    return b.sum(binding, set, child);
  }

  NodeId term(ExpressionBuilder& b) {
    static const char* families[] = {"x", "z", "w"};
    std::size_t f = rng_.below(3);
    std::size_t rank = model_->variables[f].rank;
    std::vector<std::string> index;
    for (std::size_t k = 0; k < rank; ++k) {
      if (scope_.empty()) break;
      index.push_back(scope_[rng_.below(scope_.size())]);
    }
    if (index.size() != rank) return fallback_term(b, families[f], rank);
    Coefficient coef{small_value(rng_), std::nullopt, {}};
    if (coef.factor == 0.0) coef.factor = 1.0;
    if (rng_.below(2)) {
      std::string pname = "cw" + std::to_string(param_counter_++);
      std::vector<std::string> cidx;
      std::size_t ar = 1 + rng_.below(2);
      for (std::size_t k = 0; k < ar; ++k) cidx.push_back(scope_[rng_.below(scope_.size())]);
      model_->constants.push_back({pname, DataKind::ParameterArray, ar});
      meadow::ParameterArray arr(ar);
      fill_dense(arr, cidx, [&] { return small_value(rng_); });
      data_->parameters[pname] = std::move(arr);
      coef.parameter = pname;
      coef.index = cidx;
    }
    return b.term(families[f], index, coef);
  }

  // Nothing in scope to index with: wrap the term in a sum over a local.
  NodeId fallback_term(ExpressionBuilder& b, const char* family, std::size_t rank) {
    std::string set = "S" + std::to_string(set_counter_++);
    model_->constants.push_back({set, DataKind::IndexSet, 1});
    meadow::IndexSet data(1);
    for (Index v : data_->index_spaces.at("L")) {
      Index t[1] = {v};
      data.push_back(t);
    }
    data_->index_sets[set] = std::move(data);
    std::vector<std::string> index(rank, "l1");
    ++sums_;
    return b.sum({"l1"}, set, b.term(family, index, 1.0));
  }

  SplitMix64& rng_;
  Limits lim_;
  SymbolicModel* model_ = nullptr;
  meadow::DataBundle* data_ = nullptr;
  std::size_t sums_ = 0;
  std::size_t path_product_ = 1;
  std::size_t set_counter_ = 0;
  std::size_t param_counter_ = 0;
  std::vector<std::string> scope_;
  std::vector<std::string> globals_;
};

}  // namespace fuzz
