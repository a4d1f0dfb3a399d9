#include "meadow/inst/normalize.hpp"

#include <algorithm>
#include <set>
#include <variant>

#include "meadow/core/errors.hpp"

namespace meadow::inst {

using namespace meadow::ir;

const IndexSet& resolve_set(const std::string& name, const std::map<std::string, IndexSet>& overlay,
                            const DataBundle& data) {
  auto it = overlay.find(name);
  if (it != overlay.end()) return it->second;
  const IndexSet* s = data.find_set(name);
  if (!s) throw DataError("no data for index set '" + name + "'");
  return *s;
}

namespace {

const std::vector<Index>& space_of(const SymbolicModel& model, const std::string& placeholder,
                                   const DataBundle& data) {
  const IndexPlaceholder* p = model.find_placeholder(placeholder);
  const std::string& space = p ? p->space_name() : placeholder;
  const std::vector<Index>* values = data.find_space(space);
  if (!values) throw MissingSpace(placeholder);
  return *values;
}

// Appends to `out` every tuple `prefix ++ s` for s in the product of `spaces`.
void append_product(IndexSet& out, std::vector<Index>& buf, std::size_t prefix_len,
                    const std::vector<const std::vector<Index>*>& spaces) {
  const std::size_t n = spaces.size();
  for (const auto* s : spaces) {
    if (s->empty()) return;
  }
  std::vector<std::size_t> pos(n, 0);
  buf.resize(prefix_len + n);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) buf[prefix_len + k] = (*spaces[k])[pos[k]];
    out.push_back(buf);
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++pos[k] < spaces[k]->size()) break;
      pos[k] = 0;
      if (k == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace

IndexSet space_product(const SymbolicModel& model, const std::vector<std::string>& placeholders,
                       const DataBundle& data) {
  std::vector<const std::vector<Index>*> spaces;
  for (const auto& p : placeholders) spaces.push_back(&space_of(model, p, data));
  IndexSet out(placeholders.size());
  std::vector<Index> buf;
  append_product(out, buf, 0, spaces);
  return out;
}

NormalizedExpression normalize(const SymbolicModel& model, const MultidimExpression& expr,
                               const DataBundle& data) {
  NormalizedExpression out;
  out.expr = expr;
  MultidimExpression& e = out.expr;
  const std::vector<std::string>& G = e.global_indices;
  if (G.empty()) return out;
  const std::set<std::string> globals(G.begin(), G.end());

  // Walk every root-to-leaf path, recording the globals each leaf misses.
  std::map<NodeId, std::set<std::string>> expand;  // sum node -> globals to add
  std::vector<NodeId> wrap;                        // leaves with no sum above
  struct Frame {
    NodeId id;
    std::set<std::string> bound;
    std::optional<NodeId> innermost;
  };
  std::vector<Frame> stack{{e.root, {}, std::nullopt}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const ExprNode& node = e.nodes[f.id];
    if (const auto* s = std::get_if<SumNode>(&node)) {
      Frame child{s->child, f.bound, f.id};
      for (const auto& b : s->binding) {
        if (globals.count(b)) child.bound.insert(b);
      }
      stack.push_back(std::move(child));
    } else if (const auto* a = std::get_if<AddNode>(&node)) {
      stack.push_back({a->right, f.bound, f.innermost});
      stack.push_back({a->left, f.bound, f.innermost});
    } else if (const auto* d = std::get_if<SubNode>(&node)) {
      stack.push_back({d->right, f.bound, f.innermost});
      stack.push_back({d->left, f.bound, f.innermost});
    } else {
      if (f.bound.size() == globals.size()) continue;
      if (!f.innermost) {
        wrap.push_back(f.id);
        continue;
      }
      auto& missing = expand[*f.innermost];
      for (const auto& g : G) {
        if (!f.bound.count(g)) missing.insert(g);
      }
    }
  }

  for (const auto& [id, missing_set] : expand) {
    auto& s = std::get<SumNode>(e.nodes[id]);
    std::vector<std::string> missing;
    for (const auto& g : G) {
      if (missing_set.count(g)) missing.push_back(g);
    }
    std::vector<const std::vector<Index>*> spaces;
    for (const auto& g : missing) spaces.push_back(&space_of(model, g, data));
    const IndexSet& base = resolve_set(s.set, out.derived_sets, data);
    IndexSet expanded(base.arity() + missing.size());
    std::vector<Index> buf;
    for (std::size_t k = 0; k < base.size(); ++k) {
      auto t = base[k];
      buf.assign(t.begin(), t.end());
      append_product(expanded, buf, t.size(), spaces);
    }
    std::string name = s.set + "#" + e.name + "#" + std::to_string(s.sum_id);
    s.binding.insert(s.binding.end(), missing.begin(), missing.end());
    s.set = name;
    out.derived_sets[name] = std::move(expanded);
  }

  if (!wrap.empty()) {
    std::string name = "#space#" + e.name;
    out.derived_sets[name] = space_product(model, G, data);
    for (NodeId leaf : wrap) {
      // Move the leaf to a new slot and put the dummy sum in its place, so the
      // parent's reference now points at the sum.
      e.nodes.push_back(e.nodes[leaf]);
      e.nodes[leaf] = SumNode{0, G, name, e.nodes.size() - 1};
    }
  }

  canonicalize_layout(e, true);
  return out;
}

}  // namespace meadow::inst
