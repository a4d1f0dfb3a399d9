#include "meadow/ir/model.hpp"

#include <stdexcept>
#include <utility>

namespace meadow::ir {

namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, const std::string& name) {
  for (const T& item : items) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

}  // namespace

const VariableDecl* SymbolicModel::find_variable(const std::string& name) const {
  return find_named(variables, name);
}
const DataPlaceholder* SymbolicModel::find_constant(const std::string& name) const {
  return find_named(constants, name);
}
const IndexPlaceholder* SymbolicModel::find_placeholder(const std::string& name) const {
  return find_named(index_placeholders, name);
}
const MultidimExpression* SymbolicModel::find_expression(const std::string& name) const {
  return find_named(expressions, name);
}
const MultidimExpression* SymbolicModel::objective() const {
  for (const auto& e : expressions) {
    if (e.sense) return &e;
  }
  return nullptr;
}

ExpressionBuilder::ExpressionBuilder(std::string name, std::vector<std::string> global_indices) {
  expr_.name = std::move(name);
  expr_.global_indices = std::move(global_indices);
}

NodeId ExpressionBuilder::term(std::string variable, std::vector<std::string> index,
                               Coefficient coef) {
  expr_.nodes.emplace_back(TermNode{std::move(variable), std::move(index), std::move(coef)});
  return expr_.nodes.size() - 1;
}

NodeId ExpressionBuilder::sum(std::vector<std::string> binding, std::string set, NodeId child) {
  expr_.nodes.emplace_back(SumNode{0, std::move(binding), std::move(set), child});
  return expr_.nodes.size() - 1;
}

NodeId ExpressionBuilder::add(NodeId left, NodeId right) {
  expr_.nodes.emplace_back(AddNode{left, right});
  return expr_.nodes.size() - 1;
}

NodeId ExpressionBuilder::sub(NodeId left, NodeId right) {
  expr_.nodes.emplace_back(SubNode{left, right});
  return expr_.nodes.size() - 1;
}

NodeId ExpressionBuilder::add_all(const std::vector<NodeId>& operands) {
  if (operands.empty()) throw std::invalid_argument("add_all needs at least one operand");
  NodeId acc = operands.front();
  for (std::size_t k = 1; k < operands.size(); ++k) acc = add(acc, operands[k]);
  return acc;
}

MultidimExpression ExpressionBuilder::finish(NodeId root,
                                             std::optional<ObjectiveSense> sense) && {
  expr_.root = root;
  expr_.sense = sense;
  if (!canonicalize_layout(expr_, true)) {
    throw std::invalid_argument("expression '" + expr_.name + "' is not a tree");
  }
  return std::move(expr_);
}

namespace {

template <typename F>
void for_each_child(const ExprNode& node, F&& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AddNode> || std::is_same_v<T, SubNode>) {
          f(n.left);
          f(n.right);
        } else if constexpr (std::is_same_v<T, SumNode>) {
          f(n.child);
        }
      },
      node);
}

}  // namespace

bool canonicalize_layout(MultidimExpression& expr, bool renumber_sums) {
  const std::size_t n = expr.nodes.size();
  if (n == 0 || expr.root >= n) return false;
  std::vector<NodeId> order;
  std::vector<std::size_t> new_id(n, SIZE_MAX);
  std::vector<NodeId> stack{expr.root};
  bool ok = true;
  while (!stack.empty() && ok) {
    NodeId id = stack.back();
    stack.pop_back();
    if (id >= n || new_id[id] != SIZE_MAX) {
      ok = false;
      break;
    }
    new_id[id] = order.size();
    order.push_back(id);
    // Push right child first so the left subtree is visited first.
    std::vector<NodeId> kids;
    for_each_child(expr.nodes[id], [&](NodeId c) { kids.push_back(c); });
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  if (!ok || order.size() != n) return false;

  std::vector<ExprNode> nodes;
  nodes.reserve(n);
  std::size_t next_sum = 1;
  for (NodeId old : order) {
    ExprNode node = expr.nodes[old];
    std::visit(
        [&](auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, AddNode> || std::is_same_v<T, SubNode>) {
            v.left = new_id[v.left];
            v.right = new_id[v.right];
          } else if constexpr (std::is_same_v<T, SumNode>) {
            v.child = new_id[v.child];
            if (renumber_sums) v.sum_id = next_sum++;
          }
        },
        node);
    nodes.push_back(std::move(node));
  }
  expr.nodes = std::move(nodes);
  expr.root = 0;
  return true;
}

void negate(MultidimExpression& expr) {
  for (auto& node : expr.nodes) {
    if (auto* t = std::get_if<TermNode>(&node)) t->coefficient.factor = -t->coefficient.factor;
  }
}

}  // namespace meadow::ir
