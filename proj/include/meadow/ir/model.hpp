#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "meadow/core/canonical.hpp"

namespace meadow::ir {

enum class PlaceholderKind { Global, Local };

struct IndexPlaceholder {
  std::string name;
  PlaceholderKind kind = PlaceholderKind::Global;
  /// Index space the placeholder ranges over; defaults to its own name.
  std::optional<std::string> domain;

  const std::string& space_name() const { return domain ? *domain : name; }
  friend bool operator==(const IndexPlaceholder&, const IndexPlaceholder&) = default;
};

enum class DataKind { IndexSet, ParameterArray, Scalar };

struct DataPlaceholder {
  std::string name;
  DataKind kind = DataKind::IndexSet;
  std::size_t arity = 0;
  friend bool operator==(const DataPlaceholder&, const DataPlaceholder&) = default;
};

using NodeId = std::size_t;

/// `factor * parameter[index]`, or just `factor` when no parameter is named.
/// A scalar parameter is referenced with an empty index.
struct Coefficient {
  double factor = 1.0;
  std::optional<std::string> parameter;
  std::vector<std::string> index;
  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

struct AddNode {
  NodeId left, right;
  friend bool operator==(const AddNode&, const AddNode&) = default;
};
struct SubNode {
  NodeId left, right;
  friend bool operator==(const SubNode&, const SubNode&) = default;
};
/// Sum over the tuples of `set`; `binding[p]` names the placeholder matched
/// against tuple position p. Global placeholders in the binding form G_k,
/// the remaining (local) ones form L_k.
struct SumNode {
  std::size_t sum_id = 0;
  std::vector<std::string> binding;
  std::string set;
  NodeId child = 0;
  friend bool operator==(const SumNode&, const SumNode&) = default;
};
struct TermNode {
  std::string variable;
  std::vector<std::string> index;
  Coefficient coefficient;
  friend bool operator==(const TermNode&, const TermNode&) = default;
};

using ExprNode = std::variant<AddNode, SubNode, SumNode, TermNode>;

enum class ObjectiveSense { Min, Max };

/// A family of linear expressions indexed by the global placeholders.
/// Nodes form a tree stored flat; `root` indexes into `nodes`.
struct MultidimExpression {
  std::string name;
  std::vector<std::string> global_indices;
  std::vector<ExprNode> nodes;
  NodeId root = 0;
  /// Set on the objective expression only.
  std::optional<ObjectiveSense> sense;

  friend bool operator==(const MultidimExpression&, const MultidimExpression&) = default;
};

/// Right-hand side: literal broadcast or a parameter (array indexed by G, or scalar).
struct Rhs {
  double value = 0.0;
  std::optional<std::string> parameter;
  friend bool operator==(const Rhs&, const Rhs&) = default;
};

struct ConstraintBlock {
  std::string name;
  std::string expression;
  Sign sign = Sign::Eq;
  Rhs rhs;
  friend bool operator==(const ConstraintBlock&, const ConstraintBlock&) = default;
};

struct VariableDecl {
  std::string name;
  std::size_t rank = 0;
  bool integer = false;
  /// Index space per position; needed only for dense column enumeration.
  std::vector<std::string> domains;
  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

/// Literal bound, or a parameter looked up by the column's index tuple
/// (entries missing from the parameter keep the default bound).
struct BoundValue {
  double value = 0.0;
  std::optional<std::string> parameter;
  friend bool operator==(const BoundValue&, const BoundValue&) = default;
};

struct BoundOverride {
  std::string variable;
  std::optional<BoundValue> lower;
  std::optional<BoundValue> upper;
  friend bool operator==(const BoundOverride&, const BoundOverride&) = default;
};

/// The symbolic model: variables, constants, index placeholders, expression
/// graphs, constraints and bounds. Variables default to [0, +inf).
struct SymbolicModel {
  std::vector<VariableDecl> variables;
  std::vector<DataPlaceholder> constants;
  std::vector<IndexPlaceholder> index_placeholders;
  std::vector<MultidimExpression> expressions;
  std::vector<ConstraintBlock> constraints;
  std::vector<BoundOverride> bounds;

  const VariableDecl* find_variable(const std::string& name) const;
  const DataPlaceholder* find_constant(const std::string& name) const;
  const IndexPlaceholder* find_placeholder(const std::string& name) const;
  const MultidimExpression* find_expression(const std::string& name) const;
  /// The expression carrying a sense, if any.
  const MultidimExpression* objective() const;

  friend bool operator==(const SymbolicModel&, const SymbolicModel&) = default;
};

/// Incremental construction of an expression tree. `finish` lays the nodes
/// out in pre-order and numbers the sums 1..K in that order.
class ExpressionBuilder {
 public:
  ExpressionBuilder(std::string name, std::vector<std::string> global_indices);

  NodeId term(std::string variable, std::vector<std::string> index, Coefficient coef = {});
  NodeId term(std::string variable, std::vector<std::string> index, double factor) {
    return term(std::move(variable), std::move(index), Coefficient{factor, std::nullopt, {}});
  }
  NodeId sum(std::vector<std::string> binding, std::string set, NodeId child);
  NodeId add(NodeId left, NodeId right);
  NodeId sub(NodeId left, NodeId right);
  /// Left-folded add over all operands (at least one).
  NodeId add_all(const std::vector<NodeId>& operands);

  MultidimExpression finish(NodeId root, std::optional<ObjectiveSense> sense = std::nullopt) &&;

 private:
  MultidimExpression expr_;
};

/// Rewrites the node array into pre-order with root 0, optionally numbering
/// the sums 1..K in that order. Requires a well-formed tree (see validate);
/// returns false otherwise and leaves the expression untouched.
bool canonicalize_layout(MultidimExpression& expr, bool renumber_sums);

/// Multiplies every term coefficient by -1.
void negate(MultidimExpression& expr);

}  // namespace meadow::ir
