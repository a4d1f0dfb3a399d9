#include "meadow/ir/validate.hpp"

#include <algorithm>
#include <cmath>
#include <variant>
#include <set>
#include <unordered_set>

namespace meadow::ir {

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::UnboundPlaceholder: return "UnboundPlaceholder";
    case ViolationKind::PlaceholderKindMismatch: return "PlaceholderKindMismatch";
    case ViolationKind::ArityMismatch: return "ArityMismatch";
    case ViolationKind::SumNumbering: return "SumNumbering";
    case ViolationKind::MalformedGraph: return "MalformedGraph";
    case ViolationKind::UnknownVariable: return "UnknownVariable";
    case ViolationKind::RankMismatch: return "RankMismatch";
    case ViolationKind::UnknownConstant: return "UnknownConstant";
    case ViolationKind::ConstantKindMismatch: return "ConstantKindMismatch";
    case ViolationKind::UnknownExpression: return "UnknownExpression";
    case ViolationKind::ObjectiveShape: return "ObjectiveShape";
    case ViolationKind::InvalidName: return "InvalidName";
  }
  return "?";
}

std::size_t ValidationReport::count(ViolationKind k) const {
  std::size_t n = 0;
  for (const auto& v : violations) n += v.kind == k;
  return n;
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.kind)) + " at " + v.where + ": " + v.message;
  }
  return out;
}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0]) && s[0] != '_') return false;
  for (char c : s) {
    if (!alpha(c) && !digit(c) && c != '_') return false;
  }
  return true;
}

// Column names are `<family>_<i>_<j>`, so families carry no underscore.
bool is_family_name(const std::string& s) {
  if (!is_identifier(s) || s[0] == '_') return false;
  return s.find('_') == std::string::npos;
}

class Checker {
 public:
  explicit Checker(const SymbolicModel& m) : m_(m) {}

  ValidationReport run() {
    check_declarations();
    for (const auto& e : m_.expressions) check_expression(e);
    check_objective();
    check_constraints();
    check_bounds();
    return std::move(report_);
  }

 private:
  void add(ViolationKind k, std::string where, std::string msg) {
    report_.violations.push_back({k, std::move(where), std::move(msg)});
  }

  template <typename T>
  void unique_names(const std::vector<T>& items, const std::string& section) {
    std::set<std::string> seen;
    for (const auto& it : items) {
      if (!is_identifier(it.name)) {
        add(ViolationKind::InvalidName, section + "/" + it.name, "not an identifier");
      }
      if (!seen.insert(it.name).second) {
        add(ViolationKind::DuplicateName, section + "/" + it.name, "declared twice");
      }
    }
  }

  void check_declarations() {
    unique_names(m_.variables, "variables");
    unique_names(m_.constants, "constants");
    unique_names(m_.index_placeholders, "index_placeholders");
    unique_names(m_.expressions, "expressions");
    unique_names(m_.constraints, "constraints");

    for (const auto& v : m_.variables) {
      std::string where = "variables/" + v.name;
      if (is_identifier(v.name) && !is_family_name(v.name)) {
        add(ViolationKind::InvalidName, where, "variable names must match [A-Za-z][A-Za-z0-9]*");
      }
      if (v.rank + 1 > kMaxArity) {
        add(ViolationKind::RankMismatch, where,
            "rank exceeds " + std::to_string(kMaxArity - 1));
      }
      if (!v.domains.empty() && v.domains.size() != v.rank) {
        add(ViolationKind::RankMismatch, where, "domains must list one space per index");
      }
    }
    for (const auto& c : m_.constants) {
      std::string where = "constants/" + c.name;
      if (c.kind == DataKind::Scalar && c.arity != 0) {
        add(ViolationKind::ArityMismatch, where, "scalar must have arity 0");
      }
      if (c.kind != DataKind::Scalar && (c.arity == 0 || c.arity > kMaxArity)) {
        add(ViolationKind::ArityMismatch, where,
            "arity must be in [1, " + std::to_string(kMaxArity) + "]");
      }
    }
  }

  const DataPlaceholder* constant(const std::string& name, const std::string& where) {
    const DataPlaceholder* c = m_.find_constant(name);
    if (!c) add(ViolationKind::UnknownConstant, where, "unknown constant '" + name + "'");
    return c;
  }

  struct Scope {
    std::set<std::string> globals;
    std::vector<std::string> locals;
    bool bound(const std::string& n) const {
      return globals.count(n) != 0 ||
             std::find(locals.begin(), locals.end(), n) != locals.end();
    }
  };

  void check_placeholder_use(const std::string& name, const Scope& scope,
                             const std::string& where) {
    if (scope.bound(name)) return;
    const IndexPlaceholder* p = m_.find_placeholder(name);
    if (!p) {
      add(ViolationKind::UnboundPlaceholder, where, "undeclared placeholder '" + name + "'");
    } else if (p->kind == PlaceholderKind::Global) {
      add(ViolationKind::UnboundPlaceholder, where,
          "global placeholder '" + name + "' is not in the expression's global indices");
    } else {
      add(ViolationKind::UnboundPlaceholder, where,
          "local placeholder '" + name + "' used outside a sum binding it");
    }
  }

  void check_expression(const MultidimExpression& e) {
    const std::string base = "expressions/" + e.name;
    Scope scope;
    for (const auto& g : e.global_indices) {
      const IndexPlaceholder* p = m_.find_placeholder(g);
      if (!p) {
        add(ViolationKind::UnboundPlaceholder, base + "/global_indices",
            "undeclared placeholder '" + g + "'");
      } else if (p->kind != PlaceholderKind::Global) {
        add(ViolationKind::PlaceholderKindMismatch, base + "/global_indices",
            "'" + g + "' is declared local");
      }
      if (!scope.globals.insert(g).second) {
        add(ViolationKind::DuplicateName, base + "/global_indices", "'" + g + "' listed twice");
      }
    }
    if (e.global_indices.size() > kMaxArity) {
      add(ViolationKind::ArityMismatch, base + "/global_indices", "too many global indices");
    }

    const std::size_t n = e.nodes.size();
    if (n == 0 || e.root >= n) {
      add(ViolationKind::MalformedGraph, base, "root out of range");
      return;
    }
    // Tree shape: every node reachable from root exactly once.
    std::vector<int> visits(n, 0);
    std::vector<NodeId> order;
    std::vector<NodeId> stack{e.root};
    bool malformed = false;
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (id >= n) {
        add(ViolationKind::MalformedGraph, base, "child reference " + std::to_string(id) +
                                                     " out of range");
        malformed = true;
        continue;
      }
      if (visits[id]++ > 0) {
        add(ViolationKind::MalformedGraph, base + "/nodes/" + std::to_string(id),
            "node shared or cyclic");
        malformed = true;
        continue;
      }
      order.push_back(id);
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AddNode> || std::is_same_v<T, SubNode>) {
              stack.push_back(v.right);
              stack.push_back(v.left);
            } else if constexpr (std::is_same_v<T, SumNode>) {
              stack.push_back(v.child);
            }
          },
          e.nodes[id]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (visits[k] == 0) {
        add(ViolationKind::MalformedGraph, base + "/nodes/" + std::to_string(k),
            "unreachable from root");
        malformed = true;
      }
    }
    if (malformed) return;

    std::size_t expected_sum = 1;
    for (NodeId id : order) {
      if (const auto* s = std::get_if<SumNode>(&e.nodes[id])) {
        if (s->sum_id != expected_sum) {
          add(ViolationKind::SumNumbering, base + "/nodes/" + std::to_string(id),
              "sum_id " + std::to_string(s->sum_id) + ", expected " +
                  std::to_string(expected_sum));
        }
        ++expected_sum;
      }
    }
    walk(e, e.root, scope, base);
  }

  void walk(const MultidimExpression& e, NodeId id, Scope& scope, const std::string& base) {
    const std::string where = base + "/nodes/" + std::to_string(id);
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, AddNode> || std::is_same_v<T, SubNode>) {
            walk(e, v.left, scope, base);
            walk(e, v.right, scope, base);
          } else if constexpr (std::is_same_v<T, SumNode>) {
            check_sum(v, scope, where);
            std::size_t mark = scope.locals.size();
            for (const auto& b : v.binding) {
              const IndexPlaceholder* p = m_.find_placeholder(b);
              if (p && p->kind == PlaceholderKind::Local && !scope.bound(b)) {
                scope.locals.push_back(b);
              }
            }
            walk(e, v.child, scope, base);
            scope.locals.resize(mark);
          } else {
            check_term(v, scope, where);
          }
        },
        e.nodes[id]);
  }

  void check_sum(const SumNode& s, const Scope& scope, const std::string& where) {
    std::set<std::string> seen;
    for (const auto& b : s.binding) {
      if (!seen.insert(b).second) {
        add(ViolationKind::DuplicateName, where, "'" + b + "' bound twice by one sum");
      }
      const IndexPlaceholder* p = m_.find_placeholder(b);
      if (!p) {
        add(ViolationKind::UnboundPlaceholder, where, "undeclared placeholder '" + b + "'");
      } else if (p->kind == PlaceholderKind::Global && scope.globals.count(b) == 0) {
        add(ViolationKind::UnboundPlaceholder, where,
            "global placeholder '" + b + "' is not in the expression's global indices");
      }
    }
    if (const DataPlaceholder* c = constant(s.set, where)) {
      if (c->kind != DataKind::IndexSet) {
        add(ViolationKind::ConstantKindMismatch, where, "'" + s.set + "' is not an index set");
      } else if (c->arity != s.binding.size()) {
        add(ViolationKind::ArityMismatch, where,
            "binding has " + std::to_string(s.binding.size()) + " placeholders, set '" + s.set +
                "' has arity " + std::to_string(c->arity));
      }
    }
  }

  void check_term(const TermNode& t, const Scope& scope, const std::string& where) {
    const VariableDecl* v = m_.find_variable(t.variable);
    if (!v) {
      add(ViolationKind::UnknownVariable, where, "unknown variable '" + t.variable + "'");
    } else if (v->rank != t.index.size()) {
      add(ViolationKind::RankMismatch, where,
          "'" + t.variable + "' has rank " + std::to_string(v->rank) + ", indexed with " +
              std::to_string(t.index.size()));
    }
    for (const auto& p : t.index) check_placeholder_use(p, scope, where);

    const Coefficient& c = t.coefficient;
    if (!std::isfinite(c.factor)) {
      add(ViolationKind::MalformedGraph, where, "coefficient factor is not finite");
    }
    if (c.parameter) {
      if (const DataPlaceholder* d = constant(*c.parameter, where)) {
        check_parameter_ref(*d, c.index.size(), where);
      }
      for (const auto& p : c.index) check_placeholder_use(p, scope, where);
    } else if (!c.index.empty()) {
      add(ViolationKind::MalformedGraph, where, "coefficient index without parameter");
    }
  }

  void check_parameter_ref(const DataPlaceholder& d, std::size_t arity,
                           const std::string& where) {
    if (d.kind == DataKind::IndexSet) {
      add(ViolationKind::ConstantKindMismatch, where, "'" + d.name + "' is an index set");
    } else if (d.kind == DataKind::Scalar && arity != 0) {
      add(ViolationKind::ArityMismatch, where, "scalar '" + d.name + "' takes no index");
    } else if (d.kind == DataKind::ParameterArray && d.arity != arity) {
      add(ViolationKind::ArityMismatch, where,
          "'" + d.name + "' has arity " + std::to_string(d.arity) + ", indexed with " +
              std::to_string(arity));
    }
  }

  void check_objective() {
    std::size_t count = 0;
    for (const auto& e : m_.expressions) {
      if (!e.sense) continue;
      ++count;
      if (!e.global_indices.empty()) {
        add(ViolationKind::ObjectiveShape, "expressions/" + e.name,
            "objective must have no global indices");
      }
    }
    if (count > 1) add(ViolationKind::ObjectiveShape, "expressions", "more than one objective");
  }

  void check_constraints() {
    for (const auto& c : m_.constraints) {
      std::string where = "constraints/" + c.name;
      const MultidimExpression* e = m_.find_expression(c.expression);
      if (!e) {
        add(ViolationKind::UnknownExpression, where, "unknown expression '" + c.expression + "'");
        continue;
      }
      if (e->sense) {
        add(ViolationKind::ObjectiveShape, where, "objective used as a constraint");
      }
      if (!std::isfinite(c.rhs.value)) {
        add(ViolationKind::MalformedGraph, where, "rhs value is not finite");
      }
      if (c.rhs.parameter) {
        if (const DataPlaceholder* d = constant(*c.rhs.parameter, where)) {
          if (d->kind == DataKind::IndexSet) {
            add(ViolationKind::ConstantKindMismatch, where,
                "'" + d->name + "' is an index set");
          } else if (d->kind == DataKind::ParameterArray &&
                     d->arity != e->global_indices.size()) {
            add(ViolationKind::ArityMismatch, where,
                "rhs '" + d->name + "' has arity " + std::to_string(d->arity) +
                    ", expression has " + std::to_string(e->global_indices.size()) +
                    " global indices");
          }
        }
      }
    }
  }

  void check_bounds() {
    std::set<std::string> seen;
    for (const auto& b : m_.bounds) {
      std::string where = "bounds/" + b.variable;
      const VariableDecl* v = m_.find_variable(b.variable);
      if (!v) {
        add(ViolationKind::UnknownVariable, where, "unknown variable '" + b.variable + "'");
        continue;
      }
      if (!seen.insert(b.variable).second) {
        add(ViolationKind::DuplicateName, where, "bounds given twice");
      }
      for (const auto* bv : {&b.lower, &b.upper}) {
        if (!*bv || !(*bv)->parameter) continue;
        if (const DataPlaceholder* d = constant(*(*bv)->parameter, where)) {
          check_parameter_ref(*d, d->kind == DataKind::Scalar ? 0 : v->rank, where);
        }
      }
    }
  }

  const SymbolicModel& m_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const SymbolicModel& model) { return Checker(model).run(); }

SymbolicModel prepare_model(const SymbolicModel& model) {
  ValidationReport report = validate(model);
  if (!report.ok()) throw ValidationError(std::move(report));
  SymbolicModel out = model;
  for (auto& e : out.expressions) {
    if (e.sense == ObjectiveSense::Max) {
      negate(e);
      e.sense = ObjectiveSense::Min;
    }
  }
  return out;
}

}  // namespace meadow::ir
