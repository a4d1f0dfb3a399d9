#include "meadow/ir/json_ir.hpp"

#include <cmath>

#include "meadow/ir/validate.hpp"

namespace meadow::ir {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw IrParseError(path, what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing");
  return *it;
}

const json& array_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) fail(path + "/" + key, "expected array");
  return v;
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) fail(path + "/" + key, "expected string");
  return v.get<std::string>();
}

std::size_t count_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_unsigned()) fail(path + "/" + key, "expected non-negative integer");
  return v.get<std::size_t>();
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected finite number");
  return d;
}

std::vector<std::string> names(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected array of names");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_string()) fail(path + "/" + std::to_string(k), "expected string");
    out.push_back(v[k].get<std::string>());
  }
  return out;
}

std::string at(const std::string& path, std::size_t k) { return path + "/" + std::to_string(k); }

NodeId node_ref(const json& obj, const char* key, const std::string& path) {
  return count_field(obj, key, path);
}

ExprNode parse_node(const json& n, const std::string& path) {
  std::string op = string_field(n, "op", path);
  if (op == "add") return AddNode{node_ref(n, "left", path), node_ref(n, "right", path)};
  if (op == "sub") return SubNode{node_ref(n, "left", path), node_ref(n, "right", path)};
  if (op == "sum") {
    SumNode s;
    s.sum_id = count_field(n, "sum_id", path);
    s.binding = names(field(n, "binding", path), path + "/binding");
    s.set = string_field(n, "set", path);
    s.child = node_ref(n, "child", path);
    return s;
  }
  if (op == "term") {
    TermNode t;
    t.variable = string_field(n, "variable", path);
    t.index = names(field(n, "index", path), path + "/index");
    if (n.contains("coefficient")) {
      const json& c = n.at("coefficient");
      std::string cp = path + "/coefficient";
      if (c.is_number()) {
        t.coefficient.factor = number(c, cp);
      } else {
        if (!c.is_object()) fail(cp, "expected number or object");
        if (c.contains("factor")) t.coefficient.factor = number(c.at("factor"), cp + "/factor");
        if (c.contains("parameter")) {
          t.coefficient.parameter = string_field(c, "parameter", cp);
          if (c.contains("index")) t.coefficient.index = names(c.at("index"), cp + "/index");
        } else if (c.contains("index")) {
          fail(cp + "/index", "index given without parameter");
        }
      }
    }
    return t;
  }
  fail(path + "/op", "unknown operator '" + op + "'");
}

MultidimExpression parse_expression(const json& e, const std::string& path) {
  MultidimExpression out;
  out.name = string_field(e, "name", path);
  out.global_indices = names(field(e, "global_indices", path), path + "/global_indices");
  if (e.contains("sense")) {
    std::string s = string_field(e, "sense", path);
    if (s == "min") {
      out.sense = ObjectiveSense::Min;
    } else if (s == "max") {
      out.sense = ObjectiveSense::Max;
    } else {
      fail(path + "/sense", "expected \"min\" or \"max\"");
    }
  }
  const json& nodes = array_field(e, "nodes", path);
  out.nodes.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.nodes.push_back(parse_node(nodes[k], at(path + "/nodes", k)));
  }
  out.root = e.contains("root") ? node_ref(e, "root", path) : 0;
  // Malformed graphs are left as-is for validate() to report.
  canonicalize_layout(out, false);
  return out;
}

Sign parse_sign(const std::string& s, const std::string& path) {
  if (s == "=" || s == "==") return Sign::Eq;
  if (s == "<=") return Sign::Le;
  if (s == ">=") return Sign::Ge;
  if (s == "<" || s == ">") fail(path, "strict inequality '" + s + "' is not supported");
  fail(path, "unknown sign '" + s + "'");
}

BoundValue parse_bound_value(const json& v, const std::string& path) {
  BoundValue out;
  if (v.is_number()) {
    out.value = v.get<double>();
    return out;
  }
  if (!v.is_object()) fail(path, "expected number or object");
  if (v.contains("parameter")) {
    out.parameter = string_field(v, "parameter", path);
  } else {
    const json& x = field(v, "value", path);
    if (x.is_string()) {
      std::string s = x.get<std::string>();
      if (s == "inf" || s == "+inf") {
        out.value = kInf;
      } else if (s == "-inf") {
        out.value = -kInf;
      } else {
        fail(path + "/value", "expected number, \"inf\" or \"-inf\"");
      }
    } else {
      if (!x.is_number()) fail(path + "/value", "expected number");
      out.value = x.get<double>();
    }
  }
  return out;
}

ojson emit_bound_value(const BoundValue& b) {
  if (b.parameter) return ojson{{"parameter", *b.parameter}};
  if (std::isinf(b.value)) return ojson{{"value", b.value > 0 ? "inf" : "-inf"}};
  return ojson{{"value", b.value}};
}

const char* kind_name(DataKind k) {
  switch (k) {
    case DataKind::IndexSet: return "index_set";
    case DataKind::ParameterArray: return "parameter_array";
    case DataKind::Scalar: return "scalar";
  }
  return "?";
}

ojson emit_node(const ExprNode& node) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AddNode>) {
          return ojson{{"op", "add"}, {"left", v.left}, {"right", v.right}};
        } else if constexpr (std::is_same_v<T, SubNode>) {
          return ojson{{"op", "sub"}, {"left", v.left}, {"right", v.right}};
        } else if constexpr (std::is_same_v<T, SumNode>) {
          return ojson{{"op", "sum"},
                       {"sum_id", v.sum_id},
                       {"binding", v.binding},
                       {"set", v.set},
                       {"child", v.child}};
        } else {
          ojson coef = ojson::object();
          coef["factor"] = v.coefficient.factor;
          if (v.coefficient.parameter) {
            coef["parameter"] = *v.coefficient.parameter;
            coef["index"] = v.coefficient.index;
          }
          return ojson{{"op", "term"},
                       {"variable", v.variable},
                       {"index", v.index},
                       {"coefficient", std::move(coef)}};
        }
      },
      node);
}

}  // namespace

SymbolicModel parse_ir(const json& doc) {
  if (!doc.is_object()) fail("", "document must be an object");
  SymbolicModel m;

  const json& vars = array_field(doc, "variables", "");
  for (std::size_t k = 0; k < vars.size(); ++k) {
    std::string p = at("/variables", k);
    VariableDecl v;
    v.name = string_field(vars[k], "name", p);
    v.rank = count_field(vars[k], "rank", p);
    if (vars[k].contains("integer")) {
      const json& b = vars[k].at("integer");
      if (!b.is_boolean()) fail(p + "/integer", "expected boolean");
      v.integer = b.get<bool>();
    }
    if (vars[k].contains("domains")) v.domains = names(vars[k].at("domains"), p + "/domains");
    m.variables.push_back(std::move(v));
  }

  const json& consts = array_field(doc, "constants", "");
  for (std::size_t k = 0; k < consts.size(); ++k) {
    std::string p = at("/constants", k);
    DataPlaceholder d;
    d.name = string_field(consts[k], "name", p);
    std::string kind = string_field(consts[k], "kind", p);
    if (kind == "index_set") {
      d.kind = DataKind::IndexSet;
    } else if (kind == "parameter_array") {
      d.kind = DataKind::ParameterArray;
    } else if (kind == "scalar") {
      d.kind = DataKind::Scalar;
    } else {
      fail(p + "/kind", "unknown constant kind '" + kind + "'");
    }
    d.arity = d.kind == DataKind::Scalar && !consts[k].contains("arity")
                  ? 0
                  : count_field(consts[k], "arity", p);
    m.constants.push_back(std::move(d));
  }

  const json& phs = array_field(doc, "index_placeholders", "");
  for (std::size_t k = 0; k < phs.size(); ++k) {
    std::string p = at("/index_placeholders", k);
    IndexPlaceholder ph;
    ph.name = string_field(phs[k], "name", p);
    std::string kind = string_field(phs[k], "kind", p);
    if (kind == "global") {
      ph.kind = PlaceholderKind::Global;
    } else if (kind == "local") {
      ph.kind = PlaceholderKind::Local;
    } else {
      fail(p + "/kind", "expected \"global\" or \"local\"");
    }
    if (phs[k].contains("domain")) ph.domain = string_field(phs[k], "domain", p);
    m.index_placeholders.push_back(std::move(ph));
  }

  const json& exprs = array_field(doc, "expressions", "");
  for (std::size_t k = 0; k < exprs.size(); ++k) {
    m.expressions.push_back(parse_expression(exprs[k], at("/expressions", k)));
  }

  const json& cons = array_field(doc, "constraints", "");
  for (std::size_t k = 0; k < cons.size(); ++k) {
    std::string p = at("/constraints", k);
    ConstraintBlock c;
    c.name = string_field(cons[k], "name", p);
    c.expression = string_field(cons[k], "expression", p);
    c.sign = parse_sign(string_field(cons[k], "sign", p), p + "/sign");
    const json& rhs = field(cons[k], "rhs", p);
    if (rhs.is_number()) {
      c.rhs.value = number(rhs, p + "/rhs");
    } else if (rhs.is_object() && rhs.contains("parameter")) {
      c.rhs.parameter = string_field(rhs, "parameter", p + "/rhs");
    } else if (rhs.is_object()) {
      c.rhs.value = number(field(rhs, "value", p + "/rhs"), p + "/rhs/value");
    } else {
      fail(p + "/rhs", "expected number or object");
    }
    m.constraints.push_back(std::move(c));
  }

  const json& bounds = array_field(doc, "bounds", "");
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    std::string p = at("/bounds", k);
    BoundOverride b;
    b.variable = string_field(bounds[k], "variable", p);
    if (bounds[k].contains("lower")) {
      b.lower = parse_bound_value(bounds[k].at("lower"), p + "/lower");
    }
    if (bounds[k].contains("upper")) {
      b.upper = parse_bound_value(bounds[k].at("upper"), p + "/upper");
    }
    m.bounds.push_back(std::move(b));
  }
  return m;
}

SymbolicModel parse_ir_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IrParseError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_ir(doc);
}

ojson emit_ir(const SymbolicModel& model) {
  ValidationReport report = validate(model);
  if (!report.ok()) throw ValidationError(std::move(report));

  ojson doc = ojson::object();
  ojson vars = ojson::array();
  for (const auto& v : model.variables) {
    ojson o{{"name", v.name}, {"rank", v.rank}, {"integer", v.integer}};
    if (!v.domains.empty()) o["domains"] = v.domains;
    vars.push_back(std::move(o));
  }
  doc["variables"] = std::move(vars);

  ojson consts = ojson::array();
  for (const auto& c : model.constants) {
    consts.push_back(ojson{{"name", c.name}, {"kind", kind_name(c.kind)}, {"arity", c.arity}});
  }
  doc["constants"] = std::move(consts);

  ojson phs = ojson::array();
  for (const auto& p : model.index_placeholders) {
    ojson o{{"name", p.name}, {"kind", p.kind == PlaceholderKind::Global ? "global" : "local"}};
    if (p.domain) o["domain"] = *p.domain;
    phs.push_back(std::move(o));
  }
  doc["index_placeholders"] = std::move(phs);

  ojson exprs = ojson::array();
  for (const auto& e : model.expressions) {
    MultidimExpression canon = e;
    canonicalize_layout(canon, false);
    ojson o{{"name", canon.name}, {"global_indices", canon.global_indices}};
    if (canon.sense) o["sense"] = *canon.sense == ObjectiveSense::Min ? "min" : "max";
    o["root"] = 0;
    ojson nodes = ojson::array();
    for (const auto& n : canon.nodes) nodes.push_back(emit_node(n));
    o["nodes"] = std::move(nodes);
    exprs.push_back(std::move(o));
  }
  doc["expressions"] = std::move(exprs);

  ojson cons = ojson::array();
  for (const auto& c : model.constraints) {
    ojson rhs = c.rhs.parameter ? ojson{{"parameter", *c.rhs.parameter}}
                                : ojson{{"value", c.rhs.value}};
    cons.push_back(ojson{{"name", c.name},
                         {"expression", c.expression},
                         {"sign", to_string(c.sign)},
                         {"rhs", std::move(rhs)}});
  }
  doc["constraints"] = std::move(cons);

  ojson bounds = ojson::array();
  for (const auto& b : model.bounds) {
    ojson o{{"variable", b.variable}};
    if (b.lower) o["lower"] = emit_bound_value(*b.lower);
    if (b.upper) o["upper"] = emit_bound_value(*b.upper);
    bounds.push_back(std::move(o));
  }
  doc["bounds"] = std::move(bounds);
  return doc;
}

std::string emit_ir_text(const SymbolicModel& model) { return emit_ir(model).dump(2) + "\n"; }

}  // namespace meadow::ir
