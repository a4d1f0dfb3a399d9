#include "meadow/decomp/sequential.hpp"

#include <algorithm>
#include <stdexcept>

namespace meadow::decomp {

using nlohmann::json;

const char* to_string(AggregationPolicy p) {
  switch (p) {
    case AggregationPolicy::Sum: return "sum";
    case AggregationPolicy::First: return "first";
    case AggregationPolicy::Last: return "last";
  }
  return "?";
}

const char* to_string(SetPolicy p) { return p == SetPolicy::Map ? "map" : "link"; }

nlohmann::ordered_json emit_metadata(const PeriodMetadata& meta) {
  nlohmann::ordered_json doc;
  doc["period_space"] = meta.period_space;
  doc["variables"] = nlohmann::ordered_json::object();
  for (const auto& [name, pos] : meta.variable_period) doc["variables"][name] = pos;
  doc["sets"] = nlohmann::ordered_json::object();
  for (const auto& [name, pos] : meta.set_periods) {
    nlohmann::ordered_json e = {{"periods", pos}};
    auto it = meta.set_policy.find(name);
    if (it != meta.set_policy.end()) e["policy"] = to_string(it->second);
    doc["sets"][name] = e;
  }
  doc["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [name, pos] : meta.parameter_period) {
    nlohmann::ordered_json p = {{"period", pos}};
    auto it = meta.aggregation_policy.find(name);
    if (it != meta.aggregation_policy.end()) p["policy"] = to_string(it->second);
    doc["parameters"][name] = p;
  }
  doc["state_variables"] = meta.state_variables;
  return doc;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw DataError("sequential" + path + ": " + what);
}

std::size_t position(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected non-negative integer position");
  return v.get<std::size_t>();
}

}  // namespace

PeriodMetadata parse_metadata(const json& doc) {
  if (!doc.is_object()) fail("", "expected object");
  PeriodMetadata meta;
  if (doc.contains("period_space")) {
    if (!doc["period_space"].is_string()) fail("/period_space", "expected string");
    meta.period_space = doc["period_space"].get<std::string>();
  }
  if (doc.contains("variables")) {
    for (const auto& [name, v] : doc["variables"].items()) {
      meta.variable_period[name] = position(v, "/variables/" + name);
    }
  }
  if (doc.contains("sets")) {
    for (const auto& [name, body] : doc["sets"].items()) {
      std::string path = "/sets/" + name;
      if (!body.is_object() || !body.contains("periods") || !body["periods"].is_array()) {
        fail(path, "expected {periods: [...]}");
      }
      auto& pos = meta.set_periods[name];
      for (std::size_t k = 0; k < body["periods"].size(); ++k) {
        pos.push_back(position(body["periods"][k], path + "/periods/" + std::to_string(k)));
      }
      if (body.contains("policy")) {
        auto p = body["policy"];
        if (p == "map") meta.set_policy[name] = SetPolicy::Map;
        else if (p == "link") meta.set_policy[name] = SetPolicy::Link;
        else fail(path + "/policy", "expected map or link");
      }
    }
  }
  if (doc.contains("parameters")) {
    for (const auto& [name, body] : doc["parameters"].items()) {
      std::string path = "/parameters/" + name;
      if (!body.is_object() || !body.contains("period")) fail(path, "expected {period: n}");
      meta.parameter_period[name] = position(body["period"], path + "/period");
      if (body.contains("policy")) {
        auto p = body["policy"];
        if (p == "sum") meta.aggregation_policy[name] = AggregationPolicy::Sum;
        else if (p == "first") meta.aggregation_policy[name] = AggregationPolicy::First;
        else if (p == "last") meta.aggregation_policy[name] = AggregationPolicy::Last;
        else fail(path + "/policy", "expected sum, first or last");
      }
    }
  }
  if (doc.contains("state_variables")) {
    if (!doc["state_variables"].is_array()) fail("/state_variables", "expected array");
    for (const auto& v : doc["state_variables"]) {
      if (!v.is_string()) fail("/state_variables", "expected strings");
      meta.state_variables.insert(v.get<std::string>());
    }
  }
  return meta;
}

std::size_t SequentialModel::find_column(const std::string& family,
                                         std::span<const Index> index) const {
  auto f = column_lookup.find(family);
  if (f == column_lookup.end()) return npos;
  auto it = f->second.find(TupleKey(index));
  return it == f->second.end() ? npos : it->second;
}

namespace {

int period_count(const DataBundle& data, const PeriodMetadata& meta) {
  const auto* space = data.find_space(meta.period_space);
  if (!space) throw DataError("no period space '" + meta.period_space + "'");
  std::vector<Index> v = *space;
  std::sort(v.begin(), v.end());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] != static_cast<Index>(k + 1)) {
      throw DataError("period space '" + meta.period_space + "' must be 1..T");
    }
  }
  if (v.empty()) throw DataError("period space '" + meta.period_space + "' is empty");
  return static_cast<int>(v.size());
}

}  // namespace

SequentialModel make_sequential(ir::SymbolicModel model, DataBundle data, PeriodMetadata meta,
                                const inst::InstantiateOptions& options) {
  SequentialModel s;
  s.T = period_count(data, meta);
  s.base = inst::instantiate_efficient(model, data, options);
  s.model = std::move(model);
  s.data = std::move(data);
  s.meta = std::move(meta);
  s.options = options;

  const auto& base = s.base;
  std::map<GroupKey, std::size_t> ids;
  s.var_period.resize(base.num_cols());
  s.var_group.resize(base.num_cols());
  for (std::size_t c = 0; c < base.num_cols(); ++c) {
    const std::string& fam = base.family_name(c);
    auto idx = base.col_index(c);
    s.column_lookup[fam].emplace(TupleKey(idx), c);
    GroupKey key{fam, to_vector(idx)};
    int period = 1;
    auto it = s.meta.variable_period.find(fam);
    if (it != s.meta.variable_period.end()) {
      if (it->second >= idx.size()) {
        throw DataError("period position of '" + fam + "' exceeds its rank");
      }
      Index v = idx[it->second];
      if (v < 1 || v > s.T) {
        throw DataError("column " + column_name(base, c) + " has period outside 1..T");
      }
      period = static_cast<int>(v);
      key.rest.erase(key.rest.begin() + static_cast<std::ptrdiff_t>(it->second));
    }
    s.var_period[c] = period;
    auto [g, fresh] = ids.emplace(std::move(key), s.groups.size());
    if (fresh) {
      s.groups.push_back(g->first);
      s.group_is_state.push_back(s.meta.state_variables.count(fam) ? 1 : 0);
    }
    s.var_group[c] = g->second;
  }
  s.row_period.assign(base.num_rows(), 1);
  for (std::size_t r = 0; r < base.num_rows(); ++r) {
    for (std::size_t c : base.row_cols(r)) s.row_period[r] = std::max(s.row_period[r], s.var_period[c]);
  }
  return s;
}

DataBundle aggregate_data(const DataBundle& data, const PeriodMetadata& meta, int T,
                          const PeriodGroups& groups) {
  if (groups.empty() || groups.front().first != 1 || groups.back().second != T) {
    throw std::invalid_argument("period groups must cover 1..T");
  }
  std::vector<Index> to_group(static_cast<std::size_t>(T) + 1, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto [a, b] = groups[g];
    if (a > b || (g > 0 && a != groups[g - 1].second + 1)) {
      throw std::invalid_argument("period groups must be contiguous, ordered and non-empty");
    }
    for (int t = a; t <= b; ++t) to_group[t] = static_cast<Index>(g + 1);
  }
  for (const auto& [name, pos] : meta.parameter_period) {
    if (!meta.aggregation_policy.count(name)) throw MissingAggregationPolicy(name);
  }
  auto mapped = [&](Index t, const std::string& what) {
    if (t < 1 || t > T) throw DataError(what + " holds period " + std::to_string(t) + " outside 1..T");
    return to_group[static_cast<std::size_t>(t)];
  };

  DataBundle out = data;
  std::vector<Index> periods(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) periods[g] = static_cast<Index>(g + 1);
  out.index_spaces[meta.period_space] = periods;

  for (const auto& [name, pos] : meta.set_periods) {
    auto it = data.index_sets.find(name);
    if (it == data.index_sets.end()) continue;
    const IndexSet& in = it->second;
    for (std::size_t p : pos) {
      if (p >= in.arity()) throw DataError("period position out of range for set '" + name + "'");
    }
    auto pol = meta.set_policy.find(name);
    bool link = pol != meta.set_policy.end() && pol->second == SetPolicy::Link;
    IndexSet agg(in.arity());
    std::set<TupleKey> seen;
    std::vector<Index> t;
    for (std::size_t k = 0; k < in.size(); ++k) {
      t.assign(in[k].begin(), in[k].end());
      bool collapsed = false;
      for (std::size_t a = 0; a < pos.size(); ++a) {
        for (std::size_t b = a + 1; b < pos.size(); ++b) {
          Index x = t[pos[a]], y = t[pos[b]];
          if (x != y && mapped(x, "set " + name) == mapped(y, "set " + name)) collapsed = true;
        }
      }
      if (link && collapsed) continue;
      for (std::size_t p : pos) t[p] = mapped(t[p], "set " + name);
      if (seen.insert(TupleKey(t)).second) agg.push_back(t);
    }
    out.index_sets[name] = std::move(agg);
  }

  for (const auto& [name, pos] : meta.parameter_period) {
    auto it = data.parameters.find(name);
    if (it == data.parameters.end()) continue;
    const ParameterArray& in = it->second;
    if (pos >= in.arity()) throw DataError("period position out of range for parameter '" + name + "'");
    AggregationPolicy policy = meta.aggregation_policy.at(name);
    struct Acc {
      double value;
      Index period;
    };
    std::map<TupleKey, Acc> acc;
    std::vector<TupleKey> order;
    std::vector<Index> key;
    for (std::size_t k = 0; k < in.size(); ++k) {
      key.assign(in.key(k).begin(), in.key(k).end());
      Index orig = key[pos];
      key[pos] = mapped(orig, "parameter " + name);
      TupleKey tk(key);
      double v = in.value(k);
      auto [a, fresh] = acc.emplace(tk, Acc{v, orig});
      if (fresh) {
        order.push_back(tk);
        continue;
      }
      switch (policy) {
        case AggregationPolicy::Sum: a->second.value += v; break;
        case AggregationPolicy::First:
          if (orig < a->second.period) a->second = {v, orig};
          break;
        case AggregationPolicy::Last:
          if (orig >= a->second.period) a->second = {v, orig};
          break;
      }
    }
    ParameterArray agg(in.arity());
    for (const auto& tk : order) agg.set(tk.view(), acc.at(tk).value);
    out.parameters[name] = std::move(agg);
  }
  return out;
}

SequentialModel aggregate_periods(const SequentialModel& seq, const PeriodGroups& groups) {
  DataBundle data = aggregate_data(seq.data, seq.meta, seq.T, groups);
  SequentialModel out = make_sequential(seq.model, std::move(data), seq.meta, seq.options);
  for (std::size_t c = 0; c < out.base.num_cols(); ++c) out.base.set_integer(c, false);
  return out;
}

}  // namespace meadow::decomp
