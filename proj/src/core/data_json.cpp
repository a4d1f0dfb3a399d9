#include "meadow/core/data_json.hpp"

#include <vector>

#include "meadow/core/errors.hpp"

namespace meadow {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw DataError("data" + path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return obj.at(key);
}

Index to_index(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected integer index");
  return v.get<Index>();
}

std::size_t to_arity(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() || v.get<std::size_t>() > kMaxArity) {
    fail(path, "arity must be an integer in [0, " + std::to_string(kMaxArity) + "]");
  }
  return v.get<std::size_t>();
}

}  // namespace

DataBundle parse_data(const json& doc) {
  if (!doc.is_object()) fail("", "document must be an object");
  DataBundle out;
  if (doc.contains("index_spaces")) {
    const json& spaces = doc.at("index_spaces");
    if (!spaces.is_object()) fail("/index_spaces", "expected object");
    for (const auto& [name, values] : spaces.items()) {
      std::string path = "/index_spaces/" + name;
      if (!values.is_array()) fail(path, "expected array");
      std::vector<Index> v;
      v.reserve(values.size());
      for (std::size_t k = 0; k < values.size(); ++k) {
        v.push_back(to_index(values[k], path + "/" + std::to_string(k)));
      }
      out.index_spaces.emplace(name, std::move(v));
    }
  }
  if (doc.contains("index_sets")) {
    const json& sets = doc.at("index_sets");
    if (!sets.is_object()) fail("/index_sets", "expected object");
    for (const auto& [name, body] : sets.items()) {
      std::string path = "/index_sets/" + name;
      std::size_t arity = to_arity(require(body, "arity", path), path + "/arity");
      const json& tuples = require(body, "tuples", path);
      if (!tuples.is_array()) fail(path + "/tuples", "expected array");
      IndexSet set(arity);
      set.reserve(tuples.size());
      std::vector<Index> t(arity);
      for (std::size_t k = 0; k < tuples.size(); ++k) {
        std::string tp = path + "/tuples/" + std::to_string(k);
        const json& row = tuples[k];
        if (!row.is_array() || row.size() != arity) fail(tp, "tuple length must equal arity");
        for (std::size_t p = 0; p < arity; ++p) t[p] = to_index(row[p], tp);
        set.push_back(t);
      }
      out.index_sets.emplace(name, std::move(set));
    }
  }
  if (doc.contains("parameters")) {
    const json& params = doc.at("parameters");
    if (!params.is_object()) fail("/parameters", "expected object");
    for (const auto& [name, body] : params.items()) {
      std::string path = "/parameters/" + name;
      std::size_t arity = to_arity(require(body, "arity", path), path + "/arity");
      const json& entries = require(body, "entries", path);
      if (!entries.is_array()) fail(path + "/entries", "expected array");
      ParameterArray arr(arity);
      std::vector<Index> key(arity);
      for (std::size_t k = 0; k < entries.size(); ++k) {
        std::string ep = path + "/entries/" + std::to_string(k);
        const json& row = entries[k];
        if (!row.is_array() || row.size() != arity + 1) {
          fail(ep, "entry must be [index..., value]");
        }
        for (std::size_t p = 0; p < arity; ++p) key[p] = to_index(row[p], ep);
        if (!row[arity].is_number()) fail(ep, "value must be a number");
        if (arr.find(key)) fail(ep, "duplicate key " + format_tuple(key));
        arr.set(key, row[arity].get<double>());
      }
      out.parameters.emplace(name, std::move(arr));
    }
  }
  if (doc.contains("scalars")) {
    const json& scalars = doc.at("scalars");
    if (!scalars.is_object()) fail("/scalars", "expected object");
    for (const auto& [name, v] : scalars.items()) {
      if (!v.is_number()) fail("/scalars/" + name, "expected number");
      out.scalars.emplace(name, v.get<double>());
    }
  }
  return out;
}

DataBundle parse_data_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("data: malformed JSON: ") + e.what());
  }
  return parse_data(doc);
}

nlohmann::ordered_json emit_data(const DataBundle& data) {
  using ojson = nlohmann::ordered_json;
  ojson doc = ojson::object();
  ojson spaces = ojson::object();
  for (const auto& [name, values] : data.index_spaces) spaces[name] = values;
  doc["index_spaces"] = std::move(spaces);

  ojson sets = ojson::object();
  for (const auto& [name, set] : data.index_sets) {
    ojson tuples = ojson::array();
    for (std::size_t k = 0; k < set.size(); ++k) {
      auto t = set[k];
      tuples.push_back(std::vector<Index>(t.begin(), t.end()));
    }
    sets[name] = ojson{{"arity", set.arity()}, {"tuples", std::move(tuples)}};
  }
  doc["index_sets"] = std::move(sets);

  ojson params = ojson::object();
  for (const auto& [name, arr] : data.parameters) {
    ojson entries = ojson::array();
    for (std::size_t k = 0; k < arr.size(); ++k) {
      ojson row = ojson::array();
      for (Index v : arr.key(k)) row.push_back(v);
      row.push_back(arr.value(k));
      entries.push_back(std::move(row));
    }
    params[name] = ojson{{"arity", arr.arity()}, {"entries", std::move(entries)}};
  }
  doc["parameters"] = std::move(params);

  ojson scalars = ojson::object();
  for (const auto& [name, v] : data.scalars) scalars[name] = v;
  doc["scalars"] = std::move(scalars);
  return doc;
}

}  // namespace meadow
