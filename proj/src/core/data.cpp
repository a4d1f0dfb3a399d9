#include "meadow/core/data.hpp"

#include <stdexcept>
#include <string>

#include "meadow/core/errors.hpp"

namespace meadow {

std::string format_tuple(std::span<const Index> t) {
  std::string out = "(";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(t[k]);
  }
  out += ')';
  return out;
}

IndexSet::IndexSet(std::size_t arity,
                   std::initializer_list<std::initializer_list<Index>> tuples)
    : arity_(arity) {
  for (const auto& t : tuples) {
    push_back(std::span<const Index>(t.begin(), t.size()));
  }
}

void IndexSet::push_back(std::span<const Index> tuple) {
  if (tuple.size() != arity_) {
    throw DataError("tuple " + format_tuple(tuple) + " does not match set arity " +
                    std::to_string(arity_));
  }
  values_.insert(values_.end(), tuple.begin(), tuple.end());
  ++count_;
}

void ParameterArray::set(std::span<const Index> key, double value) {
  if (key.size() != arity_) {
    throw DataError("key " + format_tuple(key) + " does not match parameter arity " +
                    std::to_string(arity_));
  }
  TupleKey k(key);
  auto [it, inserted] = lookup_.try_emplace(k, values_.size());
  if (!inserted) {
    values_[it->second] = value;
    return;
  }
  keys_.insert(keys_.end(), key.begin(), key.end());
  values_.push_back(value);
}

std::optional<double> ParameterArray::find(std::span<const Index> key) const {
  if (key.size() != arity_) return std::nullopt;
  const double* v = find(TupleKey(key));
  if (!v) return std::nullopt;
  return *v;
}

const IndexSet* DataBundle::find_set(const std::string& name) const {
  auto it = index_sets.find(name);
  return it == index_sets.end() ? nullptr : &it->second;
}

const ParameterArray* DataBundle::find_parameter(const std::string& name) const {
  auto it = parameters.find(name);
  return it == parameters.end() ? nullptr : &it->second;
}

const std::vector<Index>* DataBundle::find_space(const std::string& name) const {
  auto it = index_spaces.find(name);
  return it == index_spaces.end() ? nullptr : &it->second;
}

}  // namespace meadow
