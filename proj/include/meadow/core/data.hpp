#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "meadow/core/tuple.hpp"

namespace meadow {

/// Concrete set data: a list of fixed-size index tuples stored row-major.
/// Duplicates are legal and kept in order.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t arity) : arity_(arity) {}
  IndexSet(std::size_t arity, std::initializer_list<std::initializer_list<Index>> tuples);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  std::span<const Index> operator[](std::size_t k) const {
    return {values_.data() + k * arity_, arity_};
  }
  void push_back(std::span<const Index> tuple);
  void reserve(std::size_t n) { values_.reserve(n * arity_); }
  std::span<const Index> flat() const { return values_; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::size_t arity_ = 0;
  std::size_t count_ = 0;
  std::vector<Index> values_;
};

/// Sparse numeric array keyed by index tuples. Entries keep insertion order so
/// serialization is deterministic.
class ParameterArray {
 public:
  ParameterArray() = default;
  explicit ParameterArray(std::size_t arity) : arity_(arity) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return values_.size(); }

  /// Inserts or overwrites.
  void set(std::span<const Index> key, double value);
  void set(std::initializer_list<Index> key, double value) {
    set(std::span<const Index>(key.begin(), key.size()), value);
  }
  std::optional<double> find(std::span<const Index> key) const;
  const double* find(const TupleKey& key) const {
    auto it = lookup_.find(key);
    return it == lookup_.end() ? nullptr : &values_[it->second];
  }

  std::span<const Index> key(std::size_t k) const {
    return {keys_.data() + k * arity_, arity_};
  }
  double value(std::size_t k) const { return values_[k]; }

  friend bool operator==(const ParameterArray& a, const ParameterArray& b) {
    return a.arity_ == b.arity_ && a.keys_ == b.keys_ && a.values_ == b.values_;
  }

 private:
  std::size_t arity_ = 0;
  std::vector<Index> keys_;
  std::vector<double> values_;
  std::unordered_map<TupleKey, std::size_t, TupleKeyHash> lookup_;
};

/// Concrete data bound to a symbolic model's placeholders at instantiation.
struct DataBundle {
  std::map<std::string, IndexSet> index_sets;
  std::map<std::string, ParameterArray> parameters;
  /// Value range of each index space (keyed by placeholder domain or name).
  std::map<std::string, std::vector<Index>> index_spaces;
  std::map<std::string, double> scalars;

  const IndexSet* find_set(const std::string& name) const;
  const ParameterArray* find_parameter(const std::string& name) const;
  const std::vector<Index>* find_space(const std::string& name) const;

  friend bool operator==(const DataBundle&, const DataBundle&) = default;
};

/// Membership test over an index space.
class SpaceMembership {
 public:
  SpaceMembership() = default;
  explicit SpaceMembership(std::span<const Index> values)
      : values_(values.begin(), values.end()) {}
  bool contains(Index v) const { return values_.count(v) != 0; }

 private:
  std::unordered_set<Index> values_;
};

}  // namespace meadow
