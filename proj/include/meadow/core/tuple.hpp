#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace meadow {

/// Concrete value of an index placeholder.
using Index = std::int64_t;

/// Longest index tuple a set, parameter array or column key may carry.
inline constexpr std::size_t kMaxArity = 8;

/// Fixed-capacity index tuple used as a hash key. Unused slots stay zero so
/// the defaulted equality is exact.
struct TupleKey {
  std::array<Index, kMaxArity> v{};
  std::uint8_t size = 0;

  TupleKey() = default;
  explicit TupleKey(std::span<const Index> values) {
    if (values.size() > kMaxArity) {
      throw std::length_error("tuple longer than kMaxArity");
    }
    std::copy(values.begin(), values.end(), v.begin());
    size = static_cast<std::uint8_t>(values.size());
  }
  TupleKey(std::initializer_list<Index> values)
      : TupleKey(std::span<const Index>(values.begin(), values.size())) {}

  void push_back(Index x) {
    if (size == kMaxArity) {
      throw std::length_error("tuple longer than kMaxArity");
    }
    v[size++] = x;
  }

  std::span<const Index> view() const { return {v.data(), size}; }
  Index operator[](std::size_t k) const { return v[k]; }

  friend bool operator==(const TupleKey&, const TupleKey&) = default;
  friend std::strong_ordering operator<=>(const TupleKey& a, const TupleKey& b) {
    return std::lexicographical_compare_three_way(
        a.v.begin(), a.v.begin() + a.size, b.v.begin(), b.v.begin() + b.size);
  }
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct TupleKeyHash {
  std::size_t operator()(const TupleKey& k) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL * (k.size + 1);
    for (std::size_t i = 0; i < k.size; ++i) {
      h = mix64(h ^ static_cast<std::uint64_t>(k.v[i]));
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<Index> to_vector(std::span<const Index> s) {
  return {s.begin(), s.end()};
}

}  // namespace meadow
