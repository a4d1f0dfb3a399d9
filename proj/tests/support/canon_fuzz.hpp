#pragma once

// Random CanonicalModels with awkward numerics, for serialization tests.

#include <bit>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "meadow/core/canonical.hpp"
#include "meadow/gen/generators.hpp"

namespace canon_fuzz {

using meadow::CanonicalModel;
using meadow::Entry;
using meadow::Index;
using meadow::kInf;
using meadow::gen::SplitMix64;

/// Finite, nonzero; mixes small integers, decimals and raw bit patterns
/// (subnormals included).
inline double awkward(SplitMix64& rng) {
  switch (rng.below(4)) {
    case 0: {
      double v = static_cast<double>(rng.between(-9, 9));
      return v == 0.0 ? 1.0 : v;
    }
    case 1:
      return static_cast<double>(rng.between(-100000, 100000)) / 1000.0 + 0.001;
    default: {
      while (true) {
        double v = std::bit_cast<double>(rng.next());
        if (std::isfinite(v) && v != 0.0) return v;
      }
    }
  }
}

inline CanonicalModel random_model(SplitMix64& rng, std::size_t max_cols = 40,
                                   std::size_t max_rows = 30) {
  static const char* families[] = {"x", "y", "flow"};
  CanonicalModel m;
  std::set<std::pair<std::string, std::vector<Index>>> keys;
  std::size_t ncols = rng.below(max_cols + 1);
  for (std::size_t c = 0; c < ncols; ++c) {
    std::string fam = families[rng.below(3)];
    std::vector<Index> idx(rng.below(4));
    for (auto& v : idx) v = rng.between(-3, 12);
    if (!keys.insert({fam, idx}).second) continue;
    double lo = 0.0, up = kInf;
    switch (rng.below(6)) {
      case 0: lo = -kInf; break;
      case 1: lo = up = awkward(rng); break;
      case 2: lo = -kInf; up = awkward(rng); break;
      case 3: lo = -std::abs(awkward(rng)); up = std::abs(awkward(rng)); break;
      case 4: lo = awkward(rng); break;
      default: break;
    }
    double cost = rng.below(3) == 0 ? 0.0 : awkward(rng);
    m.add_column(fam, idx, lo, up, rng.below(4) == 0, cost);
  }
  std::size_t nrows = rng.below(max_rows + 1);
  for (std::size_t r = 0; r < nrows; ++r) {
    std::vector<Entry> e;
    for (std::size_t c = 0; c < m.num_cols(); ++c) {
      if (rng.below(4) == 0) e.push_back({c, awkward(rng)});
    }
    std::vector<Index> g(rng.below(3));
    for (auto& v : g) v = rng.between(-5, 50);
    double rhs = rng.below(5) == 0 ? -0.0 : (rng.below(4) == 0 ? 0.0 : awkward(rng));
    m.add_row(e, static_cast<meadow::Sign>(rng.below(3)), rhs, 1 + rng.below(4), g);
  }
  return m;
}

}  // namespace canon_fuzz
