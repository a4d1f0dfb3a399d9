#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "meadow/core/errors.hpp"
#include "meadow/inst/instantiate.hpp"

namespace meadow::inst {

using namespace meadow::ir;

namespace {

using KeyMap = std::unordered_map<TupleKey, std::uint32_t, TupleKeyHash>;

// Open-addressing index into a key vector; ids are positions in `keys`.
class FlatIndex {
 public:
  explicit FlatIndex(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    slots_.assign(cap, kEmpty);
  }
  /// Id of `key`, appending it to `keys` when new.
  std::pair<std::uint32_t, bool> insert(const TupleKey& key, std::vector<TupleKey>& keys) {
    if (2 * (keys.size() + 1) > slots_.size()) grow(keys);
    std::size_t mask = slots_.size() - 1;
    for (std::size_t h = TupleKeyHash{}(key) & mask;; h = (h + 1) & mask) {
      if (slots_[h] == kEmpty) {
        slots_[h] = static_cast<std::uint32_t>(keys.size());
        keys.push_back(key);
        return {slots_[h], true};
      }
      if (keys[slots_[h]] == key) return {slots_[h], false};
    }
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;
  void grow(const std::vector<TupleKey>& keys) {
    std::vector<std::uint32_t> old(slots_.size() * 2, kEmpty);
    old.swap(slots_);
    std::size_t mask = slots_.size() - 1;
    for (std::uint32_t id : old) {
      if (id == kEmpty) continue;
      std::size_t h = TupleKeyHash{}(keys[id]) & mask;
      while (slots_[h] != kEmpty) h = (h + 1) & mask;
      slots_[h] = id;
    }
  }
  std::vector<std::uint32_t> slots_;
};

// Family first, then the index compared from its last position backwards.
bool column_less(const TupleKey& a, const TupleKey& b) {
  if (a.v[0] != b.v[0]) return a.v[0] < b.v[0];
  for (std::size_t k = a.size; k-- > 1;) {
    if (a.v[k] != b.v[k]) return a.v[k] < b.v[k];
  }
  return false;
}

TupleKey column_key(std::uint32_t family, std::span<const Index> idx) {
  TupleKey key;
  key.push_back(family);
  for (Index v : idx) key.push_back(v);
  return key;
}

struct Catalog {
  std::vector<TupleKey> keys;  // final order
  KeyMap lookup;               // dense mode only
  /// Column of every term, per block.
  std::vector<std::vector<std::uint32_t>> term_col;
};

Catalog sparse_catalog(const TermStreams& terms) {
  Catalog cat;
  std::size_t total = 0;
  for (const auto& buf : terms.blocks) total += buf.size();
  std::vector<TupleKey> keys;
  keys.reserve(total);
  FlatIndex first_seen(total);
  cat.term_col.resize(terms.blocks.size());
  for (std::size_t b = 0; b < terms.blocks.size(); ++b) {
    const auto& buf = terms.blocks[b];
    auto& cols = cat.term_col[b];
    cols.resize(buf.size());
    for (std::size_t k = 0; k < buf.size(); ++k) {
      cols[k] = first_seen.insert(column_key(buf.families[k], buf.index(k)), keys).first;
    }
  }
  // Sorting the records themselves keeps the sort's memory access sequential.
  struct Record {
    TupleKey key;
    std::uint32_t id;
  };
  std::vector<Record> records(keys.size());
  for (std::size_t c = 0; c < keys.size(); ++c) records[c] = {keys[c], static_cast<std::uint32_t>(c)};
  std::sort(records.begin(), records.end(),
            [](const Record& a, const Record& b) { return column_less(a.key, b.key); });
  std::vector<std::uint32_t> final_of(keys.size());
  cat.keys.resize(keys.size());
  for (std::size_t c = 0; c < records.size(); ++c) {
    final_of[records[c].id] = static_cast<std::uint32_t>(c);
    cat.keys[c] = records[c].key;
  }
  for (auto& cols : cat.term_col) {
    for (auto& c : cols) c = final_of[c];
  }
  return cat;
}

Catalog dense_catalog(const PreparedModel& p) {
  Catalog cat;
  const DataBundle& data = *p.data;
  for (std::size_t f = 0; f < p.model.variables.size(); ++f) {
    const VariableDecl& v = p.model.variables[f];
    if (v.domains.size() != v.rank) {
      throw DataError("dense columns need domains for variable '" + v.name + "'");
    }
    std::vector<const std::vector<Index>*> spaces;
    bool empty = false;
    for (const auto& d : v.domains) {
      const std::vector<Index>* s = data.find_space(d);
      if (!s) throw MissingSpace(d);
      empty |= s->empty();
      spaces.push_back(s);
    }
    if (empty) continue;
    // Odometer with the first index fastest.
    std::vector<std::size_t> pos(v.rank, 0);
    while (true) {
      TupleKey key;
      key.push_back(static_cast<Index>(f));
      for (std::size_t k = 0; k < v.rank; ++k) key.push_back((*spaces[k])[pos[k]]);
      cat.lookup.emplace(key, static_cast<std::uint32_t>(cat.keys.size()));
      cat.keys.push_back(key);
      std::size_t k = 0;
      while (k < v.rank && ++pos[k] == spaces[k]->size()) pos[k++] = 0;
      if (k == v.rank) break;
    }
  }
  return cat;
}

std::uint32_t column_of(const Catalog& cat, const PreparedModel& p, std::uint32_t family,
                        std::span<const Index> idx) {
  auto it = cat.lookup.find(column_key(family, idx));
  if (it == cat.lookup.end()) {
    throw DataError("column " + p.model.variables[family].name + format_tuple(idx) +
                    " lies outside the declared variable domains");
  }
  return it->second;
}

bool in_spaces(std::span<const Index> g, const std::vector<const std::vector<Index>*>& spaces,
               const std::vector<SpaceMembership>& members) {
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (spaces[k] && !members[k].contains(g[k])) return false;
  }
  return true;
}

double bound_value(const BoundValue& b, const DataBundle& data, std::span<const Index> idx,
                   double fallback) {
  if (!b.parameter) return b.value;
  if (auto it = data.scalars.find(*b.parameter); it != data.scalars.end()) return it->second;
  const ParameterArray* a = data.find_parameter(*b.parameter);
  if (!a) throw DataError("no data for parameter '" + *b.parameter + "'");
  auto v = a->find(idx);
  return v ? *v : fallback;
}

}  // namespace

CanonicalModel build_canonical(const PreparedModel& p, const TermStreams& terms,
                               const InstantiateOptions& opts) {
  const DataBundle& data = *p.data;
  Catalog cat = opts.columns == ColumnMode::Dense ? dense_catalog(p) : sparse_catalog(terms);
  if (cat.term_col.empty()) {
    cat.term_col.resize(terms.blocks.size());
    for (std::size_t b = 0; b < terms.blocks.size(); ++b) {
      const auto& buf = terms.blocks[b];
      cat.term_col[b].resize(buf.size());
      for (std::size_t k = 0; k < buf.size(); ++k) {
        cat.term_col[b][k] = column_of(cat, p, buf.families[k], buf.index(k));
      }
    }
  }

  CanonicalModel out;
  std::size_t total_terms = 0;
  for (const auto& b : terms.blocks) total_terms += b.size();
  out.reserve(0, total_terms);

  // Columns with default bounds, integrality and objective.
  std::vector<double> cost(cat.keys.size(), 0.0);
  if (!terms.blocks.empty()) {
    const TermBuffer& obj = terms.blocks[0];
    for (std::size_t k = 0; k < obj.size(); ++k) {
      cost[cat.term_col[0][k]] += obj.coefficients[k];
    }
  }
  for (std::size_t c = 0; c < cat.keys.size(); ++c) {
    const TupleKey& key = cat.keys[c];
    const VariableDecl& v = p.model.variables[static_cast<std::size_t>(key.v[0])];
    std::span<const Index> idx(key.v.data() + 1, key.size - 1);
    double lo = 0.0, up = kInf;
    for (const auto& b : p.model.bounds) {
      if (b.variable != v.name) continue;
      if (b.lower) lo = bound_value(*b.lower, data, idx, lo);
      if (b.upper) up = bound_value(*b.upper, data, idx, up);
    }
    double cc = cost[c] == 0.0 ? 0.0 : cost[c];
    out.add_column(v.name, idx, lo, up, v.integer, cc);
  }

  std::vector<std::size_t> row_cols;
  std::vector<double> row_vals;
  for (std::size_t b = 1; b < p.num_blocks(); ++b) {
    const ConstraintBlock& cb = p.model.constraints[b - 1];
    const MultidimExpression& e = p.blocks[b].expr;
    const TermBuffer& buf = terms.blocks[b];

    std::vector<const std::vector<Index>*> spaces;
    std::vector<SpaceMembership> members;
    for (const auto& g : e.global_indices) {
      const IndexPlaceholder* ph = p.model.find_placeholder(g);
      const std::vector<Index>* s = data.find_space(ph ? ph->space_name() : g);
      spaces.push_back(s);
      members.emplace_back(s ? SpaceMembership(*s) : SpaceMembership());
    }

    const ParameterArray* rhs_param = nullptr;
    double rhs_const = cb.rhs.value;
    if (cb.rhs.parameter) {
      const DataPlaceholder* d = p.model.find_constant(*cb.rhs.parameter);
      if (d && d->kind == DataKind::Scalar) {
        auto it = data.scalars.find(*cb.rhs.parameter);
        if (it == data.scalars.end()) throw MissingParameter(*cb.rhs.parameter, {});
        rhs_const = it->second;
      } else {
        rhs_param = data.find_parameter(*cb.rhs.parameter);
        if (!rhs_param) throw DataError("no data for parameter '" + *cb.rhs.parameter + "'");
      }
    }

    // Row keys: realized G* first, then rhs-only keys, then sort.
    std::vector<TupleKey> rows;
    FlatIndex row_of(buf.size());
    std::vector<std::uint32_t> term_row(buf.size());
    for (std::size_t k = 0; k < buf.size(); ++k) {
      term_row[k] = row_of.insert(TupleKey(buf.global(k)), rows).first;
    }
    const std::size_t realized = rows.size();
    std::vector<char> is_realized;
    std::vector<std::uint32_t> remap;  // provisional -> final
    if (opts.rows == RowMode::Dense) {
      IndexSet space = space_product(p.model, e.global_indices, data);
      std::vector<TupleKey> all;
      all.reserve(space.size());
      for (std::size_t k = 0; k < space.size(); ++k) all.emplace_back(space[k]);
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      KeyMap final_of;
      for (std::size_t r = 0; r < all.size(); ++r) final_of.emplace(all[r], static_cast<std::uint32_t>(r));
      remap.resize(realized);
      is_realized.assign(all.size(), 0);
      for (std::size_t r = 0; r < realized; ++r) {
        auto it = final_of.find(rows[r]);
        if (it == final_of.end()) {
          throw DataError("row " + format_tuple(rows[r].view()) + " lies outside space(G)");
        }
        remap[r] = it->second;
        is_realized[it->second] = 1;
      }
      rows = std::move(all);
    } else {
      if (rhs_param) {
        for (std::size_t k = 0; k < rhs_param->size(); ++k) {
          if (rhs_param->value(k) == 0.0) continue;
          auto key = rhs_param->key(k);
          if (!in_spaces(key, spaces, members)) continue;
          row_of.insert(TupleKey(key), rows);
        }
      }
      std::vector<std::uint32_t> perm(rows.size());
      std::iota(perm.begin(), perm.end(), 0u);
      std::sort(perm.begin(), perm.end(),
                [&](std::uint32_t a, std::uint32_t b) { return rows[a] < rows[b]; });
      remap.assign(rows.size(), 0);
      std::vector<TupleKey> sorted(rows.size());
      is_realized.assign(rows.size(), 0);
      for (std::size_t r = 0; r < perm.size(); ++r) {
        remap[perm[r]] = static_cast<std::uint32_t>(r);
        sorted[r] = rows[perm[r]];
        is_realized[r] = perm[r] < realized;
      }
      rows = std::move(sorted);
    }

    // Stable counting sort of terms by final row.
    std::vector<std::size_t> start(rows.size() + 1, 0);
    for (std::size_t k = 0; k < buf.size(); ++k) ++start[remap[term_row[k]] + 1];
    for (std::size_t r = 0; r < rows.size(); ++r) start[r + 1] += start[r];
    std::vector<std::uint32_t> by_row(buf.size());
    {
      std::vector<std::size_t> fill(start.begin(), start.end() - 1);
      for (std::size_t k = 0; k < buf.size(); ++k) {
        by_row[fill[remap[term_row[k]]]++] = static_cast<std::uint32_t>(k);
      }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // (col, term)
    for (std::size_t r = 0; r < rows.size(); ++r) {
      entries.clear();
      for (std::size_t k = start[r]; k < start[r + 1]; ++k) {
        std::uint32_t t = by_row[k];
        entries.emplace_back(cat.term_col[b][t], t);
      }
      // Terms keep stream order within a column.
      std::sort(entries.begin(), entries.end());
      row_cols.clear();
      row_vals.clear();
      for (std::size_t k = 0; k < entries.size();) {
        std::uint32_t col = entries[k].first;
        double acc = 0.0;
        for (; k < entries.size() && entries[k].first == col; ++k) {
          acc += buf.coefficients[entries[k].second];
        }
        if (acc != 0.0) {
          row_cols.push_back(col);
          row_vals.push_back(acc);
        }
      }
      double rhs = rhs_const;
      if (rhs_param) {
        const double* v = rhs_param->find(rows[r]);
        if (v) {
          rhs = *v;
        } else if (is_realized[r] && !opts.missing_rhs_is_zero) {
          throw MissingRhs(b, to_vector(rows[r].view()));
        } else {
          rhs = 0.0;
        }
      }
      if (rhs == 0.0) rhs = 0.0;
      out.append_row_raw(row_cols, row_vals, cb.sign, rhs, b, rows[r].view());
    }
  }
  return out;
}

}  // namespace meadow::inst
