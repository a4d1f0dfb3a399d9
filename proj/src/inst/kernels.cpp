#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include "meadow/core/errors.hpp"
#include "meadow/inst/instantiate.hpp"
#include "meadow/ir/validate.hpp"

namespace meadow::inst {

using namespace meadow::ir;

void TermBuffer::append(const TermBuffer& other) {
  if (other.size() == 0) return;
  globals.insert(globals.end(), other.globals.begin(), other.globals.end());
  families.insert(families.end(), other.families.begin(), other.families.end());
  const std::size_t base = indices.size();
  indices.insert(indices.end(), other.indices.begin(), other.indices.end());
  for (std::size_t k = 1; k < other.index_begin.size(); ++k) {
    index_begin.push_back(base + other.index_begin[k]);
  }
  coefficients.insert(coefficients.end(), other.coefficients.begin(), other.coefficients.end());
}

void TermBuffer::clear() {
  globals.clear();
  families.clear();
  index_begin.assign(1, 0);
  indices.clear();
  coefficients.clear();
}

std::uint32_t PreparedModel::family(const std::string& variable) const {
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    if (model.variables[k].name == variable) return static_cast<std::uint32_t>(k);
  }
  throw std::out_of_range("unknown variable '" + variable + "'");
}

PreparedModel prepare(const SymbolicModel& model, const DataBundle& data) {
  PreparedModel p;
  p.model = prepare_model(model);
  p.data = &data;
  for (const auto& c : p.model.constants) {
    if (c.kind == DataKind::IndexSet) {
      if (const IndexSet* s = data.find_set(c.name); s && s->arity() != c.arity) {
        throw DataError("index set '" + c.name + "' has arity " + std::to_string(s->arity()) +
                        ", declared " + std::to_string(c.arity));
      }
    } else if (c.kind == DataKind::ParameterArray) {
      if (const ParameterArray* a = data.find_parameter(c.name); a && a->arity() != c.arity) {
        throw DataError("parameter '" + c.name + "' has arity " + std::to_string(a->arity()) +
                        ", declared " + std::to_string(c.arity));
      }
    }
  }
  p.blocks.reserve(p.model.constraints.size() + 1);
  if (const MultidimExpression* obj = p.model.objective()) {
    p.blocks.push_back(normalize(p.model, *obj, data));
    p.has_objective = true;
  } else {
    p.blocks.emplace_back();
  }
  for (const auto& c : p.model.constraints) {
    p.blocks.push_back(normalize(p.model, *p.model.find_expression(c.expression), data));
  }
  return p;
}

namespace {

enum class Kind : std::uint8_t { Add, Sub, Sum, Term };

struct CNode {
  Kind kind;
  std::size_t a = 0, b = 0;  // children (Sum uses a)
  // Sum.
  std::size_t sum_id = 0;
  const IndexSet* set = nullptr;
  std::vector<std::size_t> binding;  // slot per tuple position
  std::vector<std::size_t> key_pos;  // positions bound before this sum (static)
  std::vector<std::size_t> new_pos;  // positions this sum binds
  // Term.
  std::uint32_t family = 0;
  std::vector<std::size_t> index_slots;
  double factor = 1.0;
  const ParameterArray* param = nullptr;
  double scalar = 1.0;
  std::vector<std::size_t> coef_slots;
  std::string param_name;
};

// Expression compiled against slots: globals occupy slots 0..|G|-1.
struct Program {
  std::vector<CNode> nodes;
  std::size_t root = 0;
  std::size_t num_slots = 0;
  std::size_t num_globals = 0;
  std::vector<const std::vector<Index>*> global_spaces;  // nullptr when unknown
};

Program compile(const PreparedModel& p, const MultidimExpression& e,
                const std::map<std::string, IndexSet>& overlay, bool require_spaces) {
  const SymbolicModel& m = p.model;
  const DataBundle& data = *p.data;
  Program prog;
  std::map<std::string, std::size_t> slot;
  for (const auto& g : e.global_indices) slot.emplace(g, slot.size());
  prog.num_globals = e.global_indices.size();
  for (const auto& g : e.global_indices) {
    const IndexPlaceholder* ph = m.find_placeholder(g);
    const std::vector<Index>* sp = data.find_space(ph ? ph->space_name() : g);
    if (!sp && require_spaces) throw MissingSpace(g);
    prog.global_spaces.push_back(sp);
  }
  auto slot_of = [&](const std::string& name) {
    auto [it, inserted] = slot.try_emplace(name, slot.size());
    return it->second;
  };
  for (const auto& node : e.nodes) {
    CNode c;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, AddNode>) {
            c.kind = Kind::Add;
            c.a = v.left;
            c.b = v.right;
          } else if constexpr (std::is_same_v<T, SubNode>) {
            c.kind = Kind::Sub;
            c.a = v.left;
            c.b = v.right;
          } else if constexpr (std::is_same_v<T, SumNode>) {
            c.kind = Kind::Sum;
            c.a = v.child;
            c.sum_id = v.sum_id;
            c.set = &resolve_set(v.set, overlay, data);
            if (c.set->arity() != v.binding.size()) {
              throw DataError("index set '" + v.set + "' arity does not match its binding");
            }
            for (const auto& b : v.binding) c.binding.push_back(slot_of(b));
          } else {
            c.kind = Kind::Term;
            c.family = p.family(v.variable);
            for (const auto& i : v.index) c.index_slots.push_back(slot_of(i));
            c.factor = v.coefficient.factor;
            if (v.coefficient.parameter) {
              const std::string& name = *v.coefficient.parameter;
              c.param_name = name;
              const DataPlaceholder* d = m.find_constant(name);
              if (d && d->kind == DataKind::Scalar) {
                auto it = data.scalars.find(name);
                if (it == data.scalars.end()) throw MissingParameter(name, {});
                c.scalar = it->second;
              } else {
                c.param = data.find_parameter(name);
                if (!c.param) throw DataError("no data for parameter '" + name + "'");
                for (const auto& i : v.coefficient.index) c.coef_slots.push_back(slot_of(i));
              }
            }
          }
        },
        node);
    prog.nodes.push_back(std::move(c));
  }
  prog.root = e.root;
  prog.num_slots = slot.size();
  return prog;
}

// Static analysis for the efficient kernel: which binding positions are already bound when
// a sum is reached, and check that every term sees all of G.
void analyze(Program& prog, std::size_t id, std::vector<char>& bound) {
  CNode& c = prog.nodes[id];
  switch (c.kind) {
    case Kind::Add:
    case Kind::Sub:
      analyze(prog, c.a, bound);
      analyze(prog, c.b, bound);
      break;
    case Kind::Sum: {
      std::vector<std::size_t> fresh;
      for (std::size_t pos = 0; pos < c.binding.size(); ++pos) {
        if (bound[c.binding[pos]]) {
          c.key_pos.push_back(pos);
        } else {
          c.new_pos.push_back(pos);
          fresh.push_back(c.binding[pos]);
        }
      }
      for (auto s : fresh) bound[s] = 1;
      analyze(prog, c.a, bound);
      for (auto s : fresh) bound[s] = 0;
      break;
    }
    case Kind::Term:
      for (std::size_t g = 0; g < prog.num_globals; ++g) {
        if (!bound[g]) throw std::logic_error("term reached with an unbound global");
      }
      break;
  }
}

double coefficient(const CNode& c, const std::vector<Index>& values, double sign) {
  double p = 1.0;
  if (c.param) {
    TupleKey key;
    for (auto s : c.coef_slots) key.push_back(values[s]);
    const double* v = c.param->find(key);
    if (!v) throw MissingParameter(c.param_name, to_vector(key.view()));
    p = *v;
  } else if (!c.param_name.empty()) {
    p = c.scalar;
  }
  double v = c.factor * p;
  return sign < 0 ? -v : v;
}

void emit(const Program& prog, const CNode& c, const std::vector<Index>& values, double sign,
          TermBuffer& out) {
  TupleKey idx;
  for (auto s : c.index_slots) idx.push_back(values[s]);
  out.push({values.data(), prog.num_globals}, c.family, idx.view(),
           coefficient(c, values, sign));
}

// ------------------------------------------------------------ exhaustive

struct Exhaustive {
  const Program& prog;
  std::vector<Index> values;
  std::vector<char> bound;
  TermBuffer& out;

  void run(std::size_t id, double sign) {
    const CNode& c = prog.nodes[id];
    switch (c.kind) {
      case Kind::Add:
        run(c.a, sign);
        run(c.b, sign);
        return;
      case Kind::Sub:
        run(c.a, sign);
        run(c.b, -sign);
        return;
      case Kind::Term:
        emit(prog, c, values, sign, out);
        return;
      case Kind::Sum: {
        const IndexSet& set = *c.set;
        const std::size_t n = c.binding.size();
        std::size_t fresh[kMaxArity];
        for (std::size_t k = 0; k < set.size(); ++k) {
          auto t = set[k];
          bool match = true;
          std::size_t nf = 0;
          for (std::size_t pos = 0; pos < n; ++pos) {
            std::size_t s = c.binding[pos];
            if (bound[s]) {
              if (values[s] != t[pos]) {
                match = false;
                break;
              }
            } else {
              fresh[nf++] = s;
              values[s] = t[pos];
              bound[s] = 1;
            }
          }
          if (match) run(c.a, sign);
          for (std::size_t f = 0; f < nf; ++f) bound[fresh[f]] = 0;
        }
        return;
      }
    }
  }
};

// ------------------------------------------------------------- efficient

// Tuples of one sum grouped by the values at its statically bound positions.
struct SumIndex {
  std::vector<std::uint32_t> order;  // tuple ids grouped, original order within a group
  std::unordered_map<TupleKey, std::pair<std::uint32_t, std::uint32_t>, TupleKeyHash> groups;
  bool keyed = false;
};

SumIndex build_index(const CNode& c, const std::vector<std::uint32_t>* allowed) {
  SumIndex idx;
  const IndexSet& set = *c.set;
  auto for_each_id = [&](auto&& f) {
    if (allowed) {
      for (std::uint32_t id : *allowed) f(id);
    } else {
      for (std::uint32_t id = 0; id < set.size(); ++id) f(id);
    }
  };
  if (c.key_pos.empty()) {
    if (allowed) {
      idx.order = *allowed;
    } else {
      idx.order.resize(set.size());
      for (std::uint32_t id = 0; id < set.size(); ++id) idx.order[id] = id;
    }
    return idx;
  }
  idx.keyed = true;
  auto key_of = [&](std::uint32_t id) {
    TupleKey key;
    auto t = set[id];
    for (auto pos : c.key_pos) key.push_back(t[pos]);
    return key;
  };
  // Count per group, then scatter into a CSR layout.
  std::vector<std::uint32_t> group_of;
  std::vector<std::uint32_t> counts;
  group_of.reserve(allowed ? allowed->size() : set.size());
  idx.groups.reserve(allowed ? allowed->size() : set.size());
  for_each_id([&](std::uint32_t id) {
    auto [it, inserted] = idx.groups.try_emplace(key_of(id), static_cast<std::uint32_t>(counts.size()), 0);
    if (inserted) counts.push_back(0);
    ++counts[it->second.first];
    group_of.push_back(it->second.first);
  });
  std::vector<std::uint32_t> start(counts.size() + 1, 0);
  for (std::size_t g = 0; g < counts.size(); ++g) start[g + 1] = start[g] + counts[g];
  for (auto& [key, range] : idx.groups) {
    std::uint32_t g = range.first;
    range = {start[g], start[g + 1]};
  }
  idx.order.resize(group_of.size());
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  std::size_t k = 0;
  for_each_id([&](std::uint32_t id) { idx.order[fill[group_of[k++]]++] = id; });
  return idx;
}

struct Efficient {
  const Program& prog;
  std::vector<SumIndex> indexes;  // per node (only sums populated)
  std::vector<SpaceMembership> spaces;
  std::vector<char> has_space;
  std::vector<Index> values;
  TermBuffer& out;

  void run(std::size_t id, double sign) {
    const CNode& c = prog.nodes[id];
    switch (c.kind) {
      case Kind::Add:
        run(c.a, sign);
        run(c.b, sign);
        return;
      case Kind::Sub:
        run(c.a, sign);
        run(c.b, -sign);
        return;
      case Kind::Term:
        emit(prog, c, values, sign, out);
        return;
      case Kind::Sum: {
        const SumIndex& idx = indexes[id];
        std::uint32_t begin = 0, end = static_cast<std::uint32_t>(idx.order.size());
        if (idx.keyed) {
          TupleKey key;
          for (auto pos : c.key_pos) key.push_back(values[c.binding[pos]]);
          auto it = idx.groups.find(key);
          if (it == idx.groups.end()) return;
          begin = it->second.first;
          end = it->second.second;
        }
        const IndexSet& set = *c.set;
        for (std::uint32_t k = begin; k < end; ++k) {
          auto t = set[idx.order[k]];
          bool ok = true;
          for (auto pos : c.new_pos) {
            std::size_t s = c.binding[pos];
            values[s] = t[pos];
            if (s < prog.num_globals && has_space[s] && !spaces[s].contains(t[pos])) ok = false;
          }
          if (ok) run(c.a, sign);
        }
        return;
      }
    }
  }
};

}  // namespace

TermStreams exhaustive_terms(const PreparedModel& p) {
  TermStreams out;
  out.blocks.resize(p.num_blocks());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const MultidimExpression* e = nullptr;
    if (b == 0) {
      e = p.model.objective();
    } else {
      e = p.model.find_expression(p.model.constraints[b - 1].expression);
    }
    TermBuffer& buf = out.blocks[b];
    buf.global_arity = e ? e->global_indices.size() : 0;
    if (!e) continue;
    // The original expression: no derived sets.
    static const std::map<std::string, IndexSet> kNoOverlay;
    Program prog = compile(p, *e, kNoOverlay, true);
    Exhaustive ex{prog, std::vector<Index>(prog.num_slots, 0),
                  std::vector<char>(prog.num_slots, 0), buf};
    IndexSet space = space_product(p.model, e->global_indices, *p.data);
    for (std::size_t g = 0; g < prog.num_globals; ++g) ex.bound[g] = 1;
    for (std::size_t k = 0; k < space.size(); ++k) {
      auto gs = space[k];
      std::copy(gs.begin(), gs.end(), ex.values.begin());
      ex.run(prog.root, 1.0);
    }
  }
  return out;
}

void efficient_block_terms(const PreparedModel& p, std::size_t block,
                           const std::map<std::size_t, std::vector<std::uint32_t>>* filter,
                           TermBuffer& out) {
  const NormalizedExpression& ne = p.blocks[block];
  out.global_arity = ne.expr.global_indices.size();
  if (ne.expr.nodes.empty()) return;
  Program prog = compile(p, ne.expr, ne.derived_sets, false);
  std::vector<char> bound(prog.num_slots, 0);
  analyze(prog, prog.root, bound);
  Efficient ef{prog, {}, {}, {}, std::vector<Index>(prog.num_slots, 0), out};
  ef.indexes.resize(prog.nodes.size());
  for (std::size_t id = 0; id < prog.nodes.size(); ++id) {
    const CNode& c = prog.nodes[id];
    if (c.kind != Kind::Sum) continue;
    const std::vector<std::uint32_t>* allowed = nullptr;
    if (filter) {
      auto it = filter->find(c.sum_id);
      if (it != filter->end()) allowed = &it->second;
    }
    ef.indexes[id] = build_index(c, allowed);
  }
  ef.spaces.resize(prog.num_globals);
  ef.has_space.assign(prog.num_globals, 0);
  for (std::size_t g = 0; g < prog.num_globals; ++g) {
    if (prog.global_spaces[g]) {
      ef.spaces[g] = SpaceMembership(*prog.global_spaces[g]);
      ef.has_space[g] = 1;
    }
  }
  ef.run(prog.root, 1.0);
}

TermStreams efficient_terms(const PreparedModel& p, const TupleFilter* filter) {
  TermStreams out;
  out.blocks.resize(p.num_blocks());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const auto* f = filter && b < filter->blocks.size() ? &filter->blocks[b] : nullptr;
    efficient_block_terms(p, b, f, out.blocks[b]);
  }
  return out;
}

CanonicalModel instantiate_exhaustive(const SymbolicModel& model, const DataBundle& data,
                                      const InstantiateOptions& opts) {
  PreparedModel p = prepare(model, data);
  return build_canonical(p, exhaustive_terms(p), opts);
}

CanonicalModel instantiate_efficient(const SymbolicModel& model, const DataBundle& data,
                                     const InstantiateOptions& opts, InstantiateStats* stats) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  PreparedModel p = prepare(model, data);
  auto t1 = clock::now();
  TermStreams terms = efficient_terms(p);
  auto t2 = clock::now();
  CanonicalModel out = build_canonical(p, terms, opts);
  auto t3 = clock::now();
  if (stats) {
    stats->normalize_seconds = std::chrono::duration<double>(t1 - t0).count();
    stats->traverse_seconds = std::chrono::duration<double>(t2 - t1).count();
    stats->build_seconds = std::chrono::duration<double>(t3 - t2).count();
    stats->terms = 0;
    for (const auto& b : terms.blocks) stats->terms += b.size();
  }
  return out;
}

}  // namespace meadow::inst
