#include "meadow/parallel/partition.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "meadow/core/errors.hpp"

namespace meadow::par {

using inst::PreparedModel;

namespace {

bool indexed_by(const inst::NormalizedExpression& ne, const std::string& pivot) {
  const auto& G = ne.expr.global_indices;
  return std::find(G.begin(), G.end(), pivot) != G.end();
}

// (sum_id, set, tuple position of the pivot) for each sum binding it.
struct PivotSum {
  std::size_t sum_id;
  const IndexSet* set;
  std::size_t pos;
};

std::vector<PivotSum> pivot_sums(const PreparedModel& p, std::size_t block,
                                 const std::string& pivot) {
  std::vector<PivotSum> out;
  const auto& ne = p.blocks[block];
  for (const auto& node : ne.expr.nodes) {
    const auto* s = std::get_if<ir::SumNode>(&node);
    if (!s) continue;
    auto it = std::find(s->binding.begin(), s->binding.end(), pivot);
    if (it == s->binding.end()) continue;
    out.push_back({s->sum_id, &inst::resolve_set(s->set, ne.derived_sets, *p.data),
                   static_cast<std::size_t>(it - s->binding.begin())});
  }
  return out;
}

const std::vector<Index>* pivot_space(const PreparedModel& p, const std::string& pivot) {
  const auto* ph = p.model.find_placeholder(pivot);
  return ph ? p.data->find_space(ph->space_name()) : nullptr;
}

std::size_t block_load(const PreparedModel& p, std::size_t block) {
  std::size_t n = 0;
  for (const auto& node : p.blocks[block].expr.nodes) {
    if (const auto* s = std::get_if<ir::SumNode>(&node)) {
      n += inst::resolve_set(s->set, p.blocks[block].derived_sets, *p.data).size();
    }
  }
  return n;
}

struct Candidate {
  std::vector<std::vector<Index>> parts;
  std::size_t max_load = 0;
};

Candidate split(const PreparedModel& p, const std::string& pivot,
                const std::vector<Index>& space, std::size_t workers) {
  std::vector<Index> values(space);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::unordered_map<Index, std::size_t> slot;
  for (std::size_t k = 0; k < values.size(); ++k) slot[values[k]] = k;

  std::vector<std::size_t> weight(values.size(), 0);
  std::size_t fixed = 0;
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    if (b == 0 || !indexed_by(p.blocks[b], pivot)) {
      fixed += block_load(p, b);
      continue;
    }
    for (const PivotSum& ps : pivot_sums(p, b, pivot)) {
      for (std::size_t t = 0; t < ps.set->size(); ++t) {
        auto it = slot.find((*ps.set)[t][ps.pos]);
        if (it != slot.end()) ++weight[it->second];
      }
    }
  }

  std::size_t m = std::min(workers, values.size());
  std::size_t total = 0;
  for (std::size_t w : weight) total += w;
  Candidate c;
  c.parts.resize(m);
  std::vector<std::size_t> load(m, 0);
  load[0] = fixed;
  // Cut before value k once the prefix (counting half of w_k) reaches the
  // next multiple of total/m; every later part keeps at least one value.
  std::size_t part = 0, prefix = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (part + 1 < m && !c.parts[part].empty()) {
      bool forced = values.size() - k == m - 1 - part;
      bool reached = (2 * prefix + weight[k]) * m >= 2 * (part + 1) * total;
      if (forced || reached) ++part;
    }
    c.parts[part].push_back(values[k]);
    load[part] += weight[k];
    prefix += weight[k];
  }
  c.max_load = *std::max_element(load.begin(), load.end());
  return c;
}

}  // namespace

PartitionPlan plan_partition(const PreparedModel& p, std::size_t workers) {
  PartitionPlan plan;
  if (workers <= 1) return plan;
  std::optional<Candidate> best;
  for (const auto& ph : p.model.index_placeholders) {
    if (ph.kind != ir::PlaceholderKind::Global) continue;
    bool used = false;
    for (std::size_t b = 1; b < p.num_blocks(); ++b) used = used || indexed_by(p.blocks[b], ph.name);
    const auto* space = pivot_space(p, ph.name);
    if (!used || !space || space->size() < 2) continue;
    Candidate c = split(p, ph.name, *space, workers);
    if (!best || c.max_load < best->max_load ||
        (c.max_load == best->max_load && c.parts.size() > best->parts.size())) {
      best = std::move(c);
      plan.pivot = ph.name;
    }
  }
  if (best) plan.parts = std::move(best->parts);
  return plan;
}

void check_plan(const PreparedModel& p, const PartitionPlan& plan) {
  if (!plan.pivot) return;
  const auto* ph = p.model.find_placeholder(*plan.pivot);
  if (!ph || ph->kind != ir::PlaceholderKind::Global) {
    throw std::invalid_argument("pivot '" + *plan.pivot + "' is not a global placeholder");
  }
  const auto* space = pivot_space(p, *plan.pivot);
  if (!space) throw MissingSpace(*plan.pivot);
  if (plan.parts.empty()) throw std::invalid_argument("partition has no parts");
  std::unordered_set<Index> seen;
  for (const auto& part : plan.parts) {
    for (Index v : part) {
      if (!seen.insert(v).second) {
        throw std::invalid_argument("value " + std::to_string(v) + " is in two parts");
      }
    }
  }
  std::unordered_set<Index> want(space->begin(), space->end());
  if (want != seen) throw std::invalid_argument("parts do not cover space(" + *plan.pivot + ")");
}

PartView part_view(const PreparedModel& p, const PartitionPlan& plan, std::size_t part) {
  PartView v;
  v.filter.blocks.resize(p.num_blocks());
  v.owns_block.assign(p.num_blocks(), 0);
  if (!plan.pivot) {
    if (part == 0) v.owns_block.assign(p.num_blocks(), 1);
    return v;
  }
  std::unordered_set<Index> mine(plan.parts.at(part).begin(), plan.parts.at(part).end());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    if (b == 0 || !indexed_by(p.blocks[b], *plan.pivot)) {
      v.owns_block[b] = part == 0;
      continue;
    }
    v.owns_block[b] = 1;
    for (const PivotSum& ps : pivot_sums(p, b, *plan.pivot)) {
      auto& ids = v.filter.blocks[b][ps.sum_id];
      for (std::size_t t = 0; t < ps.set->size(); ++t) {
        if (mine.count((*ps.set)[t][ps.pos])) ids.push_back(static_cast<std::uint32_t>(t));
      }
    }
  }
  return v;
}

inst::TermStreams parallel_terms(const PreparedModel& p, const PartitionPlan& plan,
                                 std::size_t threads, std::vector<inst::TermStreams>* per_part) {
  check_plan(p, plan);
  const std::size_t parts = plan.num_parts();
  if (threads == 0) threads = parts;
  std::vector<inst::TermStreams> local(parts);
  std::vector<std::exception_ptr> errors(parts);
  std::vector<std::string> messages(parts);

#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(threads))
  for (std::size_t k = 0; k < parts; ++k) {
    try {
      PartView view = part_view(p, plan, k);
      local[k].blocks.resize(p.num_blocks());
      for (std::size_t b = 0; b < p.num_blocks(); ++b) {
        local[k].blocks[b].global_arity = p.blocks[b].expr.global_indices.size();
        if (!view.owns_block[b]) continue;
        efficient_block_terms(p, b, &view.filter.blocks[b], local[k].blocks[b]);
      }
    } catch (const std::exception& e) {
      errors[k] = std::current_exception();
      messages[k] = e.what();
    } catch (...) {
      errors[k] = std::current_exception();
      messages[k] = "unknown error";
    }
  }

  for (std::size_t k = 0; k < parts; ++k) {
    if (errors[k]) throw WorkerError(k, messages[k], errors[k]);
  }

  inst::TermStreams merged;
  merged.blocks.resize(p.num_blocks());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    merged.blocks[b].global_arity = p.blocks[b].expr.global_indices.size();
    for (std::size_t k = 0; k < parts; ++k) merged.blocks[b].append(local[k].blocks[b]);
  }
  if (per_part) *per_part = std::move(local);
  return merged;
}

CanonicalModel instantiate_parallel(const PreparedModel& p, const PartitionPlan& plan,
                                    const inst::InstantiateOptions& opts, std::size_t threads) {
  return inst::build_canonical(p, parallel_terms(p, plan, threads), opts);
}

CanonicalModel instantiate_parallel(const ir::SymbolicModel& model, const DataBundle& data,
                                    std::size_t workers, const inst::InstantiateOptions& opts) {
  PreparedModel p = inst::prepare(model, data);
  PartitionPlan plan = plan_partition(p, workers);
  return instantiate_parallel(p, plan, opts, workers);
}

std::size_t default_threads() {
  if (const char* env = std::getenv("MEADOW_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
}

}  // namespace meadow::par
