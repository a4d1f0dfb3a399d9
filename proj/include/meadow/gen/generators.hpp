#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadow/core/data.hpp"
#include "meadow/decomp/sequential.hpp"
#include "meadow/ir/model.hpp"

namespace meadow::gen {

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then the
/// mix64 finalizer with constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform integer in [0, n), n > 0 (rejection sampling, no modulo bias).
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1) with 53 random bits.
  double unit();

 private:
  std::uint64_t state_;
};

class GenerationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GeneratedModel {
  ir::SymbolicModel model;
  DataBundle data;
};

/// min sum_{(p,q) in E} c[p,q] x[p,q]
/// s.t. sum_{(i,j) in E} x[i,j] - sum_{(j,i) in E} x[j,i] = s[i]  for i in V
ir::SymbolicModel min_cost_flow_model();

/// The four-node instance with E = {(1,2),(2,4),(1,3),(3,4)}, s = [1,0,0,-1]
/// and unit costs.
GeneratedModel worked_min_cost_flow();

/// Random digraph on nodes 1..n: a random arborescence rooted at node 1 plus
/// distinct extra arcs up to `edges`. Node 1 supplies one unit, a random other
/// node demands it. Costs are 1, or uniform integers in [1, 100].
/// Throws GenerationError when no simple connected digraph has these sizes.
GeneratedModel gen_min_cost_flow(std::size_t nodes, std::size_t edges, std::uint64_t seed,
                                 bool unit_costs = false);

/// Assignment (each customer to exactly one candidate), linking
/// (y[i,j] <= open[j]) and cardinality (sum open = p). Distances are uniform
/// integers in [1, 100]; y and open are binary.
GeneratedModel gen_p_median(std::size_t customers, std::size_t candidates,
                            std::size_t facilities, std::uint64_t seed);

/// Production planning with inventory balance, delay and replacement limits.
/// Periods are the first index of every variable, set and parameter.
///
///   inv[t,p,i] = inv[t-1,p,i] + x + pur + sum_p' s[t,p',p,i] + sum rp[t,p,i,.,.]
///                + sum_j r[t,p,j,i] + R[t,p,i]
///                - sum_j B[t,p,i,j] x[t,p,j] - sum_p' s[t,p,p',i] - sum rp[t,p,.,i,.]
///                - sum_j r[t,p,i,j] - z[t,p,i]                   (t,p,i) in ITEMS
///   m[t,p,i] = m[t-1,p,i] - z[t,p,i] + D[t,p,i]                  (t,p,i) in DEM
///   sum_i' rp[t,p,i,i',j] <= B[t,p,i,j] x[t,p,j]                 (t,p,i,j) in BOM
///
/// R carries purchase orders, work in progress and (in period 1) opening stock.
ir::SymbolicModel production_planning_model();

/// Period axis, aggregation policies and state variables {inv, m}.
decomp::PeriodMetadata production_planning_metadata();

struct SequentialInstance {
  ir::SymbolicModel model;
  DataBundle data;
  decomp::PeriodMetadata meta;
};

struct ProductionOptions {
  /// Multiplies every demand; 0 gives a demand-free instance.
  double demand_scale = 1.0;
};

/// Random layered bill of materials (raw -> sub-assembly -> end product;
/// two items give raw -> end), per-plant capacities, demand with spikes and
/// delay costs an order of magnitude above the other costs.
/// Throws GenerationError unless T >= 2, plants >= 1 and items >= 2.
SequentialInstance gen_production_planning(int T, std::size_t plants, std::size_t items,
                                           std::uint64_t seed, const ProductionOptions& opts = {});

}  // namespace meadow::gen
