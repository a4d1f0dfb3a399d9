#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "meadow/core/data_json.hpp"
#include "meadow/decomp/horizon.hpp"
#include "meadow/emit/lp.hpp"
#include "meadow/ir/json_ir.hpp"
#include "meadow/ir/validate.hpp"
#include "meadow/parallel/partition.hpp"
#include "meadow/run.hpp"
#include "meadow/solve/audit.hpp"

using namespace meadow;
using nlohmann::json;
using nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

namespace {

enum Code { Ok = 0, Validation = 1, Data = 2, Io = 3, Infeasible = 4 };

/// Carries an exit code up to main.
struct Failure : std::runtime_error {
  Failure(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
  Code code;
};

double since(clock_type::time_point t) {
  return std::chrono::duration<double>(clock_type::now() - t).count();
}

std::string slurp(const std::string& path, Code code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(code, "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw Failure(Io, "cannot write '" + path + "'");
}

void emit_to(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(path, text);
  }
}

ir::SymbolicModel load_ir(const std::string& path) {
  std::string text = slurp(path, Validation);
  try {
    return ir::parse_ir_text(text);
  } catch (const json::exception& e) {
    throw Failure(Validation, path + ": " + e.what());
  }
}

json load_data_doc(const std::string& path) {
  std::string text = slurp(path, Data);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Failure(Data, path + ": " + e.what());
  }
}

inst::InstantiateOptions inst_options(bool dense_columns, bool dense_rows) {
  inst::InstantiateOptions o;
  if (dense_columns) o.columns = inst::ColumnMode::Dense;
  if (dense_rows) o.rows = inst::RowMode::Dense;
  return o;
}

void timing(const ordered_json& doc) { std::cerr << doc.dump() << "\n"; }

// ---------------------------------------------------------------- instantiate

struct InstantiateArgs {
  std::string ir, data, out_path, format = "lp", algorithm = "efficient";
  std::size_t threads = 0;
  bool dense_columns = false, dense_rows = false;
};

int cmd_instantiate(const InstantiateArgs& a) {
  auto t = clock_type::now();
  ir::SymbolicModel model = load_ir(a.ir);
  DataBundle data = parse_data(load_data_doc(a.data));
  double parse = since(t);
  std::size_t threads = a.threads ? a.threads : par::default_threads();
  PipelineTimings pt;
  CanonicalModel m = instantiate_with(model, data, parse_algorithm(a.algorithm), threads,
                                      inst_options(a.dense_columns, a.dense_rows), &pt);
  t = clock_type::now();
  if (a.format == "lp") {
    emit_to(a.out_path, emit::write_lp_string(m));
  } else {
    if (a.out_path.empty()) throw Failure(Io, "--out triplets needs -o PREFIX");
    std::ostringstream csv, side;
    emit::write_triplets(m, csv, side);
    write_file(a.out_path + ".csv", csv.str());
    write_file(a.out_path + ".json", side.str());
  }
  double emit_s = since(t);
  timing({{"parse", parse},
          {"normalize", pt.normalize_seconds},
          {"instantiate", pt.instantiate_seconds},
          {"emit", emit_s},
          {"algorithm", a.algorithm},
          {"threads", a.algorithm == "exhaustive" ? 1 : threads},
          {"rows", m.num_rows()},
          {"cols", m.num_cols()},
          {"nonzeros", m.num_entries()}});
  return Ok;
}

// ---------------------------------------------------------------------- solve

struct SolveArgs {
  std::string ir, data, lp, out_path, solver = "reference";
  bool dense_columns = false, round = false;
};

int cmd_solve(const SolveArgs& a) {
  auto t = clock_type::now();
  CanonicalModel m;
  if (!a.lp.empty()) {
    std::ifstream in(a.lp);
    if (!in) throw Failure(Io, "cannot read '" + a.lp + "'");
    try {
      m = emit::read_lp(in);
    } catch (const emit::LpSyntaxError& e) {
      throw Failure(Validation, a.lp + ": " + e.what());
    }
  } else {
    if (a.ir.empty() || a.data.empty()) throw Failure(Validation, "solve needs IR and DATA, or --lp");
    ir::SymbolicModel model = load_ir(a.ir);
    DataBundle data = parse_data(load_data_doc(a.data));
    m = inst::instantiate_efficient(model, data, inst_options(a.dense_columns, false));
  }
  double inst_s = since(t);
  auto solver = solve::make_solver(a.solver);
  t = clock_type::now();
  solve::Solution s = solver->solve(m, {});
  if (a.round && s.optimal()) {
    std::vector<std::size_t> ints;
    for (std::size_t c = 0; c < m.num_cols(); ++c) {
      if (m.is_integer(c)) ints.push_back(c);
    }
    if (!ints.empty()) s = solve::round_and_fix(m, s, ints, *solver);
  }
  double solve_s = since(t);
  ordered_json doc = {{"instantiate", inst_s},
                      {"solve", solve_s},
                      {"status", solve::to_string(s.status)},
                      {"iterations", s.iterations}};
  if (s.optimal()) doc["objective"] = s.objective;
  timing(doc);
  if (!s.optimal()) {
    throw Failure(Infeasible, std::string("model is ") + solve::to_string(s.status));
  }
  std::ostringstream out;
  solve::write_solution(m, s, out);
  emit_to(a.out_path, out.str());
  return Ok;
}

// ------------------------------------------------------------------ decompose

struct DecomposeArgs {
  std::string ir, data, meta, method = "rh", solver = "reference", baseline;
  std::string out_path, manifest_path;
  std::size_t h = 1;
  int M = 1, overlap = 0, fine_tune_k = 0, stop_after = 0;
  std::vector<double> lambdas;
  bool resolve_master = false;
};

int cmd_decompose(const DecomposeArgs& a) {
  auto t = clock_type::now();
  ir::SymbolicModel model = load_ir(a.ir);
  json data_doc = load_data_doc(a.data);
  DataBundle data = parse_data(data_doc);
  json meta_doc;
  if (!a.meta.empty()) {
    meta_doc = load_data_doc(a.meta);
  } else if (data_doc.contains("sequential")) {
    meta_doc = data_doc["sequential"];
  } else {
    throw Failure(Data, "no sequential metadata (pass --meta or add a 'sequential' key)");
  }
  decomp::PeriodMetadata meta = decomp::parse_metadata(meta_doc);
  decomp::SequentialModel seq = decomp::make_sequential(std::move(model), std::move(data), meta);
  double build_s = since(t);

  decomp::HorizonPlan plan = decomp::even_plan(seq.T, a.h);
  plan.M = a.M;
  plan.overlap = a.overlap;
  plan.lambdas = a.lambdas;
  plan.resolve_master = a.resolve_master;
  if (a.stop_after > 0) plan.stop_after_period = a.stop_after;
  try {
    decomp::check_plan(plan, seq.T);
  } catch (const std::invalid_argument& e) {
    throw Failure(Validation, e.what());
  }

  auto solver = solve::make_solver(a.solver);
  decomp::DecompositionOptions opts;
  opts.solver = solver.get();
  decomp::DecompositionResult r;
  try {
    r = decomp::decompose(decomp::parse_method(a.method), seq, plan, opts);
  } catch (const decomp::DecompositionInfeasible& e) {
    timing({{"error", "infeasible"}, {"horizon", e.horizon()}, {"status", solve::to_string(e.status())}});
    throw Failure(Infeasible, std::string(e.what()) + " (horizon " + std::to_string(e.horizon()) + ")");
  } catch (const decomp::MasterInfeasible& e) {
    timing({{"error", "infeasible"}, {"horizon", 0}, {"status", solve::to_string(e.status())}});
    throw Failure(Infeasible, e.what());
  }

  if (a.fine_tune_k > 0 && !r.partial) {
    auto ft = clock_type::now();
    solve::Solution tuned = decomp::fine_tune(seq, r.solution, a.fine_tune_k, opts);
    r.manifest.fine_tune_k = a.fine_tune_k;
    r.manifest.objective_before_fine_tune = r.solution.objective;
    r.manifest.objective = tuned.objective;
    r.manifest.total_seconds += since(ft);
    r.solution = std::move(tuned);
  }
  if (!a.baseline.empty()) {
    std::ifstream in(a.baseline);
    if (!in) throw Failure(Io, "cannot read '" + a.baseline + "'");
    solve::Solution b;
    try {
      b = solve::read_solution(seq.base, in);
    } catch (const std::runtime_error& e) {
      throw Failure(Data, a.baseline + ": " + e.what());
    }
    r.manifest.baseline = solve::audit_solution(seq.base, b.x).objective;
  }

  std::ostringstream sol;
  solve::write_solution(seq.base, r.solution, sol);
  emit_to(a.out_path, sol.str());
  ordered_json manifest = r.manifest.to_json();
  manifest["build_seconds"] = build_s;
  std::string text = manifest.dump(2) + "\n";
  if (a.manifest_path.empty()) std::cerr << text;
  else write_file(a.manifest_path, text);
  return Ok;
}

// ---------------------------------------------------------------------- bench

struct BenchArgs {
  std::string suite, sizes = "1e3", algorithms = "efficient,exhaustive,parallel";
  std::size_t repeat = 3, threads = 0, seed = 1;
  double exhaustive_max = 1e5;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bench(const BenchArgs& a) {
  const auto& suites = bench_suites();
  if (std::find(suites.begin(), suites.end(), a.suite) == suites.end()) {
    throw Failure(Validation, "unknown suite '" + a.suite + "'");
  }
  std::vector<std::size_t> sizes;
  for (const auto& s : split(a.sizes)) {
    double v;
    try {
      v = std::stod(s);
    } catch (const std::exception&) {
      throw Failure(Validation, "bad size '" + s + "'");
    }
    if (!(v >= 1)) throw Failure(Validation, "bad size '" + s + "'");
    sizes.push_back(static_cast<std::size_t>(std::llround(v)));
  }
  std::size_t par_threads = a.threads ? a.threads : par::default_threads();
  std::cout << "suite,size,algorithm,threads,repeat,median_seconds,rows,cols,nonzeros\n";
  for (std::size_t size : sizes) {
    gen::GeneratedModel g = bench_instance(a.suite, size, a.seed);
    for (const auto& alg : split(a.algorithms)) {
      Algorithm algorithm = alg == "parallel" ? Algorithm::Efficient : parse_algorithm(alg);
      std::size_t threads = alg == "parallel" ? par_threads : 1;
      std::cout << a.suite << ',' << size << ',' << alg << ',' << threads << ',' << a.repeat << ',';
      if (algorithm == Algorithm::Exhaustive && static_cast<double>(size) > a.exhaustive_max) {
        std::cout << "skipped,,,\n";
        continue;
      }
      std::vector<double> times;
      CanonicalModel m;
      for (std::size_t r = 0; r < a.repeat; ++r) {
        auto t = clock_type::now();
        m = instantiate_with(g.model, g.data, algorithm, threads);
        std::string lp = emit::write_lp_string(m);
        times.push_back(since(t));
      }
      std::sort(times.begin(), times.end());
      double median = times.size() % 2 ? times[times.size() / 2]
                                        : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
      std::cout << median << ',' << m.num_rows() << ',' << m.num_cols() << ',' << m.num_entries()
                << "\n";
    }
  }
  return Ok;
}

// ------------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind, ir_out, data_out;
  std::size_t nodes = 100, edges = 400, customers = 100, candidates = 10, facilities = 3;
  std::size_t plants = 2, items = 6, seed = 1;
  int T = 16;
  bool unit_costs = false;
  double demand_scale = 1.0;
};

int cmd_generate(const GenerateArgs& a) {
  ir::SymbolicModel model;
  ordered_json data;
  if (a.kind == "worked-flow") {
    auto g = gen::worked_min_cost_flow();
    model = g.model;
    data = emit_data(g.data);
  } else if (a.kind == "flow") {
    auto g = gen::gen_min_cost_flow(a.nodes, a.edges, a.seed, a.unit_costs);
    model = g.model;
    data = emit_data(g.data);
  } else if (a.kind == "pmedian") {
    auto g = gen::gen_p_median(a.customers, a.candidates, a.facilities, a.seed);
    model = g.model;
    data = emit_data(g.data);
  } else if (a.kind == "production") {
    gen::ProductionOptions opts;
    opts.demand_scale = a.demand_scale;
    auto g = gen::gen_production_planning(a.T, a.plants, a.items, a.seed, opts);
    model = g.model;
    data = emit_data(g.data);
    data["sequential"] = decomp::emit_metadata(g.meta);
  } else {
    throw Failure(Validation, "unknown generator '" + a.kind + "'");
  }
  write_file(a.ir_out, ir::emit_ir_text(model));
  emit_to(a.data_out, data.dump(1) + "\n");
  return Ok;
}

// ------------------------------------------------------------------- validate

int cmd_validate(const std::string& ir_path, const std::string& data_path) {
  ir::SymbolicModel model = load_ir(ir_path);
  ir::ValidationReport report = ir::validate(model);
  for (const auto& v : report.violations) {
    std::cout << ir::to_string(v.kind) << " " << v.where << ": " << v.message << "\n";
  }
  if (!report.ok()) return Validation;
  if (!data_path.empty()) {
    DataBundle data = parse_data(load_data_doc(data_path));
    inst::prepare(model, data);
  }
  std::cout << "ok\n";
  return Ok;
}

// ------------------------------------------------------------------- lp-solve

int cmd_lp_solve(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw Failure(Io, "cannot read '" + in_path + "'");
  CanonicalModel m = emit::read_lp(in);
  solve::Solution s = solve::solve_lp(m);
  std::ostringstream out;
  solve::write_solution(m, s, out);
  write_file(out_path, out.str());
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meadow: symbolic LP/MIP instantiation, solving and decomposition"};
  app.require_subcommand(1);

  InstantiateArgs ia;
  auto* inst_cmd = app.add_subcommand("instantiate", "IR + data -> LP or triplets");
  inst_cmd->add_option("ir", ia.ir, "IR JSON")->required();
  inst_cmd->add_option("data", ia.data, "data JSON")->required();
  inst_cmd->add_option("--threads", ia.threads, "workers (default MEADOW_THREADS or all cores)");
  inst_cmd->add_option("--algorithm", ia.algorithm)->check(CLI::IsMember({"efficient", "exhaustive"}));
  inst_cmd->add_flag("--dense-columns", ia.dense_columns, "one column per index-space tuple");
  inst_cmd->add_flag("--dense-rows", ia.dense_rows, "one row per global-space tuple");
  inst_cmd->add_option("--out", ia.format)->check(CLI::IsMember({"lp", "triplets"}));
  inst_cmd->add_option("-o,--output", ia.out_path, "LP path (stdout if absent) or triplet prefix");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "instantiate and solve");
  solve_cmd->add_option("ir", sa.ir, "IR JSON");
  solve_cmd->add_option("data", sa.data, "data JSON");
  solve_cmd->add_option("--lp", sa.lp, "solve an LP file instead");
  solve_cmd->add_option("--solver", sa.solver, "reference or exec:PATH");
  solve_cmd->add_flag("--dense-columns", sa.dense_columns);
  solve_cmd->add_flag("--round", sa.round, "round integer columns and re-solve");
  solve_cmd->add_option("-o,--output", sa.out_path, "solution path (stdout if absent)");

  DecomposeArgs da;
  auto* dec_cmd = app.add_subcommand("decompose", "rolling-horizon decomposition");
  dec_cmd->set_help_flag("--help", "print this help and exit");
  dec_cmd->add_option("ir", da.ir, "IR JSON")->required();
  dec_cmd->add_option("data", da.data, "data JSON")->required();
  dec_cmd->add_option("--meta", da.meta, "period metadata (default: 'sequential' key of data)");
  dec_cmd->add_option("--method", da.method)->check(CLI::IsMember({"rh", "frh", "grh", "gfrh"}));
  dec_cmd->add_option("--h", da.h, "number of horizons")->check(CLI::PositiveNumber);
  dec_cmd->add_option("--M", da.M, "aggregated tail length")->check(CLI::PositiveNumber);
  dec_cmd->add_option("--lambda", da.lambdas, "guidance weight, one or one per horizon")->delimiter(',');
  dec_cmd->add_option("--overlap", da.overlap)->check(CLI::NonNegativeNumber);
  dec_cmd->add_option("--stop-after", da.stop_after, "stop once this period is accepted");
  dec_cmd->add_flag("--resolve-master", da.resolve_master);
  dec_cmd->add_option("--fine-tune-k", da.fine_tune_k, "re-optimize periods 1..k");
  dec_cmd->add_option("--solver", da.solver, "reference or exec:PATH");
  dec_cmd->add_option("--baseline", da.baseline, "solution file to compute the gap against");
  dec_cmd->add_option("-o,--output", da.out_path, "solution path (stdout if absent)");
  dec_cmd->add_option("--manifest", da.manifest_path, "manifest path (stderr if absent)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "instantiation timings as CSV");
  bench_cmd->add_option("suite", ba.suite, "flow, pmedian or production")->required();
  bench_cmd->add_option("--sizes", ba.sizes, "comma-separated sizes, e.g. 1e5,2e5");
  bench_cmd->add_option("--repeat", ba.repeat)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", ba.threads, "workers for the parallel rows");
  bench_cmd->add_option("--algorithms", ba.algorithms, "subset of efficient,exhaustive,parallel");
  bench_cmd->add_option("--exhaustive-max", ba.exhaustive_max, "skip exhaustive above this size");
  bench_cmd->add_option("--seed", ba.seed);

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "write a generated IR + data pair");
  gen_cmd->add_option("kind", ga.kind, "worked-flow, flow, pmedian or production")->required();
  gen_cmd->add_option("--ir-out", ga.ir_out)->required();
  gen_cmd->add_option("--data-out", ga.data_out, "data path (stdout if absent)");
  gen_cmd->add_option("--seed", ga.seed);
  gen_cmd->add_option("--nodes", ga.nodes);
  gen_cmd->add_option("--edges", ga.edges);
  gen_cmd->add_flag("--unit-costs", ga.unit_costs);
  gen_cmd->add_option("--customers", ga.customers);
  gen_cmd->add_option("--candidates", ga.candidates);
  gen_cmd->add_option("--facilities", ga.facilities);
  gen_cmd->add_option("--T", ga.T);
  gen_cmd->add_option("--plants", ga.plants);
  gen_cmd->add_option("--items", ga.items);
  gen_cmd->add_option("--demand-scale", ga.demand_scale);

  std::string v_ir, v_data;
  auto* val_cmd = app.add_subcommand("validate", "check an IR document");
  val_cmd->add_option("ir", v_ir)->required();
  val_cmd->add_option("data", v_data);

  std::string lp_in, lp_out;
  auto* lps_cmd = app.add_subcommand("lp-solve", "solve an LP file with the reference simplex");
  lps_cmd->add_option("lp", lp_in)->required();
  lps_cmd->add_option("solution", lp_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : Validation;
  }

  try {
    if (*inst_cmd) return cmd_instantiate(ia);
    if (*solve_cmd) return cmd_solve(sa);
    if (*dec_cmd) return cmd_decompose(da);
    if (*bench_cmd) return cmd_bench(ba);
    if (*gen_cmd) return cmd_generate(ga);
    if (*val_cmd) return cmd_validate(v_ir, v_data);
    if (*lps_cmd) return cmd_lp_solve(lp_in, lp_out);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ir::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Validation;
  } catch (const ir::IrParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Validation;
  } catch (const emit::LpSyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Validation;
  } catch (const gen::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Data;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Data;
  } catch (const WorkerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Data;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Data;
  }
  return Ok;
}
