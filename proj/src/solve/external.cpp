#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

#include "meadow/emit/lp.hpp"
#include "meadow/solve/solver.hpp"

namespace meadow::solve {

namespace fs = std::filesystem;

void write_solution(const CanonicalModel& model, const Solution& s, std::ostream& out) {
  out << "status " << to_string(s.status) << '\n';
  for (std::size_t c = 0; c < model.num_cols() && c < s.x.size(); ++c) {
    out << column_name(model, c) << ' ' << emit::format_double(s.x[c]) << '\n';
  }
  if (!out) throw std::ios_base::failure("write of solution failed");
}

Solution read_solution(const CanonicalModel& model, std::istream& in) {
  std::unordered_map<std::string, std::size_t> by_name;
  for (std::size_t c = 0; c < model.num_cols(); ++c) by_name.emplace(column_name(model, c), c);
  Solution s;
  s.status = Status::Optimal;
  s.x.assign(model.num_cols(), 0.0);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name)) continue;
    if (first && name == "status") {
      ls >> value;
      if (value == "optimal") s.status = Status::Optimal;
      else if (value == "infeasible") s.status = Status::Infeasible;
      else if (value == "unbounded") s.status = Status::Unbounded;
      else if (value == "iteration_limit") s.status = Status::IterationLimit;
      else s.status = Status::NumericalTrouble;
      first = false;
      continue;
    }
    first = false;
    if (!(ls >> value)) throw std::runtime_error("solution line without value: " + line);
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("solution names unknown column " + name);
    auto v = emit::parse_double(value);
    if (!v) throw std::runtime_error("bad solution value: " + value);
    s.x[it->second] = *v;
  }
  for (std::size_t c = 0; c < model.num_cols(); ++c) s.objective += model.cost(c) * s.x[c];
  return s;
}

ExternalSolver::ExternalSolver(std::string executable, std::string workdir)
    : executable_(std::move(executable)), workdir_(std::move(workdir)) {}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

Solution ExternalSolver::solve(const CanonicalModel& model, const SolveOptions&) const {
  fs::path dir = workdir_.empty() ? fs::temp_directory_path() : fs::path(workdir_);
  static std::atomic<std::size_t> counter{0};
  std::string stem = "meadow_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  fs::path lp = dir / (stem + ".lp");
  fs::path out = dir / (stem + ".sol");
  {
    std::ofstream f(lp);
    emit::write_lp(model, f);
  }
  std::string cmd = shell_quote(executable_) + " " + shell_quote(lp.string()) + " " +
                    shell_quote(out.string());
  int rc = std::system(cmd.c_str());
  Solution s;
  s.status = Status::NumericalTrouble;
  std::ifstream in(out);
  if (rc == 0 && in) s = read_solution(model, in);
  std::error_code ec;
  fs::remove(lp, ec);
  fs::remove(out, ec);
  return s;
}

std::unique_ptr<LpSolver> make_solver(const std::string& spec) {
  if (spec.empty() || spec == "reference") return std::make_unique<ReferenceSimplex>();
  if (spec.rfind("exec:", 0) == 0 && spec.size() > 5) {
    return std::make_unique<ExternalSolver>(spec.substr(5));
  }
  throw std::invalid_argument("unknown solver '" + spec + "' (use reference or exec:PATH)");
}

}  // namespace meadow::solve
