#include "pdcontact/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "pdcontact/fem.hpp"
#include "pdcontact/oracle.hpp"
#include "pdcontact/pdsolver.hpp"
#include "pdcontact/problem_io.hpp"
#include "pdcontact/residuals.hpp"
#include "pdcontact/soclcp.hpp"

namespace pdcontact::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int exit_code(solver::SolveStatus s) {
  switch (s) {
    case solver::SolveStatus::converged: return kExitOk;
    case solver::SolveStatus::iteration_cap: return kExitIterationCap;
    case solver::SolveStatus::nan_abort: return kExitNan;
  }
  return kExitError;
}

// One manifest per invocation; filled as the command proceeds.
struct Manifest {
  fs::path path;
  json doc;
  Clock::time_point start = Clock::now();

  void write(int status, std::ostream& err) {
    doc["exit_status"] = status;
    doc["timings"]["total_s"] = seconds_since(start);
    if (path.empty()) return;
    std::ofstream out(path);
    if (out) out << doc.dump(2) << '\n';
    if (!out) err << "warning: could not write manifest " << path.string() << '\n';
  }
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

json config_json(const solver::SolverConfig& cfg) {
  return json{{"alpha0", cfg.alpha0},     {"eps", cfg.eps},
              {"max_outer", cfg.max_outer}, {"pcg_tol", cfg.pcg_tol},
              {"pcg_maxit", cfg.pcg_maxit}, {"diagnostics", cfg.diagnostics}};
}

void add_solver_flags(CLI::App* cmd, solver::SolverConfig& cfg) {
  cmd->add_option("--alpha0", cfg.alpha0, "Initial dual step size")->capture_default_str();
  cmd->add_option("--eps", cfg.eps, "Stop when ||du^{k+1} - du^k|| <= eps")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_outer, "Maximum outer iterations")->capture_default_str();
  cmd->add_option("--pcg-tol", cfg.pcg_tol, "Relative tolerance of the inner PCG")->capture_default_str();
  cmd->add_option("--pcg-maxit", cfg.pcg_maxit, "Iteration limit of the inner PCG")->capture_default_str();
  cmd->add_flag("--diagnostics", cfg.diagnostics, "Record residuals every iteration");
}

struct GenArgs {
  std::string kind;
  int n_y = 0;
  std::optional<double> traction, gap, mu, length;
  std::string bc = "clamped";
  std::string out;
};

struct SolveArgs {
  std::string problem;
  std::string out;
  std::string history;
  solver::SolverConfig cfg;
};

struct VerifyArgs {
  std::string problem;
  std::string solution;
  bool oracle = false;
  double soclcp_tol = 1e-6;
  double oracle_tol = 1e-10;
};

struct ExportArgs {
  std::string problem;
  std::string dir;
};

struct BenchArgs {
  std::string suite = "acceptance";
  std::string out = "bench";
  std::vector<int> ny;
  std::string kind;
  double mu = 0.5;
  solver::SolverConfig cfg;
};

fem::BenchmarkOptions benchmark_options(const std::string& kind) {
  if (kind == "example1") return fem::example1_defaults();
  if (kind == "example2") return fem::example2_defaults();
  throw std::invalid_argument("unknown problem kind '" + kind + "' (expected example1 or example2)");
}

ProblemInstance generate(const std::string& kind, int n_y, const fem::BenchmarkOptions& opts) {
  return kind == "example1" ? fem::build_example1(n_y, opts) : fem::build_example2(n_y, opts);
}

int cmd_gen(const GenArgs& a, Manifest& man, std::ostream& out) {
  fem::BenchmarkOptions opts = benchmark_options(a.kind);
  if (a.traction) opts.traction = *a.traction;
  if (a.gap) opts.gap = *a.gap;
  if (a.mu) opts.mu = *a.mu;
  if (a.length) opts.length = *a.length;
  opts.bc = a.bc;
  man.doc["config"] = {{"kind", a.kind},   {"n_y", a.n_y},         {"traction", opts.traction},
                       {"gap", opts.gap},  {"mu", opts.mu},        {"length", opts.length},
                       {"bc", opts.bc},    {"young", opts.young},  {"poisson", opts.poisson}};
  const auto t0 = Clock::now();
  const ProblemInstance prob = generate(a.kind, a.n_y, opts);
  man.doc["timings"]["assemble_s"] = seconds_since(t0);
  io::write_problem(a.out, prob);
  man.doc["problem_hash"] = io::problem_hash(prob);
  man.doc["outputs"] = {{"problem", a.out}};
  out << "wrote " << a.out << ": " << a.kind << " N_Y=" << a.n_y << " d=" << prob.dofs()
      << " c=" << prob.contact.c << " mu=" << prob.mu << '\n';
  return kExitOk;
}

int cmd_solve(const SolveArgs& a, Manifest& man, std::ostream& out) {
  man.doc["config"] = config_json(a.cfg);
  man.doc["config"]["problem"] = a.problem;
  solver::validate(a.cfg);
  const ProblemInstance prob = io::read_problem(a.problem);
  man.doc["problem_hash"] = io::problem_hash(prob);

  auto t0 = Clock::now();
  const SpectralEstimates est = solver::estimate_spectrum(prob, a.cfg);
  man.doc["timings"]["spectral_s"] = seconds_since(t0);
  t0 = Clock::now();
  const solver::Solution sol = solver::pd_accelerated(prob, a.cfg, est);
  man.doc["timings"]["solve_s"] = seconds_since(t0);

  const verify::ResidualReport rep = verify::residual_report(prob, sol.du, sol.r);
  io::write_solution(a.out, sol, rep);
  man.doc["outputs"] = {{"solution", a.out}};
  if (!a.history.empty()) {
    io::write_history_csv(a.history, sol.history);
    man.doc["outputs"]["history_csv"] = a.history;
  }
  man.doc["history_csv_version"] = io::kHistoryCsvVersion;
  man.doc["solver"] = {{"status", solver::to_string(sol.status)},
                       {"iterations", sol.iterations},
                       {"pcg_failures", sol.pcg_failures},
                       {"sigma_T", est.sigma_T},
                       {"mu_pi", est.mu_pi}};
  if (!sol.message.empty()) man.doc["message"] = sol.message;

  out << "status " << solver::to_string(sol.status) << " after " << sol.iterations
      << " iterations\n"
      << "resid_eq    " << sci(rep.resid_eq) << '\n'
      << "resid_compl " << sci(rep.resid_compl) << '\n'
      << "resid_pen   " << sci(rep.resid_pen) << '\n'
      << "free/slip/stick " << rep.fractions.free << ' ' << rep.fractions.slip << ' '
      << rep.fractions.stick << '\n';
  return exit_code(sol.status);
}

int cmd_verify(const VerifyArgs& a, Manifest& man, std::ostream& out, std::ostream& err) {
  man.doc["config"] = {{"problem", a.problem},       {"solution", a.solution},
                       {"oracle", a.oracle},         {"soclcp_tol", a.soclcp_tol},
                       {"oracle_tol", a.oracle_tol}};
  const ProblemInstance prob = io::read_problem(a.problem);
  man.doc["problem_hash"] = io::problem_hash(prob);
  const io::SolutionRecord sol = io::read_solution(a.solution);
  require_size(sol.du.size(), prob.dofs(), "solution du");
  require_size(sol.r.size(), prob.contact.block_size() * prob.contact.c, "solution r");

  bool all = true;
  json checks = json::array();
  auto line = [&](const std::string& name, double value, double bound) {
    const bool ok = value <= bound;
    all = all && ok;
    out << (ok ? "PASS " : "FAIL ") << name << ' ' << sci(value) << " <= " << sci(bound) << '\n';
    checks.push_back({{"check", name}, {"value", value}, {"bound", bound}, {"pass", ok}});
  };

  const verify::ResidualReport rep = verify::residual_report(prob, sol.du, sol.r);
  line("resid_eq", rep.resid_eq, 1e-8 * std::max(1.0, norm2(prob.p)));
  line("resid_compl", rep.resid_compl, 1e-8);
  line("resid_pen", rep.resid_pen, 1e-9);
  line("cone_violation", rep.cone_violation, 1e-12);

  const verify::SoclcpReport soc = verify::verify_soclcp(prob, sol.du, sol.r, {}, a.soclcp_tol);
  line("soclcp_x_in_cone", soc.x_cone_violation, a.soclcp_tol);
  line("soclcp_y_in_cone", soc.y_cone_violation, a.soclcp_tol);
  line("soclcp_complementarity", soc.complementarity, a.soclcp_tol);
  line("soclcp_first_equation", soc.first_equation, a.soclcp_tol);
  line("soclcp_second_equation", soc.second_equation, a.soclcp_tol);

  if (a.oracle) {
    if (!verify::oracle_eligible(prob)) {
      const std::string why = "oracle refused: enumeration needs a planar problem (m = 1) with at most " +
                              std::to_string(verify::kOracleMaxNodes) + " contact candidates (got m = " +
                              std::to_string(prob.contact.m) + ", c = " +
                              std::to_string(prob.contact.c) + ")";
      err << "warning: " << why << '\n';
      man.doc["warnings"].push_back(why);
    } else {
      const verify::OracleResult orc = verify::oracle_enumerate(prob, a.oracle_tol);
      out << "oracle: " << orc.solutions.size() << " accepted of " << orc.combinations
          << " combinations (" << orc.singular << " singular)\n";
      if (orc.solutions.empty()) {
        out << "FAIL oracle found no admissible state combination\n";
        all = false;
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : orc.solutions) {
          double diff = 0.0;
          for (std::size_t i = 0; i < s.du.size(); ++i) diff = std::max(diff, std::abs(s.du[i] - sol.du[i]));
          best = std::min(best, diff);
        }
        line(orc.unique() ? "oracle_du_match" : "oracle_du_match_nearest", best, 1e-6);
      }
    }
  }
  man.doc["checks"] = checks;
  out << (all ? "verification passed\n" : "verification FAILED\n");
  return all ? kExitOk : kExitError;
}

int cmd_export(const ExportArgs& a, Manifest& man, std::ostream& out) {
  man.doc["config"] = {{"problem", a.problem}, {"dir", a.dir}};
  const ProblemInstance prob = io::read_problem(a.problem);
  man.doc["problem_hash"] = io::problem_hash(prob);
  const verify::SOCLCPForm form = verify::build_soclcp(prob);
  verify::export_matrix_market(form, a.dir);
  man.doc["outputs"] = {{"dir", a.dir}, {"cone", form.cone.describe()}};
  out << "wrote SOCLCP blocks to " << a.dir << " (cone " << form.cone.describe() << ")\n";
  return kExitOk;
}

struct BenchCase {
  std::string kind;
  int n_y;
};

int cmd_bench(const BenchArgs& a, Manifest& man, std::ostream& out) {
  std::vector<BenchCase> cases;
  auto add = [&](const std::string& kind, std::vector<int> ladder) {
    if (!a.ny.empty()) ladder = a.ny;
    for (int n : ladder) cases.push_back({kind, n});
  };
  if (a.suite == "acceptance") {
    add(a.kind.empty() ? "example1" : a.kind, {4, 8, 16, 26});
  } else if (a.suite == "scaling") {
    if (a.kind.empty() || a.kind == "example1") add("example1", {4, 8, 12, 16, 20, 26});
    if (a.kind.empty() || a.kind == "example2") add("example2", {2, 4, 6});
  } else {
    throw std::invalid_argument("unknown suite '" + a.suite + "' (expected acceptance or scaling)");
  }
  man.doc["config"] = config_json(a.cfg);
  man.doc["config"]["suite"] = a.suite;
  man.doc["config"]["mu"] = a.mu;

  const fs::path csv_path = fs::path(a.out) / (a.suite + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  csv << "kind,n_y,d,c,mu,status,iterations,pcg_total,resid_eq,resid_compl,resid_pen,free,slip,"
         "stick,wall_s,error\n";

  int worst = kExitOk;
  json rows = json::array();
  for (const BenchCase& bc : cases) {
    const auto t0 = Clock::now();
    std::ostringstream row;
    row << bc.kind << ',' << bc.n_y << ',';
    try {
      fem::BenchmarkOptions opts = benchmark_options(bc.kind);
      opts.mu = a.mu;
      const ProblemInstance prob = generate(bc.kind, bc.n_y, opts);
      const solver::Solution sol = solver::pd_accelerated(prob, a.cfg);
      const verify::ResidualReport rep = verify::residual_report(prob, sol.du, sol.r);
      std::size_t pcg_total = 0;
      for (const auto& h : sol.history) pcg_total += h.pcg_iters;
      const double wall = seconds_since(t0);
      char buf[256];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%s,%zu,%zu,%.6e,%.6e,%.6e,%.6f,%.6f,%.6f,%.3f,",
                    prob.dofs(), prob.contact.c, prob.mu, solver::to_string(sol.status),
                    sol.iterations, pcg_total, rep.resid_eq, rep.resid_compl, rep.resid_pen,
                    rep.fractions.free, rep.fractions.slip, rep.fractions.stick, wall);
      row << buf;
      worst = std::max(worst, exit_code(sol.status));
      out << bc.kind << " N_Y=" << bc.n_y << " d=" << prob.dofs() << " c=" << prob.contact.c
          << ' ' << solver::to_string(sol.status) << " in " << sol.iterations
          << " iterations, free/slip/stick " << rep.fractions.free << '/' << rep.fractions.slip
          << '/' << rep.fractions.stick << ", " << wall << " s\n";
      rows.push_back({{"kind", bc.kind}, {"n_y", bc.n_y}, {"status", solver::to_string(sol.status)}});
    } catch (const std::exception& e) {
      std::string msg = e.what();
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      row << ",,," << "error,,,,,,,,," << seconds_since(t0) << ',' << msg;
      worst = std::max(worst, kExitError);
      out << bc.kind << " N_Y=" << bc.n_y << " failed: " << e.what() << '\n';
      rows.push_back({{"kind", bc.kind}, {"n_y", bc.n_y}, {"status", "error"}, {"error", e.what()}});
    }
    csv << row.str() << '\n';
    csv.flush();
  }
  man.doc["outputs"] = {{"csv", csv_path.string()}};
  man.doc["rows"] = rows;
  return worst;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accelerated primal-dual solver for frictional contact problems", "pdcontact"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate a benchmark problem file");
  c_gen->add_option("kind", gen.kind, "example1 | example2")->required()
      ->check(CLI::IsMember({"example1", "example2"}));
  c_gen->add_option("--ny", gen.n_y, "Elements along y (N_Y)")->required();
  c_gen->add_option("--traction", gen.traction, "Downward traction on the top face");
  c_gen->add_option("--gap", gen.gap, "Initial gap to the obstacle");
  c_gen->add_option("--mu", gen.mu, "Friction coefficient");
  c_gen->add_option("--length", gen.length, "Body length along x");
  c_gen->add_option("--bc", gen.bc, "clamped | free")->check(CLI::IsMember({"clamped", "free"}))
      ->capture_default_str();
  c_gen->add_option("-o,--out", gen.out, "Problem file to write")->required();

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Solve a problem file");
  c_solve->add_option("problem", solve.problem, "Problem file")->required();
  c_solve->add_option("-o,--out", solve.out, "Solution file (default: <problem>.solution.json)");
  c_solve->add_option("--history", solve.history, "Write the convergence history CSV here");
  add_solver_flags(c_solve, solve.cfg);

  VerifyArgs ver;
  auto* c_verify = app.add_subcommand("verify", "Check a solution against residual, SOCLCP and oracle tests");
  c_verify->add_option("problem", ver.problem, "Problem file")->required();
  c_verify->add_option("solution", ver.solution, "Solution file")->required();
  c_verify->add_flag("--oracle", ver.oracle, "Compare with the enumeration oracle (planar, c <= 6)");
  c_verify->add_option("--soclcp-tol", ver.soclcp_tol, "Tolerance of the SOCLCP checks")->capture_default_str();
  c_verify->add_option("--oracle-tol", ver.oracle_tol, "Acceptance tolerance of the oracle")->capture_default_str();

  ExportArgs exp;
  auto* c_export = app.add_subcommand("export", "Write the SOCLCP form as Matrix Market files");
  c_export->add_option("problem", exp.problem, "Problem file")->required();
  c_export->add_option("dir", exp.dir, "Output directory")->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Run a benchmark suite and write a CSV table");
  c_bench->add_option("--suite", bench.suite, "acceptance | scaling")
      ->check(CLI::IsMember({"acceptance", "scaling"}))->capture_default_str();
  c_bench->add_option("--out", bench.out, "Output directory")->capture_default_str();
  c_bench->add_option("--ny", bench.ny, "Override the N_Y ladder");
  c_bench->add_option("--kind", bench.kind, "Restrict to example1 or example2")
      ->check(CLI::IsMember({"example1", "example2"}));
  c_bench->add_option("--mu", bench.mu, "Friction coefficient")->capture_default_str();
  add_solver_flags(c_bench, bench.cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitError;
  }

  Manifest man;
  man.doc["tool"] = "pdcontact";
  man.doc["manifest_version"] = 1;
  man.doc["argv"] = args;
  std::function<int()> body;
  if (c_gen->parsed()) {
    man.doc["command"] = "gen";
    man.path = with_suffix(gen.out, ".manifest.json");
    body = [&] { return cmd_gen(gen, man, out); };
  } else if (c_solve->parsed()) {
    man.doc["command"] = "solve";
    if (solve.out.empty()) {
      fs::path p(solve.problem);
      solve.out = (p.parent_path() / (p.stem().string() + ".solution.json")).string();
    }
    man.path = with_suffix(solve.out, ".manifest.json");
    body = [&] { return cmd_solve(solve, man, out); };
  } else if (c_verify->parsed()) {
    man.doc["command"] = "verify";
    man.path = with_suffix(ver.solution, ".verify.manifest.json");
    body = [&] { return cmd_verify(ver, man, out, err); };
  } else if (c_export->parsed()) {
    man.doc["command"] = "export";
    man.path = fs::path(exp.dir) / "run.manifest.json";
    body = [&] { return cmd_export(exp, man, out); };
  } else {
    man.doc["command"] = "bench";
    std::error_code ec;
    fs::create_directories(bench.out, ec);
    man.path = fs::path(bench.out) / (bench.suite + ".manifest.json");
    body = [&] { return cmd_bench(bench, man, out); };
  }

  int code = kExitError;
  try {
    code = body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    man.doc["error"] = e.what();
    code = kExitError;
  }
  if (man.path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(man.path.parent_path(), ec);
  }
  man.write(code, err);
  return code;
}

}  // namespace pdcontact::cli
