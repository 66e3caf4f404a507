// Benchmark and experiment driver for the least-squares collocation solver:
//   solve     one boundary value problem on one mesh (or multilevel)
//   study     convergence study over a mesh sequence, CSV/markdown tables
//   sv-scan   smallest-singular-value scan of the collocation Jacobian
//   validate  finite-difference check of the problem Jacobians

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsqdae/study.hpp"

using namespace lsqdae;

namespace {

std::vector<int> parse_n_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw ArgumentError("empty --n-list");
  return out;
}

NodeFamily parse_nodes(const std::string& s) {
  if (s == "uniform") return NodeFamily::uniform_interior;
  if (s == "gauss") return NodeFamily::gauss_legendre;
  throw ArgumentError("--nodes must be 'uniform' or 'gauss'");
}

StudyInit parse_init(const std::string& s, std::string& file) {
  if (s == "reference") return StudyInit::interpolate_reference;
  if (s == "zero") return StudyInit::zero;
  if (s.rfind("file:", 0) == 0) {
    file = s.substr(5);
    return StudyInit::file;
  }
  throw ArgumentError("--init must be 'reference', 'zero' or 'file:PATH'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open output file " + path);
  f << text;
}

struct CommonArgs {
  std::string problem = "pendulum";
  int N = 3;
  int M = 4;
  std::string nodes = "uniform";
  std::string n_list = "10,20,40";
  std::string init = "reference";
  double bc_weight = 1.0;
  std::string out;
  std::string format = "csv";
  std::string trace;
  std::string dump_system;
  bool multilevel = false;
  int q_inverse = 2;
  int quad_points = -1;
  unsigned seed = 42;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_mesh) {
  cmd->add_option("--problem", a.problem,
                  "pendulum | campbell-moore | chain:MU | manufactured");
  if (with_mesh) {
    cmd->add_option("--N", a.N, "ansatz polynomial degree");
    cmd->add_option("--M", a.M, "collocation points per subinterval (M > N)");
    cmd->add_option("--nodes", a.nodes, "uniform | gauss");
    cmd->add_option("--bc-weight", a.bc_weight,
                    "weight of the boundary term in the functional");
  }
}

int run_solve(const CommonArgs& a, int n, int levels) {
  BenchmarkProblem prob =
      problem_by_name(a.problem, a.N, n);
  const CollocationScheme scheme =
      make_scheme(a.M, parse_nodes(a.nodes), a.N, a.bc_weight);
  auto space = make_space(
      make_uniform_partition(prob.sys.interval.a, prob.sys.interval.b, n),
      a.N, prob.sys.m, prob.sys.k);

  StudyOptions init_opt;
  init_opt.init = parse_init(a.init, init_opt.init_file);
  AnsatzElement x0 = make_initial_element(prob, space, init_opt);

  std::vector<LevelResult> levels_out;
  if (a.multilevel) {
    MultilevelConfig mc;
    mc.levels = levels;
    mc.q_inverse = a.q_inverse;
    mc.quad_points = a.quad_points;
    levels_out = multilevel_solve(prob.sys, scheme, x0, mc);
  } else {
    auto [sol, tr] = gn_solve(prob.sys, scheme, x0, {});
    LevelResult lev;
    lev.level = 0;
    lev.n = n;
    lev.h_max = space->partition.h_max();
    lev.solution = sol;
    lev.trace = std::move(tr);
    if (prob.sys.reference)
      lev.errors = error_norms(sol, prob.sys.reference, a.quad_points);
    levels_out.push_back(std::move(lev));
  }

  bool failed = false;
  for (const auto& lev : levels_out) {
    std::printf("level %d: n=%d psi_final=%.6e iters=%d termination=%s\n",
                lev.level, lev.n, lev.trace.psi_final,
                lev.trace.iterations(),
                to_string(lev.trace.termination).c_str());
    if (lev.errors) {
      std::printf("  err_l2 =");
      for (Index c = 0; c < lev.errors->comp_l2.size(); ++c)
        std::printf(" %.3e", lev.errors->comp_l2[c]);
      std::printf("\n  err_h1d = %.3e\n", lev.errors->h1d);
    }
    failed = failed || lev.trace.termination == Termination::numerical_error;
  }
  const LevelResult& last = levels_out.back();

  if (!a.trace.empty()) {
    for (const auto& lev : levels_out) {
      const std::string path =
          levels_out.size() == 1
              ? a.trace
              : a.trace + ".level" + std::to_string(lev.level);
      std::ofstream f(path);
      f << trace_to_json_lines(lev.trace);
    }
  }
  if (!a.dump_system.empty()) {
    const DiscreteResidual dr =
        assemble(prob.sys, last.solution, scheme, true);
    write_matrix_market(dr, a.dump_system);
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    f << element_to_json(last.solution).dump(2) << "\n";
  }
  return failed ? 3 : 0;
}

int run_study(const CommonArgs& a, bool with_orders) {
  BenchmarkProblem prob =
      problem_by_name(a.problem, a.N, parse_n_list(a.n_list).front());
  StudyOptions opt;
  opt.N = a.N;
  opt.M = a.M;
  opt.family = parse_nodes(a.nodes);
  opt.n_list = parse_n_list(a.n_list);
  opt.init = parse_init(a.init, opt.init_file);
  opt.multilevel = a.multilevel;
  opt.q_inverse = a.q_inverse;
  opt.bc_weight = a.bc_weight;
  opt.quad_points = a.quad_points;
  const ConvergenceStudy study = run_convergence_study(prob, opt);
  write_text(a.out, a.format == "markdown"
                        ? write_study_markdown(study, with_orders)
                        : write_study_csv(study, with_orders));
  return study.any_failed() ? 4 : 0;
}

int run_sv(const CommonArgs& a) {
  BenchmarkProblem prob =
      problem_by_name(a.problem, a.N, parse_n_list(a.n_list).front());
  const SvScan scan = run_sv_scan(prob, a.N, a.M, parse_nodes(a.nodes),
                                  parse_n_list(a.n_list));
  std::ostringstream out;
  out << "n,h,sigma_min,sigma_min_raw\n";
  char buf[128];
  for (const auto& r : scan.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.n, r.h,
                  r.sigma_min, r.sigma_min_raw);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "# slope = %.4f (H1D-weighted), %.4f (raw)\n", scan.slope,
                scan.slope_raw);
  out << buf;
  write_text(a.out, out.str());
  return 0;
}

int run_validate(const CommonArgs& a, int samples) {
  BenchmarkProblem prob = problem_by_name(a.problem, a.N, 10);
  const JacobianValidationReport rep =
      validate_jacobians(prob.sys, samples, a.seed);
  const double bdev = boundary_dependence_deviation(prob.sys, samples, a.seed);
  std::printf("problem: %s\n", prob.name.c_str());
  std::printf("samples: %d (seed %u)\n", rep.samples, a.seed);
  std::printf("max relative deviation f_y: %.3e\n", rep.max_dev_jac_y);
  std::printf("max relative deviation f_x: %.3e\n", rep.max_dev_jac_x);
  std::printf("boundary dependence on algebraic components: %.3e\n", bdev);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"least-squares collocation solver for higher-index DAEs"};
  app.require_subcommand(1);

  CommonArgs a;
  int solve_n = 10;
  int levels = 1;
  bool with_orders = false;
  int samples = 100;

  CLI::App* solve = app.add_subcommand("solve", "solve one BVP on one mesh");
  add_common(solve, a, true);
  solve->add_option("--n", solve_n, "number of subintervals");
  solve->add_option("--init", a.init, "reference | zero | file:PATH");
  solve->add_flag("--multilevel", a.multilevel, "warm-started nested driver");
  solve->add_option("--levels", levels, "levels for --multilevel");
  solve->add_option("--q-inverse", a.q_inverse, "mesh refinement factor");
  solve->add_option("--trace", a.trace, "write GN trace as JSON lines");
  solve->add_option("--dump-system", a.dump_system,
                    "dump (r, J) at the solution in Matrix Market format");
  solve->add_option("--out", a.out, "write the solution element as JSON");
  solve->add_option("--quad-points", a.quad_points,
                    "quadrature points per subinterval for error norms");

  CLI::App* study = app.add_subcommand("study", "convergence study");
  add_common(study, a, true);
  study->add_option("--n-list", a.n_list, "comma-separated mesh sizes");
  study->add_option("--init", a.init, "reference | zero | file:PATH");
  study->add_flag("--multilevel", a.multilevel, "warm-started nested driver");
  study->add_option("--q-inverse", a.q_inverse, "mesh refinement factor");
  study->add_flag("--orders", with_orders, "append order-estimate columns");
  study->add_option("--format", a.format, "csv | markdown");
  study->add_option("--out", a.out, "output file (default stdout)");
  study->add_option("--quad-points", a.quad_points,
                    "quadrature points per subinterval for error norms");

  CLI::App* sv = app.add_subcommand("sv-scan",
                                    "smallest-singular-value scan");
  add_common(sv, a, true);
  sv->add_option("--n-list", a.n_list, "comma-separated mesh sizes");
  sv->add_option("--out", a.out, "output file (default stdout)");

  CLI::App* val = app.add_subcommand("validate", "jacobian validation");
  add_common(val, a, false);
  val->add_option("--samples", samples, "sample count");
  val->add_option("--seed", a.seed, "random seed");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return run_solve(a, solve_n, levels);
    if (study->parsed()) return run_study(a, with_orders);
    if (sv->parsed()) return run_sv(a);
    if (val->parsed()) return run_validate(a, samples);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
