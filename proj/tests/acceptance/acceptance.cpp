// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion (details indented). Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lsqdae/abd.hpp"
#include "lsqdae/lsq.hpp"
#include "lsqdae/study.hpp"

using namespace lsqdae;

namespace {

// ---------------------------------------------------------------------------
// Expected benchmark values. Error tables list the components in the order
// (x, x', y, y', lambda), i.e. state components (1, 3, 2, 4, 5).
// ---------------------------------------------------------------------------

constexpr int kCol[5] = {0, 2, 1, 3, 4};

const double kPendN3Err[7][5] = {
    {4.42e-02, 1.17e-01, 1.83e-02, 1.01e-01, 6.25e-01},
    {6.01e-03, 1.76e-02, 2.48e-03, 1.98e-02, 3.33e-01},
    {8.28e-04, 3.07e-03, 3.41e-04, 4.47e-03, 1.72e-01},
    {1.11e-04, 6.26e-04, 4.59e-05, 1.07e-03, 8.67e-02},
    {1.42e-05, 1.44e-04, 5.87e-06, 2.64e-04, 4.34e-02},
    {1.86e-06, 3.50e-05, 7.65e-07, 6.58e-05, 2.17e-02},
    {2.32e-07, 8.68e-06, 9.57e-08, 1.64e-05, 1.08e-02}};

const double kPendN3Ord[6][5] = {{2.9, 2.7, 2.9, 2.3, 0.9},
                                 {2.9, 2.5, 2.9, 2.1, 1.0},
                                 {2.9, 2.3, 2.9, 2.1, 1.0},
                                 {3.0, 2.1, 3.0, 2.0, 1.0},
                                 {2.9, 2.0, 2.9, 2.0, 1.0},
                                 {3.0, 2.0, 3.0, 2.0, 1.0}};

const double kPendN5Err[6][5] = {
    {4.13e-04, 1.28e-03, 1.75e-04, 1.99e-03, 3.61e-02},
    {4.59e-05, 1.22e-04, 1.88e-05, 1.38e-04, 4.90e-03},
    {1.45e-06, 4.44e-06, 5.94e-07, 6.94e-06, 6.18e-04},
    {3.43e-08, 1.82e-07, 1.41e-08, 3.97e-07, 7.74e-05},
    {1.02e-09, 1.04e-08, 4.17e-10, 2.45e-08, 9.68e-06},
    {5.57e-11, 6.41e-10, 2.28e-11, 1.52e-09, 1.21e-06}};

const double kPendN5Ord[5][5] = {{3.2, 3.4, 3.2, 3.8, 2.9},
                                 {5.0, 4.8, 5.0, 4.3, 3.0},
                                 {5.4, 4.6, 5.4, 4.1, 3.0},
                                 {5.1, 4.1, 5.1, 4.0, 3.0},
                                 {4.2, 4.0, 4.2, 4.0, 3.0}};

// H1D error levels for the satellite problem, columns N=1..5, n=10..160
const double kCmH1d[5][5] = {
    {3.32e+1, 4.53e+0, 3.82e-1, 7.02e-2, 1.47e-3},
    {3.32e+1, 7.51e-1, 1.02e-1, 1.26e-2, 1.24e-4},
    {3.32e+1, 3.03e-1, 3.14e-2, 2.52e-3, 1.30e-5},
    {3.32e+1, 1.80e-1, 1.22e-2, 5.45e-4, 1.54e-6},
    {3.32e+1, 1.17e-1, 5.67e-3, 1.25e-4, 1.20e-6}};

double round1(double v) { return std::round(v * 10.0) / 10.0; }

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;
  double seconds = 0.0;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("         " + what); }
};

struct Context {
  ConvergenceStudy pend_n3;    // shared between criteria 1, 7 and 8
  std::vector<bool> monotone;  // psi monotonicity of every solver run
  int failures = 0;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

void collect_monotone(Context& ctx, const ConvergenceStudy& st) {
  for (const auto& r : st.rows) ctx.monotone.push_back(r.psi_monotone);
}

// Criteria 7 and 8 reuse the criterion-1 study when available.
void ensure_pend_n3(Context& ctx, std::vector<int> n_list) {
  if (!ctx.pend_n3.rows.empty()) return;
  StudyOptions opt;
  opt.N = 3;
  opt.M = 4;
  opt.family = NodeFamily::uniform_interior;
  opt.n_list = std::move(n_list);
  ctx.pend_n3 = run_convergence_study(pendulum(), opt);
  collect_monotone(ctx, ctx.pend_n3);
}

// -------------------------------------------------------------- criterion 1
void criterion1(Criterion& c, Context& ctx) {
  ensure_pend_n3(ctx, {10, 20, 40, 80, 160, 320, 640});

  const char* cols = "x   x'  y   y'  lam";
  c.info(fmt("component order: %s", cols));
  for (int i = 0; i < 7; ++i) {
    const StudyRow& r = ctx.pend_n3.rows[i];
    if (r.failed) {
      c.check(false, fmt("row n=%d failed: %s", r.n, r.message.c_str()));
      continue;
    }
    bool ok = true;
    std::string line = fmt("n=%-4d err      ", r.n);
    for (int j = 0; j < 5; ++j) {
      const double got = r.comp_errors[kCol[j]];
      const double want = kPendN3Err[i][j];
      const bool entry = got >= want / 3.0 && got <= want * 3.0;
      ok = ok && entry;
      line += fmt(" %.2e/%.2e%s", got, want, entry ? " " : "*");
    }
    c.check(ok, line + "  (factor 3 of the expected level)");
  }
  const auto orders = estimate_orders(ctx.pend_n3);
  for (int i = 0; i < 6; ++i) {
    bool ok = true;
    std::string line = fmt("n=%-4d order    ", ctx.pend_n3.rows[i].n);
    for (int j = 0; j < 5; ++j) {
      const double got = round1(orders[i].comp_orders[kCol[j]]);
      const bool entry = std::abs(got - kPendN3Ord[i][j]) <= 0.3 + 1e-9;
      ok = ok && entry;
      line += fmt(" %.1f/%.1f%s", got, kPendN3Ord[i][j], entry ? " " : "*");
    }
    c.check(ok, line + "  (within 0.3 of the expected order)");
  }
}

// -------------------------------------------------------------- criterion 2
void criterion2(Criterion& c, Context& ctx) {
  const BenchmarkProblem prob = pendulum();
  StudyOptions opt;
  opt.N = 5;
  opt.M = 6;
  opt.family = NodeFamily::uniform_interior;
  opt.n_list = {10, 20, 40, 80, 160, 320};
  const ConvergenceStudy st = run_convergence_study(prob, opt);
  collect_monotone(ctx, st);
  const auto orders = estimate_orders(st);
  int gated = 0;
  for (int i = 0; i < 5; ++i) {
    bool ok = true;
    std::string line = fmt("n=%-4d order    ", st.rows[i].n);
    for (int j = 0; j < 5; ++j) {
      const int comp = kCol[j];
      const double e0 = st.rows[i].comp_errors[comp];
      const double e1 = st.rows[i + 1].comp_errors[comp];
      if (!(e0 > 1e-11 && e1 > 1e-11)) {  // round-off floor: not penalized
        line += fmt(" (%.1f)/%.1f ", round1(orders[i].comp_orders[comp]),
                    kPendN5Ord[i][j]);
        ++gated;
        continue;
      }
      const double got = round1(orders[i].comp_orders[comp]);
      const bool entry = std::abs(got - kPendN5Ord[i][j]) <= 0.4 + 1e-9;
      ok = ok && entry;
      line += fmt(" %.1f/%.1f%s", got, kPendN5Ord[i][j], entry ? " " : "*");
    }
    c.check(ok, line);
  }
  c.info(fmt("%d entries below the 1e-11 round-off gate (parenthesized, "
             "not penalized)",
             gated));
}

// -------------------------------------------------------------- criterion 3
void criterion3(Criterion& c, Context& ctx) {
  const BenchmarkProblem prob = campbell_moore();
  std::vector<std::vector<double>> h1d(5);
  for (int N = 1; N <= 5; ++N) {
    StudyOptions opt;
    opt.N = N;
    opt.M = N + 1;
    opt.family = NodeFamily::gauss_legendre;
    opt.n_list = {10, 20, 40, 80, 160};
    const ConvergenceStudy st = run_convergence_study(prob, opt);
    collect_monotone(ctx, st);
    for (const auto& r : st.rows)
      h1d[N - 1].push_back(r.failed ? std::numeric_limits<double>::quiet_NaN()
                                    : r.h1d);
  }
  // N=5 column within factor 5; the expected n=160 entry is already at the
  // stagnation floor of the source data, so only the upper bound applies there
  for (int i = 0; i < 5; ++i) {
    const double got = h1d[4][i], want = kCmH1d[i][4];
    const bool last = (i == 4);
    const bool ok =
        last ? got <= want * 5.0 : (got >= want / 5.0 && got <= want * 5.0);
    c.check(ok, fmt("N=5 n=%-3d h1d %.3e vs %.3e (factor 5%s)", 10 << i, got,
                    want, last ? ", upper bound only" : ""));
  }
  // N=5 orders ~ 3 away from the observed floor
  const double floor5 = h1d[4][4];
  for (int i = 0; i < 4; ++i) {
    if (!(h1d[4][i] >= 10 * floor5 && h1d[4][i + 1] >= 10 * floor5)) {
      c.info(fmt("N=5 order at n=%d skipped (stagnation floor)", 10 << i));
      continue;
    }
    const double ord = std::log2(h1d[4][i] / h1d[4][i + 1]);
    c.check(std::abs(ord - 3.0) <= 0.8,
            fmt("N=5 order at n=%-3d = %.2f (expected ~3)", 10 << i, ord));
  }
  // N=1 column bounded
  double worst = 0.0;
  for (double v : h1d[0]) worst = std::max(worst, v);
  c.check(worst <= 10.0 * 3.32e+1,
          fmt("N=1 column bounded: max h1d %.3e <= %.3e", worst, 332.0));
  for (int N = 1; N <= 5; ++N) {
    std::string line = fmt("N=%d h1d ", N);
    for (double v : h1d[N - 1]) line += fmt(" %.3e", v);
    c.info(line);
  }
}

// -------------------------------------------------------------- criterion 4
void criterion4(Criterion& c, Context& ctx) {
  const int N = 3, n = 8;
  const BenchmarkProblem prob = manufactured_in_space(N, n);
  auto space = make_space(make_uniform_partition(0, 1, n), N, 2, 1);
  const AnsatzElement exact = interpolate(
      space, [&](double t) { return prob.sys.reference(t).x; });
  const CollocationScheme sc =
      make_scheme(N + 1, NodeFamily::gauss_legendre, N);
  const double psi0 = objective(prob.sys, exact, sc);
  c.check(psi0 <= 1e-18, fmt("psi at the exact element: %.3e <= 1e-18", psi0));

  AnsatzElement start = exact;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  for (Index i = 0; i < start.coeffs.size(); ++i) start.coeffs[i] += u(rng);
  auto [sol, tr] = gn_solve(prob.sys, sc, start, {});
  ctx.monotone.push_back(tr.psi_nonincreasing());
  const double dev = (sol.coeffs - exact.coeffs).cwiseAbs().maxCoeff();
  c.check(dev <= 1e-8,
          fmt("coefficient recovery from 1e-3 perturbation: %.3e <= 1e-8",
              dev));
}

// -------------------------------------------------------------- criterion 5
void criterion5(Criterion& c, Context&) {
  const CollocationScheme u2 = make_scheme(2, NodeFamily::uniform_interior, 1);
  Matrix expect(2, 2);
  expect << 2, -1, -1, 2;
  c.check((u2.gram - expect).cwiseAbs().maxCoeff() <= 1e-12,
          "gram(M=2, uniform) equals [[2,-1],[-1,2]] to 1e-12");

  bool diag_ok = true;
  for (int M = 2; M <= 8; ++M) {
    const CollocationScheme g = make_scheme(M, NodeFamily::gauss_legendre, 1);
    const QuadratureRule q = gauss_legendre_01(M);
    for (int i = 0; i < M && diag_ok; ++i)
      for (int j = 0; j < M && diag_ok; ++j)
        diag_ok = g.gram(i, j) == (i == j ? M * q.weights[i] : 0.0);
  }
  c.check(diag_ok, "gauss gram diagonal equals M * (gauss weights), M <= 8");

  bool spd = true;
  for (NodeFamily f :
       {NodeFamily::uniform_interior, NodeFamily::gauss_legendre})
    for (int M = 2; M <= 10; ++M) {
      const CollocationScheme s = make_scheme(M, f, 1);
      Eigen::SelfAdjointEigenSolver<Matrix> es(s.gram);
      spd = spd && es.eigenvalues().minCoeff() > 0.0 &&
            (s.gram - s.gram.transpose()).cwiseAbs().maxCoeff() == 0.0;
    }
  c.check(spd, "gram symmetric positive definite for all tested schemes");

  const CollocationScheme a = make_scheme(4, NodeFamily::uniform_interior, 3);
  const CollocationScheme b = make_scheme(4, NodeFamily::uniform_interior, 3);
  c.check(std::memcmp(a.gram.data(), b.gram.data(),
                      sizeof(double) * a.gram.size()) == 0 &&
              a.gram.size() == b.gram.size(),
          "gram is partition independent (byte-identical rebuild)");
}

// -------------------------------------------------------------- criterion 6
void criterion6(Criterion& c, Context&) {
  for (int mu : {1, 2, 3}) {
    const BenchmarkProblem prob = linear_chain(mu, -0.5);
    const SvScan scan = run_sv_scan(prob, 3, 4, NodeFamily::gauss_legendre,
                                    {16, 32, 64, 128});
    c.check(std::abs(scan.slope - (mu - 1)) <= 0.4,
            fmt("chain mu=%d: sigma_min slope %.3f vs %d (within 0.4); raw "
                "matrix slope %.3f",
                mu, scan.slope, mu - 1, scan.slope_raw));
  }
}

// -------------------------------------------------------------- criterion 7
void criterion7(Criterion& c, Context& ctx) {
  ensure_pend_n3(ctx, {10, 20, 40, 80, 160});
  // monotonicity collected from every solver run of the suite
  int bad = 0;
  for (bool m : ctx.monotone)
    if (!m) ++bad;
  c.check(bad == 0, fmt("psi non-increasing on all %d runs (%d violations)",
                        static_cast<int>(ctx.monotone.size()), bad));

  // one-step convergence on a linear problem
  const BenchmarkProblem chain = linear_chain(2, -0.5);
  auto space = make_space(make_uniform_partition(0, 1, 6), 2, 3, 2);
  AnsatzElement x0 = interpolate(
      space, [&](double t) { return chain.sys.reference(t).x; });
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (Index i = 0; i < x0.coeffs.size(); ++i) x0.coeffs[i] += u(rng);
  const CollocationScheme sc = make_scheme(3, NodeFamily::gauss_legendre, 2);
  const DiscreteResidual dr = assemble(chain.sys, x0, sc, true);
  const LsqSolution direct = solve_lsq(dr.dense_jacobian(), dr.r);
  auto [sol, tr] = gn_solve(chain.sys, sc, x0, {});
  const double psi_min = direct.residual_norm * direct.residual_norm;
  const double rel = std::abs(tr.iterates[0].psi - psi_min) /
                     std::max(psi_min, 1e-300);
  c.check(rel <= 1e-10,
          fmt("linear problem: one undamped step reaches the optimum "
              "(rel. dev %.2e)",
              rel));

  // descent identity on the pendulum
  const BenchmarkProblem pend = pendulum();
  auto pspace = make_space(make_uniform_partition(0, 1, 10), 3, 5, 4);
  AnsatzElement pe = interpolate(
      pspace, [&](double t) { return pend.sys.reference(t).x; });
  std::uniform_real_distribution<double> u2(-1e-3, 1e-3);
  for (Index i = 0; i < pe.coeffs.size(); ++i) pe.coeffs[i] += u2(rng);
  const CollocationScheme psc =
      make_scheme(4, NodeFamily::uniform_interior, 3);
  const DescentReport rep = descent_check(pend.sys, psc, pe);
  const double reld = std::abs(rep.directional_derivative - rep.predicted) /
                      std::abs(rep.predicted);
  c.check(reld <= 1e-4 && rep.directional_derivative < 0.0,
          fmt("descent identity: fd %.6e vs -2|Vr|^2 %.6e (rel. dev %.2e)",
              rep.directional_derivative, rep.predicted, reld));
}

// -------------------------------------------------------------- criterion 8
void criterion8(Criterion& c, Context& ctx) {
  ensure_pend_n3(ctx, {10, 20, 40, 80, 160});
  const BenchmarkProblem prob = pendulum();
  auto space = make_space(make_uniform_partition(0, 1, 10), 3, 5, 4);
  const AnsatzElement x0 = interpolate(
      space, [&](double t) { return prob.sys.reference(t).x; });
  const CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  MultilevelConfig cfg;
  cfg.levels = 5;  // n = 10, 20, 40, 80, 160
  const auto levels = multilevel_solve(prob.sys, sc, x0, cfg);
  int warm_iters = 0, cold_iters = 0;
  bool within = true;
  for (int i = 0; i < 5; ++i) {
    ctx.monotone.push_back(levels[i].trace.psi_nonincreasing());
    warm_iters += levels[i].trace.iterations();
    cold_iters += ctx.pend_n3.rows[i].gn_iters;
    for (int comp = 0; comp < 5; ++comp) {
      const double warm = levels[i].errors->comp_l2[comp];
      const double cold = ctx.pend_n3.rows[i].comp_errors[comp];
      within = within && warm <= 2.0 * cold && warm >= cold / 2.0;
    }
    c.info(fmt("level %d (n=%-3d): iters %d vs cold %d, h1d %.3e vs %.3e", i,
               levels[i].n, levels[i].trace.iterations(),
               ctx.pend_n3.rows[i].gn_iters, levels[i].errors->h1d,
               ctx.pend_n3.rows[i].h1d));
  }
  c.check(within, "per-level component errors within factor 2 of cold rows");
  c.check(warm_iters <= cold_iters,
          fmt("total iterations: warm %d <= cold %d", warm_iters, cold_iters));
}

// -------------------------------------------------------------- criterion 9
void criterion9(Criterion& c, Context&) {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> g(0, 1);
  int holds = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 10 + static_cast<int>(rng() % 40);
    const int cols = 2 + static_cast<int>(rng() % std::min(rows - 1, 20));
    Matrix A(rows, cols), B(rows, cols);
    for (Index i = 0; i < A.size(); ++i) {
      A.data()[i] = g(rng);
      B.data()[i] = g(rng);
    }
    if (trial % 7 == 0) B = A + 1e-8 * B;       // near-identical pairs
    if (trial % 11 == 0) B.col(0).setZero();    // rank-deficient pairs
    if (perturbation_check(A, B).within_bound) ++holds;
  }
  c.check(holds == 100,
          fmt("singular-value perturbation bound holds on %d/100 random "
              "pairs (slack 1e-10)",
              holds));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  struct Entry {
    int id;
    const char* name;
    void (*fn)(Criterion&, Context&);
    double time_limit;
  };
  const Entry entries[] = {
      {1, "pendulum N=3 error table and orders", criterion1, 300},
      {2, "pendulum N=5 orders above round-off", criterion2, 300},
      {3, "satellite problem H1D errors, N=1..5", criterion3, 900},
      {4, "manufactured in-space exactness witness", criterion4, 120},
      {5, "gram matrix properties", criterion5, 60},
      {6, "instability-threshold scaling of sigma_min", criterion6, 120},
      {7, "solver properties (monotonicity, one-step, descent)", criterion7,
       120},
      {8, "multilevel warm start vs cold start", criterion8, 300},
      {9, "singular-value perturbation inequality", criterion9, 60},
  };

  Context ctx;
  int failures = 0;
  for (const Entry& e : entries) {
    if (!only.empty() && !only.count(e.id)) continue;
    Criterion c;
    c.id = e.id;
    c.name = e.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(c, ctx);
    } catch (const std::exception& err) {
      c.check(false, std::string("exception: ") + err.what());
    }
    c.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    if (c.seconds > e.time_limit) c.check(false, "runtime limit exceeded");
    std::printf("[%s] criterion %d: %s (%.1fs)\n", c.pass ? "PASS" : "FAIL",
                c.id, c.name.c_str(), c.seconds);
    for (const auto& n : c.notes) std::printf("%s\n", n.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("%d criteria failed\n", failures);
  return failures;
}
