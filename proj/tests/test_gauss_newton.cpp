#include <catch2/catch.hpp>
#include <random>

#include "lsqdae/gauss_newton.hpp"
#include "lsqdae/lsq.hpp"
#include "lsqdae/metrics.hpp"
#include "lsqdae/problems.hpp"

using namespace lsqdae;

namespace {

AnsatzElement reference_interpolant(const BenchmarkProblem& p, int n, int N) {
  auto space = make_space(
      make_uniform_partition(p.sys.interval.a, p.sys.interval.b, n), N,
      p.sys.m, p.sys.k);
  return interpolate(space, [&](double t) { return p.sys.reference(t).x; });
}

void perturb(AnsatzElement& e, double scale, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Index i = 0; i < e.coeffs.size(); ++i) e.coeffs[i] += u(rng);
}

}  // namespace

TEST_CASE("pendulum solve from the reference interpolant", "[gn]") {
  const BenchmarkProblem p = pendulum();
  const AnsatzElement x0 = reference_interpolant(p, 10, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  auto [sol, tr] = gn_solve(p.sys, sc, x0, {});
  CHECK(tr.termination != Termination::numerical_error);
  CHECK(tr.psi_nonincreasing());
  CHECK(tr.psi_final < 2e-5);
  const ErrorReport rep = error_norms(sol, p.sys.reference, -1);
  // published error levels for this run are an upper bound; the computed
  // minimizer is tighter (see the acceptance suite for the table comparison)
  const double bound[5] = {4.42e-2, 1.83e-2, 1.17e-1, 1.01e-1, 6.25e-1};
  for (int c = 0; c < 5; ++c) CHECK(rep.comp_l2[c] <= 3.0 * bound[c]);
  CHECK(rep.comp_l2[4] >= 6.25e-1 / 3.0);  // multiplier error matches level
}

TEST_CASE("gauss-newton converges in one step on linear problems", "[gn]") {
  const BenchmarkProblem p = linear_chain(2, -0.5);
  AnsatzElement x0 = reference_interpolant(p, 4, 2);  // coarse: psi_min > 0
  perturb(x0, 0.1, 21);
  CollocationScheme sc = make_scheme(3, NodeFamily::gauss_legendre, 2);

  // one-shot optimum straight from the dense engine
  const DiscreteResidual dr0 = assemble(p.sys, x0, sc, true);
  const LsqSolution direct = solve_lsq(dr0.dense_jacobian(), dr0.r);
  const double psi_min = direct.residual_norm * direct.residual_norm;
  REQUIRE(psi_min > 1e-14);

  auto [sol, tr] = gn_solve(p.sys, sc, x0, {});
  REQUIRE(tr.iterations() >= 1);
  CHECK(tr.iterates[0].damping_used == 1.0);
  CHECK(tr.iterates[0].psi == Approx(psi_min).epsilon(1e-10));
  CHECK(tr.psi_final == Approx(psi_min).epsilon(1e-10));
  CHECK(tr.iterations() <= 3);  // first step is exact, the rest terminates
}

TEST_CASE("stationary start stops immediately", "[gn]") {
  const BenchmarkProblem p = linear_chain(2, -0.5, /*poly_degree=*/2);
  const AnsatzElement x0 = reference_interpolant(p, 8, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  CHECK(objective(p.sys, x0, sc) <= 1e-20);
  GNConfig cfg;
  cfg.check_optimality = true;
  auto [sol, tr] = gn_solve(p.sys, sc, x0, cfg);
  REQUIRE(tr.iterations() >= 1);
  CHECK(tr.iterates[0].step_norm <= 1e-10);
  CHECK((tr.termination == Termination::no_improvement ||
         tr.termination == Termination::step_small));
  CHECK(tr.psi_final <= 1e-20);
}

TEST_CASE("objective is non-increasing with armijo damping", "[gn]") {
  for (const BenchmarkProblem& p :
       {pendulum(), campbell_moore(), manufactured_in_space(2, 6)}) {
    const int N = 2;
    for (int n : {4, 8}) {
      AnsatzElement x0 = reference_interpolant(p, n, N);
      perturb(x0, 1e-2, 100 + n);
      CollocationScheme sc = make_scheme(N + 1, NodeFamily::gauss_legendre, N);
      auto [sol, tr] = gn_solve(p.sys, sc, x0, {});
      INFO(p.name << " n=" << n);
      CHECK(tr.psi_nonincreasing());
    }
  }
}

TEST_CASE("subproblem optimality holds along the iteration", "[gn]") {
  const BenchmarkProblem p = pendulum();
  AnsatzElement x0 = reference_interpolant(p, 8, 3);
  GNConfig cfg;
  cfg.check_optimality = true;
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  const DiscreteResidual dr = assemble(p.sys, x0, sc, true);
  const double scale = 1.0 + dr.apply_jacobian_transpose(dr.r).norm();
  auto [sol, tr] = gn_solve(p.sys, sc, x0, cfg);
  for (const auto& it : tr.iterates) {
    REQUIRE(std::isfinite(it.optimality_residual));
    CHECK(it.optimality_residual <= 1e-8 * scale);
  }
}

TEST_CASE("descent identity", "[gn]") {
  // at a stationary point both sides vanish
  {
    const BenchmarkProblem p = linear_chain(2, -0.5, 2);
    const AnsatzElement x0 = reference_interpolant(p, 8, 3);
    CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
    const DescentReport rep = descent_check(p.sys, sc, x0);
    CHECK(std::abs(rep.predicted) <= 1e-16);
    CHECK(std::abs(rep.directional_derivative) <= 1e-10);
  }
  // linear problem: the identity is exact (quadratic objective)
  {
    const BenchmarkProblem p = linear_chain(2, -0.5);
    AnsatzElement x0 = reference_interpolant(p, 10, 3);
    perturb(x0, 0.05, 4);
    CollocationScheme sc = make_scheme(4, NodeFamily::gauss_legendre, 3);
    const DescentReport rep = descent_check(p.sys, sc, x0);
    CHECK(rep.directional_derivative < 0.0);
    CHECK(rep.directional_derivative ==
          Approx(rep.predicted).epsilon(1e-8));
  }
  // pendulum with a perturbed interpolant: agreement to 1e-4 relative
  {
    const BenchmarkProblem p = pendulum();
    AnsatzElement x0 = reference_interpolant(p, 10, 3);
    perturb(x0, 1e-3, 8);
    CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
    const DescentReport rep = descent_check(p.sys, sc, x0);
    CHECK(rep.directional_derivative < 0.0);
    CHECK(rep.directional_derivative ==
          Approx(rep.predicted).epsilon(1e-4));
  }
}

TEST_CASE("psi is consistent under exact embedding into a finer mesh",
          "[gn]") {
  // for a linear problem with polynomial data the residual is a per-interval
  // polynomial of degree < M, so the interpolation underlying the functional
  // is exact and refining the mesh cannot change the value
  const BenchmarkProblem p = linear_chain(2, -0.5, /*poly_degree=*/1);
  const int N = 3, M = 4;
  auto coarse = make_space(make_uniform_partition(0, 1, 5), N, 3, 2);
  AnsatzElement e =
      interpolate(coarse, [&](double t) { return p.sys.reference(t).x; });
  perturb(e, 0.05, 19);
  CollocationScheme sc = make_scheme(M, NodeFamily::gauss_legendre, N);
  const double psi_coarse = objective(p.sys, e, sc);
  auto fine = make_space(refine_nested(coarse->partition, 2), N, 3, 2);
  const double psi_fine = objective(p.sys, prolongate(e, fine), sc);
  CHECK(psi_fine == Approx(psi_coarse).epsilon(1e-10));
}

TEST_CASE("numerical failure returns the best iterate seen", "[gn]") {
  BenchmarkProblem p = manufactured_in_space(2, 4);
  DAESystem sys = p.sys;
  auto base = sys.jac_y;
  // the jacobian turns non-finite on its 13th call: the initial assemble
  // (4 intervals x 3 nodes) succeeds, the post-step reassembly fails
  auto calls = std::make_shared<int>(0);
  sys.jac_y = [base, calls](const Vector& y, const Vector& x, double t) {
    Matrix A = base(y, x, t);
    if (++*calls > 12) A(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return A;
  };
  p.sys = sys;
  auto space = make_space(make_uniform_partition(0, 1, 4), 2, 2, 1);
  AnsatzElement x0 = interpolate(
      space, [&](double t) { return p.sys.reference(t).x; });
  perturb(x0, 0.1, 5);
  CollocationScheme sc = make_scheme(3, NodeFamily::gauss_legendre, 2);
  auto [sol, tr] = gn_solve(p.sys, sc, x0, {});
  CHECK(tr.termination == Termination::numerical_error);
  CHECK_FALSE(tr.message.empty());
  CHECK(tr.iterations() >= 1);  // the accepted first step survives
  CHECK(all_finite(sol.coeffs));
}

TEST_CASE("trace serializes to JSON lines", "[gn]") {
  const BenchmarkProblem p = manufactured_in_space(2, 4);
  AnsatzElement x0 = reference_interpolant(p, 4, 2);
  perturb(x0, 0.01, 2);
  CollocationScheme sc = make_scheme(3, NodeFamily::gauss_legendre, 2);
  auto [sol, tr] = gn_solve(p.sys, sc, x0, {});
  const std::string lines = trace_to_json_lines(tr);
  REQUIRE_FALSE(lines.empty());
  std::istringstream in(lines);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("k"));
    CHECK(j.contains("psi"));
    CHECK(j.contains("residual_norm"));
    CHECK(j.contains("step_norm"));
    CHECK(j.contains("damping_used"));
    CHECK(j.contains("rank_estimate"));
    ++count;
  }
  CHECK(count == tr.iterations());
}
