#include <catch2/catch.hpp>

#include "lsqdae/multilevel.hpp"
#include "lsqdae/problems.hpp"

using namespace lsqdae;

namespace {

AnsatzElement reference_interpolant(const BenchmarkProblem& p, int n, int N) {
  auto space = make_space(
      make_uniform_partition(p.sys.interval.a, p.sys.interval.b, n), N,
      p.sys.m, p.sys.k);
  return interpolate(space, [&](double t) { return p.sys.reference(t).x; });
}

}  // namespace

TEST_CASE("one level reduces to a plain solve", "[multilevel]") {
  const BenchmarkProblem p = pendulum();
  const AnsatzElement x0 = reference_interpolant(p, 10, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  MultilevelConfig cfg;
  cfg.levels = 1;
  const auto levels = multilevel_solve(p.sys, sc, x0, cfg);
  REQUIRE(levels.size() == 1);
  auto [sol, tr] = gn_solve(p.sys, sc, x0, cfg.gn);
  CHECK((levels[0].solution.coeffs - sol.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(levels[0].trace.psi_final == tr.psi_final);
}

TEST_CASE("exact polynomial solution is reproduced at every level",
          "[multilevel]") {
  const BenchmarkProblem p = linear_chain(2, -0.5, /*poly_degree=*/2);
  const AnsatzElement x0 = reference_interpolant(p, 4, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::gauss_legendre, 3);
  MultilevelConfig cfg;
  cfg.levels = 3;
  const auto levels = multilevel_solve(p.sys, sc, x0, cfg);
  REQUIRE(levels.size() == 3);
  for (const auto& lev : levels) {
    CHECK(lev.trace.psi_final <= 1e-18);
    REQUIRE(lev.errors.has_value());
    CHECK(lev.errors->combined_l2 <= 1e-10);
    if (lev.level > 0) CHECK(lev.trace.iterates[0].step_norm <= 1e-9);
  }
  CHECK(levels[2].n == 16);
}

TEST_CASE("warm start is never worse than a cold zero start", "[multilevel]") {
  const BenchmarkProblem p = pendulum();
  const AnsatzElement x0 = reference_interpolant(p, 10, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  MultilevelConfig cfg;
  cfg.levels = 3;
  const auto levels = multilevel_solve(p.sys, sc, x0, cfg);
  REQUIRE(levels.size() == 3);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const auto& prev = levels[i - 1];
    auto fine = make_space(refine_nested(prev.solution.space->partition, 2),
                           3, 5, 4);
    const double psi_warm =
        objective(p.sys, prolongate(prev.solution, fine), sc);
    const double psi_zero = objective(p.sys, zero_element(fine), sc);
    CHECK(std::isfinite(psi_warm));
    CHECK(psi_warm < psi_zero);
  }
}

TEST_CASE("errors decrease strictly across levels", "[multilevel]") {
  const BenchmarkProblem p = pendulum();
  const AnsatzElement x0 = reference_interpolant(p, 10, 3);
  CollocationScheme sc = make_scheme(4, NodeFamily::uniform_interior, 3);
  MultilevelConfig cfg;
  cfg.levels = 4;
  const auto levels = multilevel_solve(p.sys, sc, x0, cfg);
  REQUIRE(levels.size() == 4);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    REQUIRE(levels[i].errors.has_value());
    CHECK(levels[i].errors->combined_l2 <
          levels[i - 1].errors->combined_l2);
  }
}

TEST_CASE("a failed level aborts the remaining ones", "[multilevel]") {
  // a scalar ODE whose data blow up in a narrow band that only the level-2
  // mesh samples: with n = 2, 4, 8 and two Gauss points per subinterval the
  // collocation abscissae are (j + tau_i)/n, and 0.211325/8 = 0.0264 stays
  // at distance > 0.02 from every coarser-level abscissa
  const double bad = gauss_legendre_01(2).nodes[0] / 8.0;
  DAESystem sys;
  sys.m = 1;
  sys.k = 1;
  sys.l = 1;
  sys.mu = 1;
  sys.interval = {0.0, 1.0};
  sys.residual = [bad](const Vector& y, const Vector& x, double t) {
    Vector f(1);
    f[0] = y[0] + x[0] - 1.0;
    if (std::abs(t - bad) < 5e-3)
      f[0] = std::numeric_limits<double>::infinity();
    return f;
  };
  sys.jac_y = [](const Vector&, const Vector&, double) {
    return Matrix::Identity(1, 1);
  };
  sys.jac_x = [](const Vector&, const Vector&, double) {
    return Matrix::Identity(1, 1);
  };
  sys.boundary = [](const Vector& u, const Vector&) {
    Vector g(1);
    g[0] = u[0] - 1.0;
    return g;
  };
  sys.boundary_jac = [](const Vector&, const Vector&) {
    return std::make_pair(Matrix::Identity(1, 1), Matrix::Zero(1, 1));
  };

  auto space = make_space(make_uniform_partition(0, 1, 2), 1, 1, 1);
  CollocationScheme sc = make_scheme(2, NodeFamily::gauss_legendre, 1);
  MultilevelConfig cfg;
  cfg.levels = 4;
  const auto levels = multilevel_solve(sys, sc, zero_element(space), cfg);
  REQUIRE(levels.size() == 3);  // levels 0 and 1 succeed, level 2 fails
  CHECK(levels[0].trace.termination != Termination::numerical_error);
  CHECK(levels[1].trace.termination != Termination::numerical_error);
  CHECK(levels[2].trace.termination == Termination::numerical_error);
}

TEST_CASE("config validation", "[multilevel]") {
  MultilevelConfig cfg;
  cfg.levels = 0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg.levels = 2;
  cfg.q_inverse = 1;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}
