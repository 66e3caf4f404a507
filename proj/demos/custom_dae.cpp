// Defining and solving your own DAE.
//
// The system below is a classic index-2 differentiation chain,
//
//   x1' = x2
//   0   = x1 - sin(t)
//
// on (0, 2): the constraint pins the differential variable x1, and the
// algebraic variable x2 is only determined through the derivative of the
// constraint (x2 = cos t). Standard collocation cannot treat this directly;
// the overdetermined least-squares formulation can, and the problem needs no
// boundary condition at all (the dynamical degree of freedom is zero).

#include <cstdio>

#include "lsqdae/gauss_newton.hpp"
#include "lsqdae/metrics.hpp"

using namespace lsqdae;

int main() {
  DAESystem sys;
  sys.m = 2;   // two components ...
  sys.k = 1;   // ... the first one differential
  sys.l = 0;   // no boundary conditions
  sys.mu = 2;  // declared index (metadata)
  sys.interval = {0.0, 2.0};
  sys.residual = [](const Vector& y, const Vector& x, double t) {
    Vector f(2);
    f[0] = y[0] - x[1];
    f[1] = x[0] - std::sin(t);
    return f;
  };
  // Analytic Jacobians are optional; central differences would be installed
  // by with_fd_fallbacks(sys) otherwise.
  sys.jac_y = [](const Vector&, const Vector&, double) {
    Matrix A = Matrix::Zero(2, 1);
    A(0, 0) = 1.0;
    return A;
  };
  sys.jac_x = [](const Vector&, const Vector&, double) {
    Matrix B = Matrix::Zero(2, 2);
    B(0, 1) = -1.0;
    B(1, 0) = 1.0;
    return B;
  };
  // A reference solution enables error reports (optional otherwise).
  sys.reference = [](double t) {
    ReferencePoint rp;
    rp.x.resize(2);
    rp.x << std::sin(t), std::cos(t);
    rp.dx_diff.resize(1);
    rp.dx_diff << std::cos(t);
    return rp;
  };

  // Degree-3 ansatz, M = N+1 Gauss collocation points per subinterval.
  const int N = 3;
  const CollocationScheme scheme =
      make_scheme(N + 1, NodeFamily::gauss_legendre, N);

  std::printf("  n   iterations   psi_final     L2 error (x1, x2)\n");
  for (int n : {5, 10, 20, 40}) {
    auto space = make_space(make_uniform_partition(0.0, 2.0, n), N, sys.m,
                            sys.k);
    auto [solution, trace] = gn_solve(sys, scheme, zero_element(space), {});
    const ErrorReport err = error_norms(solution, sys.reference, -1);
    std::printf("%4d   %6d      %9.3e    %9.3e  %9.3e\n", n,
                trace.iterations(), trace.psi_final, err.comp_l2[0],
                err.comp_l2[1]);
  }

  // The solution is an ordinary element: evaluate it anywhere.
  auto space = make_space(make_uniform_partition(0.0, 2.0, 20), N, 2, 1);
  auto [solution, trace] = gn_solve(sys, scheme, zero_element(space), {});
  const EvalResult at1 = evaluate(solution, 1.0);
  std::printf("x(1.0) = (%.8f, %.8f), exact (%.8f, %.8f)\n", at1.x[0],
              at1.x[1], std::sin(1.0), std::cos(1.0));
  return trace.termination == Termination::numerical_error ? 1 : 0;
}
