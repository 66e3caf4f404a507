#pragma once

#include <cmath>

#include "lsqdae/ansatz.hpp"
#include "lsqdae/dae_system.hpp"
#include "lsqdae/lagrange.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

struct ErrorReport {
  Vector comp_l2;       // per-component L2 errors over (a,b)
  double combined_l2 = 0.0;
  double h1d = 0.0;     // sqrt(|x-x*|_L2^2 + |(Dx)'-(Dx*)'|_L2^2)
  Vector comp_max;      // informational sup-norm estimates (sampled)
};

/// Error norms of an element against a reference solution, by composite
/// Gauss quadrature on the element's own partition. quad_points >= 2N+2 makes
/// the quadrature exact for the polynomial factor.
inline ErrorReport error_norms(const AnsatzElement& e,
                               const ReferenceFn& reference, int quad_points) {
  const AnsatzSpace& sp = *e.space;
  if (quad_points < 1) quad_points = 2 * sp.N + 2;
  const QuadratureRule q = gauss_legendre_01(quad_points);

  ErrorReport rep;
  rep.comp_l2 = Vector::Zero(sp.m);
  rep.comp_max = Vector::Zero(sp.m);
  Vector l2sq = Vector::Zero(sp.m);
  double dsq = 0.0;
  for (int j = 0; j < sp.n(); ++j) {
    const double t0 = sp.partition.breakpoints[j];
    const double hj = sp.partition.h(j);
    for (int p = 0; p < quad_points; ++p) {
      const double t = t0 + q.nodes[p] * hj;
      const EvalResult ev = evaluate(e, t);
      const ReferencePoint rp = reference(t);
      for (int c = 0; c < sp.m; ++c) {
        const double d = ev.x[c] - rp.x[c];
        l2sq[c] += hj * q.weights[p] * d * d;
        rep.comp_max[c] = std::max(rep.comp_max[c], std::abs(d));
      }
      for (int c = 0; c < sp.k; ++c) {
        const double d = ev.dx_diff[c] - rp.dx_diff[c];
        dsq += hj * q.weights[p] * d * d;
      }
    }
  }
  if (!all_finite(l2sq) || !std::isfinite(dsq))
    throw NumericalError("error_norms: non-finite");
  rep.comp_l2 = l2sq.cwiseSqrt();
  rep.combined_l2 = std::sqrt(l2sq.sum());
  rep.h1d = std::sqrt(l2sq.sum() + dsq);
  return rep;
}

/// Discrete H^1_D norm of an element (exact quadrature of the polynomial
/// integrands).
inline double element_h1d_norm(const AnsatzElement& e) {
  const AnsatzSpace& sp = *e.space;
  const QuadratureRule q =
      gauss_legendre_01(std::max(sp.N, sp.alg_nodes) + 1);
  double acc = 0.0;
  for (int j = 0; j < sp.n(); ++j) {
    const double t0 = sp.partition.breakpoints[j];
    const double hj = sp.partition.h(j);
    for (int p = 0; p < q.nodes.size(); ++p) {
      const EvalResult ev = evaluate(e, t0 + q.nodes[p] * hj);
      acc += hj * q.weights[p] *
             (ev.x.squaredNorm() + ev.dx_diff.squaredNorm());
    }
  }
  return std::sqrt(acc);
}

/// Gram matrix of the coefficient basis in the H^1_D inner product
///   (x, y) = (x, y)_L2 + ((Dx)', (Dy)')_L2,
/// assembled per interval from the reference mass and stiffness integrals.
inline Matrix build_h1d_gram(const AnsatzSpace& sp) {
  const int N = sp.N;
  const int A = sp.alg_nodes;
  const QuadratureRule q = gauss_legendre_01(std::max(N, A) + 1);
  Matrix mass_d = Matrix::Zero(N + 1, N + 1);
  Matrix stiff_d = Matrix::Zero(N + 1, N + 1);
  Matrix mass_a = Matrix::Zero(A, A);
  for (int p = 0; p < q.nodes.size(); ++p) {
    const Vector ld = sp.diff_basis.values_at(q.nodes[p]);
    const Vector ldd = sp.diff_basis.diff.transpose() * ld;
    const Vector la = sp.alg_basis.values_at(q.nodes[p]);
    mass_d += q.weights[p] * (ld * ld.transpose());
    stiff_d += q.weights[p] * (ldd * ldd.transpose());
    mass_a += q.weights[p] * (la * la.transpose());
  }

  Matrix H = Matrix::Zero(sp.dim(), sp.dim());
  for (int j = 0; j < sp.n(); ++j) {
    const double hj = sp.partition.h(j);
    for (int comp = 0; comp < sp.k; ++comp)
      for (int a = 0; a <= N; ++a)
        for (int b = 0; b <= N; ++b)
          H(sp.coeff_index(j, comp, a), sp.coeff_index(j, comp, b)) +=
              hj * mass_d(a, b) + stiff_d(a, b) / hj;
    for (int comp = sp.k; comp < sp.m; ++comp)
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < A; ++b)
          H(sp.coeff_index(j, comp, a), sp.coeff_index(j, comp, b)) +=
              hj * mass_a(a, b);
  }
  return H;
}

}  // namespace lsqdae
