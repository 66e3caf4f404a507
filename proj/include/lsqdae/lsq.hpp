#pragma once

#include <optional>

#include "lsqdae/types.hpp"

namespace lsqdae {

struct LsqSolution {
  Vector z;
  double residual_norm = 0.0;
  Index rank_estimate = 0;
  std::optional<double> smallest_singular_value;
  std::optional<double> condition_estimate;
};

/// Minimizes |J z + r|^2 by column-pivoted Householder QR. If the estimated
/// rank is below the column count, falls back to the SVD minimum-norm
/// solution (Moore-Penrose behavior). rank_tol < 0 selects the conventional
/// default max(rows,cols) * eps * sigma_max.
inline LsqSolution solve_lsq(const Matrix& J, const Vector& r,
                             double rank_tol = -1.0) {
  if (J.rows() < J.cols())
    throw ArgumentError("solve_lsq: need rows >= cols");
  if (J.rows() != r.size())
    throw ArgumentError("solve_lsq: rhs size mismatch");
  if (!all_finite(J) || !all_finite(r))
    throw NumericalError("solve_lsq: non-finite input");

  Eigen::ColPivHouseholderQR<Matrix> qr(J);
  // |R(0,0)| of the pivoted factorization is a sigma_max proxy.
  const double rmax = J.cols() > 0 ? std::abs(qr.matrixR()(0, 0)) : 0.0;
  const double tol =
      rank_tol >= 0.0
          ? rank_tol
          : static_cast<double>(std::max(J.rows(), J.cols())) *
                std::numeric_limits<double>::epsilon() * rmax;
  Index rank = 0;
  for (Index i = 0; i < J.cols(); ++i)
    if (std::abs(qr.matrixR()(i, i)) > tol) ++rank;

  LsqSolution sol;
  sol.rank_estimate = rank;
  if (rank == J.cols()) {
    sol.z = qr.solve(-r);
  } else {
    Eigen::BDCSVD<Matrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (rmax > 0.0) svd.setThreshold(tol / rmax);
    sol.z = svd.solve(-r);
    sol.rank_estimate = svd.rank();
    sol.smallest_singular_value = svd.singularValues()(J.cols() - 1);
    sol.condition_estimate =
        svd.singularValues()(0) /
        std::max(svd.singularValues()(J.cols() - 1),
                 std::numeric_limits<double>::min());
  }
  sol.residual_norm = (J * sol.z + r).norm();
  if (!all_finite(sol.z))
    throw NumericalError("solve_lsq: non-finite solution");
  return sol;
}

/// sigma_min(J); 1/sigma_min is the norm of the pseudoinverse.
inline double smallest_singular_value(const Matrix& J) {
  if (J.rows() < J.cols())
    throw ArgumentError("smallest_singular_value: need rows >= cols");
  if (!all_finite(J))
    throw NumericalError("smallest_singular_value: non-finite input");
  Eigen::BDCSVD<Matrix> svd(J);
  return svd.singularValues()(J.cols() - 1);
}

struct PerturbationReport {
  double sv_deviation_max = 0.0;
  double bound = 0.0;  // |A - B|_2
  bool within_bound = false;
};

/// Weyl-type perturbation check: max_i |sigma_i(A) - sigma_i(B)| <= |A-B|_2
/// (with 1e-10 slack for round-off).
inline PerturbationReport perturbation_check(const Matrix& A,
                                             const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw ArgumentError("perturbation_check: shape mismatch");
  Eigen::BDCSVD<Matrix> sa(A), sb(B), sd(A - B);
  PerturbationReport rep;
  rep.bound = sd.singularValues()(0);
  rep.sv_deviation_max =
      (sa.singularValues() - sb.singularValues()).cwiseAbs().maxCoeff();
  rep.within_bound = rep.sv_deviation_max <= rep.bound + 1e-10;
  return rep;
}

}  // namespace lsqdae
