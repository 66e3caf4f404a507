#pragma once

#include <vector>

#include "lsqdae/collocation.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

struct AbdSolution {
  Vector z;
  double residual_norm = 0.0;
  bool full_rank = true;
  Index rank_estimate = 0;
};

namespace detail {

inline Vector solve_upper(const Matrix& R, const Vector& b, double diag_tol,
                          bool& full_rank) {
  const Index n = R.rows();
  Vector x(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (Index j = i + 1; j < n; ++j) s -= R(i, j) * x[j];
    if (std::abs(R(i, i)) <= diag_tol) {
      full_rank = false;
      x[i] = 0.0;
    } else {
      x[i] = s / R(i, i);
    }
  }
  return x;
}

}  // namespace detail

/// Least-squares solve of the almost-block-diagonal collocation system,
/// min_z |J z + r|, by a staircase orthogonal reduction: intervals are
/// processed left to right, each step QR-eliminating the columns that never
/// appear again (the interval's left endpoint and interior unknowns). The
/// right endpoint values of the last interval and the columns touched by the
/// boundary rows are carried through and eliminated in the final step; carry
/// rows in excess of the carried column count are orthogonally compressed,
/// their right-hand sides accumulating into the residual. Equivalent to a
/// Householder QR of the full system, at O(n) cost.
inline AbdSolution abd_solve(const DiscreteResidual& dr) {
  if (!dr.has_jacobian)
    throw ArgumentError("abd_solve: residual assembled without jacobian");
  const AnsatzSpace& sp = *dr.space;
  const int n = sp.n(), m = sp.m, k = sp.k, N = sp.N, M = dr.M, l = dr.l;
  const Index L = sp.local_size();
  const Index E = sp.block_size();               // eliminated per step
  const Index W = Index(m - k) * sp.alg_nodes;   // algebraic columns
  const Index Mm = Index(M) * m;
  const Vector b = -dr.r;

  AbdSolution sol;
  sol.z = Vector::Zero(sp.dim());

  if (n == 1) {
    // Single interval: the system is one dense block.
    const Matrix J = dr.dense_jacobian();
    Eigen::HouseholderQR<Matrix> qr(J);
    bool ok = true;
    const Matrix R = qr.matrixQR().topRows(L).triangularView<Eigen::Upper>();
    const double dmax = R.diagonal().cwiseAbs().maxCoeff();
    Vector bq = qr.householderQ().adjoint() * b;
    sol.z = detail::solve_upper(R, bq.head(L), 1e-13 * dmax, ok);
    sol.full_rank = ok;
    sol.rank_estimate =
        (R.diagonal().cwiseAbs().array() > 1e-13 * dmax).count();
    sol.residual_norm = bq.tail(b.size() - L).norm();
    return sol;
  }

  const Index Ccar = 2 * k + W;  // carried columns: s_{j+1}, s_n, w
  std::vector<Matrix> Rblk(n), Tblk(n);
  std::vector<Vector> rhsblk(n);
  Matrix carry(0, Ccar);
  Vector carry_rhs(0);
  double res2 = 0.0;
  double diag_max = 0.0;
  Index rank = 0;

  for (int j = 0; j < n; ++j) {
    const bool last = (j == n - 1);
    const Index elim = last ? L : E;
    const Index cols = last ? L : E + Ccar;
    const Index cr = carry.rows();
    const Index rows = cr + Mm + (j == 0 ? l : 0);

    Matrix A = Matrix::Zero(rows, cols);
    Vector bb(rows);
    if (cr > 0) {
      if (!last) {
        A.block(0, 0, cr, k) = carry.leftCols(k);              // s_j
        A.block(0, E + k, cr, k + W) = carry.rightCols(k + W); // s_n, w
      } else {
        A.block(0, 0, cr, k) = carry.leftCols(k);                 // s_{n-1}
        A.block(0, E, cr, k) = carry.middleCols(k, k);            // s_n
        if (W > 0) A.block(0, Index(k) * N, cr, W) = carry.rightCols(W);
      }
      bb.head(cr) = carry_rhs;
    }
    if (!last) {
      A.block(cr, 0, Mm, E) = dr.blocks[j].leftCols(E);
      A.block(cr, E, Mm, k) = dr.blocks[j].rightCols(k);  // s_{j+1}
    } else {
      A.block(cr, 0, Mm, L) = dr.blocks[j];
    }
    bb.segment(cr, Mm) = b.segment(Index(j) * Mm, Mm);
    if (j == 0 && l > 0) {
      const Index r0 = cr + Mm;
      A.block(r0, 0, l, E) = dr.bc_left.leftCols(E);
      A.block(r0, E + k, l, k) = dr.bc_right.rightCols(k);  // s_n
      if (W > 0)
        A.block(r0, E + 2 * k, l, W) =
            dr.bc_right.middleCols(Index(k) * N, W);  // algebraic at b
      bb.tail(l) = b.tail(l);
    }

    Eigen::HouseholderQR<Matrix> qr(A.leftCols(elim));
    Matrix rest;
    if (cols > elim)
      rest = qr.householderQ().adjoint() * A.rightCols(cols - elim);
    Vector bq = qr.householderQ().adjoint() * bb;

    Rblk[j] = qr.matrixQR().topRows(elim).triangularView<Eigen::Upper>();
    diag_max = std::max(diag_max, Rblk[j].diagonal().cwiseAbs().maxCoeff());
    rhsblk[j] = bq.head(elim);
    if (!last) {
      Tblk[j] = rest.topRows(elim);
      const Index crows = rows - elim;
      carry = rest.bottomRows(crows);
      carry_rhs = bq.tail(crows);
      if (carry.rows() > Ccar) {
        // Rows beyond the carried column count are pure residual.
        Eigen::HouseholderQR<Matrix> cq(carry);
        Vector cb = cq.householderQ().adjoint() * carry_rhs;
        carry = cq.matrixQR().topRows(Ccar).triangularView<Eigen::Upper>();
        res2 += cb.tail(cb.size() - Ccar).squaredNorm();
        carry_rhs = cb.head(Ccar);
      }
    } else {
      res2 += bq.tail(rows - elim).squaredNorm();
    }
  }

  const double diag_tol = 1e-13 * diag_max;
  for (int j = 0; j < n; ++j)
    rank += (Rblk[j].diagonal().cwiseAbs().array() > diag_tol).count();
  sol.rank_estimate = rank;

  // Back substitution, last interval first.
  bool ok = true;
  Vector sloc = detail::solve_upper(Rblk[n - 1], rhsblk[n - 1], diag_tol, ok);
  {
    const auto gi = sp.global_indices(n - 1);
    for (Index c = 0; c < L; ++c) sol.z[gi[c]] = sloc[c];
  }
  const Vector s_n = sloc.segment(E, k);
  const Vector w = W > 0 ? Vector(sloc.segment(Index(k) * N, W)) : Vector(0);
  Vector s_next = sloc.head(k);
  for (int j = n - 2; j >= 0; --j) {
    Vector tk(Ccar);
    tk.head(k) = s_next;
    tk.segment(k, k) = s_n;
    if (W > 0) tk.tail(W) = w;
    const Vector ej = detail::solve_upper(
        Rblk[j], Vector(rhsblk[j] - Tblk[j] * tk), diag_tol, ok);
    const auto gi = sp.global_indices(j);
    for (Index c = 0; c < E; ++c) sol.z[gi[c]] = ej[c];
    s_next = ej.head(k);
  }
  sol.full_rank = ok;
  sol.residual_norm = std::sqrt(res2);
  if (!all_finite(sol.z)) throw NumericalError("abd_solve: non-finite solution");
  return sol;
}

}  // namespace lsqdae
