#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lsqdae/ansatz.hpp"
#include "lsqdae/dae_system.hpp"
#include "lsqdae/lagrange.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

enum class NodeFamily { uniform_interior, gauss_legendre };

inline std::string to_string(NodeFamily f) {
  return f == NodeFamily::uniform_interior ? "uniform" : "gauss";
}

/// M collocation abscissae in (0,1) together with the Gram matrix of the
/// per-interval degree-(M-1) interpolation operator:
///   gram(i,i') = M * \int_0^1 l_i(s) l_{i'}(s) ds.
/// The Gram matrix depends only on (M, tau), never on the partition. For
/// Gauss-Legendre abscissae it is diagonal with entries M*w_i.
struct CollocationScheme {
  int M = 2;
  NodeFamily family = NodeFamily::uniform_interior;
  Vector tau;
  Matrix gram;
  Matrix gram_chol;  // upper triangular C with C^T C = gram
  double bc_weight = 1.0;
};

inline CollocationScheme make_scheme(int M, NodeFamily family, int N,
                                     double bc_weight = 1.0) {
  if (N < 1) throw ArgumentError("make_scheme: need N >= 1");
  if (M <= N)
    throw ArgumentError("make_scheme: least-squares setting requires M>N");
  if (!(bc_weight > 0)) throw ArgumentError("make_scheme: bc_weight <= 0");

  CollocationScheme s;
  s.M = M;
  s.family = family;
  s.bc_weight = bc_weight;
  if (family == NodeFamily::uniform_interior) {
    s.tau.resize(M);
    for (int i = 0; i < M; ++i) s.tau[i] = double(i + 1) / (M + 1);
  } else {
    s.tau = gauss_legendre_01(M).nodes;
  }

  // Products of two Lagrange basis polynomials have degree 2M-2, so M-point
  // Gauss quadrature integrates them exactly.
  const LagrangeBasis basis = make_lagrange_basis(s.tau);
  const QuadratureRule q = gauss_legendre_01(M);
  s.gram = Matrix::Zero(M, M);
  for (int p = 0; p < M; ++p) {
    const Vector lv = basis.values_at(q.nodes[p]);
    s.gram += (M * q.weights[p]) * (lv * lv.transpose());
  }
  s.gram = 0.5 * (s.gram + s.gram.transpose()).eval();  // exact symmetry
  Eigen::LLT<Matrix> llt(s.gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("make_scheme: Gram matrix not positive definite");
  s.gram_chol = llt.matrixU();
  return s;
}

/// Weighted residual of the overdetermined collocation system and,
/// optionally, its Jacobian with respect to the ansatz coefficients.
///
/// Row layout: interval-major, node-minor, component-innermost; the last l
/// rows are the boundary residual scaled by sqrt(bc_weight). Each interval
/// block of M*m rows is sqrt(h_j/M) * (C (x) I_m) applied to the stacked
/// f-values, C the Cholesky factor of the Gram matrix, so that
/// psi = |r|^2 = sum_j W_j^T gram W_j + bc_weight |g|^2.
///
/// The Jacobian is kept in per-interval blocks over the local column order of
/// AnsatzSpace (left endpoints | interior | right endpoints), which is the
/// almost-block-diagonal structure the staircase solver consumes.
struct DiscreteResidual {
  AnsatzSpacePtr space;
  int M = 0;
  int l = 0;
  Vector r;
  double psi = 0.0;
  bool has_jacobian = false;
  std::vector<Matrix> blocks;  // per interval: (M*m) x (m*N+k), weighted
  Matrix bc_left;              // l x (m*N+k), couples to interval 0
  Matrix bc_right;             // l x (m*N+k), couples to interval n-1

  Index rows() const {
    return static_cast<Index>(space->n()) * M * space->m + l;
  }
  Index cols() const { return space->dim(); }

  Matrix dense_jacobian() const {
    Matrix J = Matrix::Zero(rows(), cols());
    const int n = space->n();
    for (int j = 0; j < n; ++j) {
      const auto gi = space->global_indices(j);
      for (std::size_t c = 0; c < gi.size(); ++c)
        J.block(Index(j) * M * space->m, gi[c], M * space->m, 1) +=
            blocks[j].col(c);
    }
    if (l > 0) {
      const auto g0 = space->global_indices(0);
      const auto gn = space->global_indices(n - 1);
      for (std::size_t c = 0; c < g0.size(); ++c) {
        J.block(rows() - l, g0[c], l, 1) += bc_left.col(c);
        J.block(rows() - l, gn[c], l, 1) += bc_right.col(c);
      }
    }
    return J;
  }

  Vector apply_jacobian(const Vector& z) const {
    Vector out = Vector::Zero(rows());
    const int n = space->n();
    for (int j = 0; j < n; ++j) {
      const auto gi = space->global_indices(j);
      Vector zl(gi.size());
      for (std::size_t c = 0; c < gi.size(); ++c) zl[c] = z[gi[c]];
      out.segment(Index(j) * M * space->m, M * space->m) = blocks[j] * zl;
    }
    if (l > 0) {
      const auto g0 = space->global_indices(0);
      const auto gn = space->global_indices(n - 1);
      Vector z0(g0.size()), z1(gn.size());
      for (std::size_t c = 0; c < g0.size(); ++c) z0[c] = z[g0[c]];
      for (std::size_t c = 0; c < gn.size(); ++c) z1[c] = z[gn[c]];
      out.tail(l) = bc_left * z0 + bc_right * z1;
    }
    return out;
  }

  Vector apply_jacobian_transpose(const Vector& v) const {
    Vector out = Vector::Zero(cols());
    const int n = space->n();
    for (int j = 0; j < n; ++j) {
      const auto gi = space->global_indices(j);
      const Vector w =
          blocks[j].transpose() * v.segment(Index(j) * M * space->m,
                                            M * space->m);
      for (std::size_t c = 0; c < gi.size(); ++c) out[gi[c]] += w[c];
    }
    if (l > 0) {
      const auto g0 = space->global_indices(0);
      const auto gn = space->global_indices(n - 1);
      const Vector w0 = bc_left.transpose() * v.tail(l);
      const Vector w1 = bc_right.transpose() * v.tail(l);
      for (std::size_t c = 0; c < g0.size(); ++c) out[g0[c]] += w0[c];
      for (std::size_t c = 0; c < gn.size(); ++c) out[gn[c]] += w1[c];
    }
    return out;
  }
};

namespace detail {

/// Reference-interval values of the local bases at the collocation nodes.
struct EvalTables {
  Matrix phi_d;   // M x (N+1)
  Matrix dphi_d;  // M x (N+1), derivatives (unscaled)
  Matrix phi_a;   // M x N
  Vector phi_a0;  // algebraic basis at s=0 (boundary coupling)
  Vector phi_a1;  // algebraic basis at s=1
};

inline EvalTables build_tables(const AnsatzSpace& sp,
                               const CollocationScheme& sc) {
  EvalTables t;
  t.phi_d.resize(sc.M, sp.N + 1);
  t.dphi_d.resize(sc.M, sp.N + 1);
  t.phi_a.resize(sc.M, sp.alg_nodes);
  for (int q = 0; q < sc.M; ++q) {
    const Vector ld = sp.diff_basis.values_at(sc.tau[q]);
    t.phi_d.row(q) = ld.transpose();
    t.dphi_d.row(q) = (sp.diff_basis.diff.transpose() * ld).transpose();
    t.phi_a.row(q) = sp.alg_basis.values_at(sc.tau[q]).transpose();
  }
  t.phi_a0 = sp.alg_basis.values_at(0.0);
  t.phi_a1 = sp.alg_basis.values_at(1.0);
  return t;
}

}  // namespace detail

inline DiscreteResidual assemble(const DAESystem& sys, const AnsatzElement& e,
                                 const CollocationScheme& sc,
                                 bool with_jacobian) {
  const AnsatzSpace& sp = *e.space;
  if (sp.m != sys.m || sp.k != sys.k)
    throw ArgumentError("assemble: space/system dimension mismatch");
  if (sc.M <= sp.N)
    throw ArgumentError("assemble: scheme requires M > N");

  const int n = sp.n(), m = sp.m, k = sp.k, N = sp.N, M = sc.M, l = sys.l;
  const int An = sp.alg_nodes;
  const Index L = sp.local_size();
  const detail::EvalTables tab = detail::build_tables(sp, sc);

  DiscreteResidual out;
  out.space = e.space;
  out.M = M;
  out.l = l;
  out.r.resize(out.rows());
  out.has_jacobian = with_jacobian;
  if (with_jacobian) out.blocks.resize(n);

  for (int j = 0; j < n; ++j) {
    const double t0 = sp.partition.breakpoints[j];
    const double hj = sp.partition.h(j);
    const double wj = std::sqrt(hj / M);

    // Node values of the element on this interval.
    Matrix Cd(N + 1, k);
    for (int comp = 0; comp < k; ++comp)
      for (int i = 0; i <= N; ++i)
        Cd(i, comp) = e.coeffs[sp.coeff_index(j, comp, i)];
    Matrix Ca(An, m - k);
    for (int comp = k; comp < m; ++comp)
      for (int i = 0; i < An; ++i)
        Ca(i, comp - k) = e.coeffs[sp.coeff_index(j, comp, i)];

    const Matrix Xd = tab.phi_d * Cd;               // M x k
    const Matrix Yd = (tab.dphi_d * Cd) / hj;       // M x k
    const Matrix Xa = (m > k) ? Matrix(tab.phi_a * Ca) : Matrix(M, 0);

    Matrix raw(M * m, with_jacobian ? L : Index(0));
    Vector rraw(M * m);
    Vector x(m), y(k);
    for (int q = 0; q < M; ++q) {
      const double t = t0 + sc.tau[q] * hj;
      y = Yd.row(q).transpose();
      x.head(k) = Xd.row(q).transpose();
      if (m > k) x.tail(m - k) = Xa.row(q).transpose();
      Vector f = sys.residual(y, x, t);
      if (f.size() != m)
        throw ArgumentError("assemble: residual returned wrong size");
      if (!all_finite(f))
        throw DomainError("assemble: residual non-finite on interval " +
                          std::to_string(j) + " at t=" + std::to_string(t));
      rraw.segment(Index(q) * m, m) = f;

      if (with_jacobian) {
        const Matrix A = sys.jac_y(y, x, t);
        const Matrix B = sys.jac_x(y, x, t);
        if (!all_finite(A) || !all_finite(B))
          throw DomainError("assemble: jacobian non-finite on interval " +
                            std::to_string(j) + " at t=" + std::to_string(t));
        auto rows = raw.middleRows(Index(q) * m, m);
        for (int comp = 0; comp < k; ++comp)
          for (int i = 0; i <= N; ++i)
            rows.col(sp.local_index(comp, i)) =
                A.col(comp) * (tab.dphi_d(q, i) / hj) +
                B.col(comp) * tab.phi_d(q, i);
        for (int comp = k; comp < m; ++comp)
          for (int i = 0; i < An; ++i)
            rows.col(sp.local_index(comp, i)) = B.col(comp) * tab.phi_a(q, i);
      }
    }

    // Apply sqrt(h_j/M) * (C (x) I_m); C is upper triangular.
    auto rseg = out.r.segment(Index(j) * M * m, Index(M) * m);
    for (int qo = 0; qo < M; ++qo) {
      Vector acc = Vector::Zero(m);
      for (int qi = qo; qi < M; ++qi)
        acc += sc.gram_chol(qo, qi) * rraw.segment(Index(qi) * m, m);
      rseg.segment(Index(qo) * m, m) = wj * acc;
    }
    if (with_jacobian) {
      Matrix wblock = Matrix::Zero(M * m, L);
      for (int qo = 0; qo < M; ++qo)
        for (int qi = qo; qi < M; ++qi)
          wblock.middleRows(Index(qo) * m, m) +=
              (wj * sc.gram_chol(qo, qi)) * raw.middleRows(Index(qi) * m, m);
      out.blocks[j] = std::move(wblock);
    }
  }

  if (l > 0) {
    const EvalResult ea = evaluate(e, sp.partition.a());
    const EvalResult eb = evaluate(e, sp.partition.b());
    Vector g = sys.boundary(ea.x, eb.x);
    if (g.size() != l)
      throw ArgumentError("assemble: boundary returned wrong size");
    if (!all_finite(g)) throw DomainError("assemble: boundary non-finite");
    const double wb = std::sqrt(sc.bc_weight);
    out.r.tail(l) = wb * g;

    if (with_jacobian) {
      const auto [Gu, Gv] = sys.boundary_jac(ea.x, eb.x);
      out.bc_left = Matrix::Zero(l, L);
      out.bc_right = Matrix::Zero(l, L);
      for (int comp = 0; comp < k; ++comp) {
        out.bc_left.col(sp.local_index(comp, 0)) = wb * Gu.col(comp);
        out.bc_right.col(sp.local_index(comp, N)) = wb * Gv.col(comp);
      }
      for (int comp = k; comp < m; ++comp)
        for (int i = 0; i < An; ++i) {
          out.bc_left.col(sp.local_index(comp, i)) =
              wb * Gu.col(comp) * tab.phi_a0[i];
          out.bc_right.col(sp.local_index(comp, i)) =
              wb * Gv.col(comp) * tab.phi_a1[i];
        }
    }
  }

  out.psi = out.r.squaredNorm();
  return out;
}

/// psi_{pi,M}(x): the value the least-squares collocation minimizes.
inline double objective(const DAESystem& sys, const AnsatzElement& e,
                        const CollocationScheme& sc) {
  return assemble(sys, e, sc, false).psi;
}

/// Dumps r (array format) and J (coordinate format) as Matrix Market files
/// PATH.r.mtx and PATH.J.mtx.
inline void write_matrix_market(const DiscreteResidual& dr,
                                const std::string& path_prefix) {
  {
    std::ofstream f(path_prefix + ".r.mtx");
    f << "%%MatrixMarket matrix array real general\n";
    f << dr.r.size() << " 1\n";
    char buf[32];
    for (Index i = 0; i < dr.r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", dr.r[i]);
      f << buf;
    }
  }
  if (!dr.has_jacobian) return;
  const AnsatzSpace& sp = *dr.space;
  const int n = sp.n();
  std::vector<std::tuple<Index, Index, double>> entries;
  for (int j = 0; j < n; ++j) {
    const auto gi = sp.global_indices(j);
    for (Index rr = 0; rr < dr.blocks[j].rows(); ++rr)
      for (std::size_t c = 0; c < gi.size(); ++c) {
        const double v = dr.blocks[j](rr, c);
        if (v != 0.0)
          entries.emplace_back(Index(j) * dr.M * sp.m + rr, gi[c], v);
      }
  }
  if (dr.l > 0) {
    Matrix bc = Matrix::Zero(dr.l, sp.dim());
    const auto g0 = sp.global_indices(0);
    const auto gn = sp.global_indices(n - 1);
    for (std::size_t c = 0; c < g0.size(); ++c) {
      bc.col(g0[c]) += dr.bc_left.col(c);
      bc.col(gn[c]) += dr.bc_right.col(c);
    }
    for (Index rr = 0; rr < dr.l; ++rr)
      for (Index c = 0; c < bc.cols(); ++c)
        if (bc(rr, c) != 0.0)
          entries.emplace_back(dr.rows() - dr.l + rr, c, bc(rr, c));
  }
  std::ofstream f(path_prefix + ".J.mtx");
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << dr.rows() << " " << dr.cols() << " " << entries.size() << "\n";
  char buf[96];
  for (const auto& [rr, cc, v] : entries) {
    std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                  static_cast<long long>(rr + 1),
                  static_cast<long long>(cc + 1), v);
    f << buf;
  }
}

}  // namespace lsqdae
