#pragma once

#include <functional>
#include <random>
#include <string>
#include <utility>

#include "lsqdae/types.hpp"

namespace lsqdae {

struct Interval {
  double a = 0.0;
  double b = 1.0;
};

struct ReferencePoint {
  Vector x;        // x*(t), all m components
  Vector dx_diff;  // (Dx*)'(t), the k differential derivatives
};

using ResidualFn = std::function<Vector(const Vector&, const Vector&, double)>;
using JacYFn = std::function<Matrix(const Vector&, const Vector&, double)>;
using JacXFn = std::function<Matrix(const Vector&, const Vector&, double)>;
using BoundaryFn = std::function<Vector(const Vector&, const Vector&)>;
using BoundaryJacFn =
    std::function<std::pair<Matrix, Matrix>(const Vector&, const Vector&)>;
using ReferenceFn = std::function<ReferencePoint(double)>;

/// A first-order DAE  f((Dx)'(t), x(t), t) = 0  with D = [I 0] selecting the
/// first k of m components, boundary map g(x(a), x(b)) of size l, and a
/// declared index mu (metadata only; never computed here). All callables must
/// be pure and reentrant; the system is immutable after construction.
struct DAESystem {
  int m = 1;
  int k = 1;
  int l = 0;
  int mu = 1;
  Interval interval;
  ResidualFn residual;
  JacYFn jac_y;
  JacXFn jac_x;
  BoundaryFn boundary;
  BoundaryJacFn boundary_jac;
  ReferenceFn reference;  // optional

  void validate_shape() const {
    if (m < 1 || k < 1 || k > m || l < 0 || l > k)
      throw ArgumentError("DAESystem: need 0 <= l <= k <= m, m >= 1");
    if (mu < 1) throw ArgumentError("DAESystem: need mu >= 1");
    if (!(interval.a < interval.b))
      throw ArgumentError("DAESystem: need a < b");
    if (!residual) throw ArgumentError("DAESystem: residual missing");
    if (!boundary && l > 0) throw ArgumentError("DAESystem: boundary missing");
  }
};

/// f(y, x, t), dimension-checked; non-finite output reports t and the
/// offending component.
inline Vector evaluate_residual(const DAESystem& sys, const Vector& y,
                                const Vector& x, double t) {
  if (y.size() != sys.k || x.size() != sys.m)
    throw ArgumentError("evaluate_residual: dimension mismatch");
  Vector f = sys.residual(y, x, t);
  if (f.size() != sys.m)
    throw ArgumentError("evaluate_residual: residual returned wrong size");
  for (Index i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i]))
      throw DomainError("residual non-finite at t=" + std::to_string(t) +
                        ", component " + std::to_string(i));
  }
  return f;
}

struct LinearizationPoint {
  double t = 0.0;
  Vector y;
  Vector x;
  Matrix A;  // f_y(y, x, t), m x k
  Matrix B;  // f_x(y, x, t), m x m
};

inline LinearizationPoint linearize_at(const DAESystem& sys, const Vector& y,
                                       const Vector& x, double t) {
  if (y.size() != sys.k || x.size() != sys.m)
    throw ArgumentError("linearize_at: dimension mismatch");
  LinearizationPoint lp{t, y, x, sys.jac_y(y, x, t), sys.jac_x(y, x, t)};
  if (lp.A.rows() != sys.m || lp.A.cols() != sys.k || lp.B.rows() != sys.m ||
      lp.B.cols() != sys.m)
    throw ArgumentError("linearize_at: jacobian shape mismatch");
  if (!all_finite(lp.A) || !all_finite(lp.B))
    throw DomainError("jacobian non-finite at t=" + std::to_string(t));
  return lp;
}

namespace detail {

inline Matrix fd_jac(const ResidualFn& f, const Vector& y, const Vector& x,
                     double t, bool wrt_y, double step_scale) {
  const Index cols = wrt_y ? y.size() : x.size();
  Vector yy = y, xx = x;
  Vector& arg = wrt_y ? yy : xx;
  Matrix J;
  for (Index c = 0; c < cols; ++c) {
    const double save = arg[c];
    const double h = step_scale * (1.0 + std::abs(save));
    arg[c] = save + h;
    const Vector fp = f(yy, xx, t);
    arg[c] = save - h;
    const Vector fm = f(yy, xx, t);
    arg[c] = save;
    if (J.size() == 0) J.resize(fp.size(), cols);
    J.col(c) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace detail

/// Installs central-difference Jacobians (step 1e-6*(1+|value|)) for any the
/// system does not provide analytically.
inline DAESystem with_fd_fallbacks(DAESystem sys) {
  if (!sys.jac_y) {
    auto f = sys.residual;
    sys.jac_y = [f](const Vector& y, const Vector& x, double t) {
      return detail::fd_jac(f, y, x, t, true, 1e-6);
    };
  }
  if (!sys.jac_x) {
    auto f = sys.residual;
    sys.jac_x = [f](const Vector& y, const Vector& x, double t) {
      return detail::fd_jac(f, y, x, t, false, 1e-6);
    };
  }
  if (!sys.boundary_jac && sys.boundary && sys.l > 0) {
    auto g = sys.boundary;
    const int m = sys.m;
    sys.boundary_jac = [g, m](const Vector& u, const Vector& v) {
      Matrix Gu(g(u, v).size(), m), Gv(Gu.rows(), m);
      Vector uu = u, vv = v;
      for (int c = 0; c < m; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(u[c]));
        uu[c] = u[c] + h;
        Vector gp = g(uu, vv);
        uu[c] = u[c] - h;
        Vector gm = g(uu, vv);
        uu[c] = u[c];
        Gu.col(c) = (gp - gm) / (2.0 * h);
        const double h2 = 1e-6 * (1.0 + std::abs(v[c]));
        vv[c] = v[c] + h2;
        gp = g(uu, vv);
        vv[c] = v[c] - h2;
        gm = g(uu, vv);
        vv[c] = v[c];
        Gv.col(c) = (gp - gm) / (2.0 * h2);
      }
      return std::make_pair(Gu, Gv);
    };
  }
  return sys;
}

struct JacobianValidationReport {
  int samples = 0;
  double max_dev_jac_y = 0.0;
  double max_dev_jac_x = 0.0;
  double max_dev = 0.0;
};

/// Compares the analytic Jacobians against central differences of the
/// residual at `samples` random states near the reference solution (or in a
/// box of the given scale when no reference is available). Deterministic for
/// a fixed seed. The validation step is coarser than the production fallback
/// step so that cancellation noise stays below the linear-problem bound.
inline JacobianValidationReport validate_jacobians(const DAESystem& sys,
                                                   int samples, unsigned seed,
                                                   double box_scale = 0.5) {
  JacobianValidationReport rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> tdist(sys.interval.a, sys.interval.b);
  for (int s = 0; s < samples; ++s) {
    const double t = tdist(rng);
    Vector x(sys.m), y(sys.k);
    if (sys.reference) {
      const ReferencePoint rp = sys.reference(t);
      for (int i = 0; i < sys.m; ++i) x[i] = rp.x[i] + box_scale * unit(rng);
      for (int i = 0; i < sys.k; ++i)
        y[i] = rp.dx_diff[i] + box_scale * unit(rng);
    } else {
      for (int i = 0; i < sys.m; ++i) x[i] = box_scale * unit(rng);
      for (int i = 0; i < sys.k; ++i) y[i] = box_scale * unit(rng);
    }
    const Matrix A = sys.jac_y(y, x, t);
    const Matrix B = sys.jac_x(y, x, t);
    const Matrix Afd = detail::fd_jac(sys.residual, y, x, t, true, 1e-3);
    const Matrix Bfd = detail::fd_jac(sys.residual, y, x, t, false, 1e-3);
    const double da = (A - Afd).cwiseAbs().maxCoeff() /
                      (1.0 + A.cwiseAbs().maxCoeff());
    const double db = (B - Bfd).cwiseAbs().maxCoeff() /
                      (1.0 + B.cwiseAbs().maxCoeff());
    rep.max_dev_jac_y = std::max(rep.max_dev_jac_y, da);
    rep.max_dev_jac_x = std::max(rep.max_dev_jac_x, db);
  }
  rep.max_dev = std::max(rep.max_dev_jac_y, rep.max_dev_jac_x);
  return rep;
}

/// Max over samples of |g(u,v) - g(Pu,Pv)| where P zeroes the algebraic
/// components: the boundary map may only see the differential part.
inline double boundary_dependence_deviation(const DAESystem& sys, int samples,
                                            unsigned seed,
                                            double box_scale = 1.0) {
  if (sys.l == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double dev = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector u(sys.m), v(sys.m);
    for (int i = 0; i < sys.m; ++i) {
      u[i] = box_scale * unit(rng);
      v[i] = box_scale * unit(rng);
    }
    Vector up = u, vp = v;
    up.tail(sys.m - sys.k).setZero();
    vp.tail(sys.m - sys.k).setZero();
    dev = std::max(dev,
                   (sys.boundary(u, v) - sys.boundary(up, vp)).cwiseAbs()
                       .maxCoeff());
  }
  return dev;
}

}  // namespace lsqdae
