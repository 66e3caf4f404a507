#pragma once

#include <cmath>
#include <utility>

#include "lsqdae/types.hpp"

namespace lsqdae {

/// Quadrature rule on the reference interval (0,1); weights sum to 1.
struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

namespace detail {

/// Legendre P_n(x) and P_n'(x) on [-1,1] by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

/// Gauss-Legendre rule with n nodes mapped to (0,1).
/// Exact for polynomials of degree 2n-1.
inline QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre_01: need n >= 1");
  Vector x(n), w(n);
  for (int i = 0; i < n; ++i) {
    // Nodes on [-1,1], descending initial guesses; Newton on P_n.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = detail::legendre(n, t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    std::tie(p, dp) = detail::legendre(n, t);
    x[n - 1 - i] = 0.5 * (t + 1.0);
    w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);  // 2/((1-t^2) P'^2) / 2
  }
  return {x, w};
}

/// Gauss-Lobatto nodes (count >= 2) on [0,1]: endpoints plus the roots of
/// P'_{count-1} mapped from [-1,1].
inline Vector gauss_lobatto_01(int count) {
  if (count < 2) throw ArgumentError("gauss_lobatto_01: need count >= 2");
  const int n = count - 1;
  Vector x(count);
  x[0] = 0.0;
  x[count - 1] = 1.0;
  for (int i = 1; i < n; ++i) {
    double t = std::cos(M_PI * i / n);  // Chebyshev-Lobatto initial guess
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre(n, t);
      const double ddp = (2. * t * dp - n * (n + 1.) * p) / (1.0 - t * t);
      const double dt = dp / ddp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[n - i] = 0.5 * (t + 1.0);
  }
  return x;
}

/// Lagrange interpolation basis on a fixed node set in [0,1], evaluated via
/// the barycentric form. `diff` is the node-to-node differentiation matrix:
/// given node values c, (diff*c)[p] is the interpolant's derivative at node p.
struct LagrangeBasis {
  Vector nodes;
  Vector bary;
  Matrix diff;

  int size() const { return static_cast<int>(nodes.size()); }

  /// Values of all basis polynomials at s (exact unit vector at a node).
  Vector values_at(double s) const {
    const int n = size();
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (s == nodes[i]) {
        out[i] = 1.0;
        return out;
      }
    }
    double denom = 0.0;
    for (int i = 0; i < n; ++i) {
      const double term = bary[i] / (s - nodes[i]);
      out[i] = term;
      denom += term;
    }
    out /= denom;
    return out;
  }

  /// Derivatives of all basis polynomials at s. The interpolant's derivative
  /// has degree < n, so re-interpolating the diff-matrix node values is exact.
  Vector derivative_values_at(double s) const {
    return diff.transpose() * values_at(s);
  }
};

inline LagrangeBasis make_lagrange_basis(const Vector& nodes) {
  const int n = static_cast<int>(nodes.size());
  if (n < 1) throw ArgumentError("make_lagrange_basis: empty node set");
  LagrangeBasis b;
  b.nodes = nodes;
  b.bary = Vector::Ones(n);
  for (int i = 0; i < n; ++i) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) w *= nodes[i] - nodes[j];
    }
    b.bary[i] = 1.0 / w;
  }
  b.diff = Matrix::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    double rowsum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == p) continue;
      const double d = (b.bary[i] / b.bary[p]) / (nodes[p] - nodes[i]);
      b.diff(p, i) = d;
      rowsum += d;
    }
    b.diff(p, p) = -rowsum;  // negative sum trick
  }
  return b;
}

}  // namespace lsqdae
