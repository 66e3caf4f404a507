#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lsqdae/types.hpp"

namespace lsqdae {

/// Ordered breakpoints a = t_0 < t_1 < ... < t_n = b with a declared bound on
/// the maximal/minimal stepsize ratio.
struct Partition {
  std::vector<double> breakpoints;
  double ratio_bound = 1.0;

  int n() const { return static_cast<int>(breakpoints.size()) - 1; }
  double a() const { return breakpoints.front(); }
  double b() const { return breakpoints.back(); }
  double h(int j) const { return breakpoints[j + 1] - breakpoints[j]; }

  double h_max() const {
    double hm = 0.0;
    for (int j = 0; j < n(); ++j) hm = std::max(hm, h(j));
    return hm;
  }
  double h_min() const {
    double hm = h(0);
    for (int j = 1; j < n(); ++j) hm = std::min(hm, h(j));
    return hm;
  }
};

inline Partition make_partition(std::vector<double> breakpoints,
                                double ratio_bound = 0.0) {
  if (breakpoints.size() < 2)
    throw ArgumentError("make_partition: need at least one subinterval");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw ArgumentError("make_partition: breakpoints must strictly increase");
  }
  Partition p;
  p.breakpoints = std::move(breakpoints);
  const double actual = p.h_max() / p.h_min();
  p.ratio_bound = ratio_bound > 0.0 ? ratio_bound : actual;
  if (actual > p.ratio_bound * (1.0 + 1e-12))
    throw ArgumentError("make_partition: stepsize ratio exceeds declared bound");
  return p;
}

inline Partition make_uniform_partition(double a, double b, int n) {
  if (n < 1) throw ArgumentError("make_uniform_partition: need n >= 1");
  if (!(a < b)) throw ArgumentError("make_uniform_partition: need a < b");
  std::vector<double> bp(n + 1);
  for (int j = 0; j <= n; ++j) bp[j] = a + (b - a) * j / n;
  bp[n] = b;
  Partition p;
  p.breakpoints = std::move(bp);
  p.ratio_bound = 1.0;
  return p;
}

/// Split every subinterval into q_inverse equal parts. Breakpoints of the
/// input are kept bitwise, so the refined partition nests the original and
/// the stepsize ratio bound carries over.
inline Partition refine_nested(const Partition& p, int q_inverse) {
  if (q_inverse < 1) throw ArgumentError("refine_nested: need q_inverse >= 1");
  std::vector<double> bp;
  bp.reserve(p.n() * q_inverse + 1);
  for (int j = 0; j < p.n(); ++j) {
    bp.push_back(p.breakpoints[j]);
    for (int s = 1; s < q_inverse; ++s)
      bp.push_back(p.breakpoints[j] + p.h(j) * s / q_inverse);
  }
  bp.push_back(p.breakpoints.back());
  Partition out;
  out.breakpoints = std::move(bp);
  out.ratio_bound = p.ratio_bound;
  return out;
}

/// Index of the subinterval containing t, right-continuous at interior
/// breakpoints; t = b maps to the last subinterval.
inline int find_interval(const Partition& p, double t) {
  if (t < p.a() || t > p.b())
    throw ArgumentError("find_interval: t outside [a,b]");
  const auto& bp = p.breakpoints;
  auto it = std::upper_bound(bp.begin(), bp.end(), t);
  int j = static_cast<int>(it - bp.begin()) - 1;
  return std::min(std::max(j, 0), p.n() - 1);
}

}  // namespace lsqdae
