#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lsqdae/lagrange.hpp"
#include "lsqdae/mesh.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

/// Piecewise polynomial ansatz space on a partition: the first k components
/// (the differential ones) are globally continuous of local degree N, the
/// remaining m-k (algebraic) components have local degree N-1 and may jump at
/// breakpoints. Total dimension n*N*m + k.
///
/// Local representation is nodal: Gauss-Lobatto points for the differential
/// components (so continuity is a shared endpoint unknown, not a constraint)
/// and Gauss points for the algebraic ones.
///
/// Coefficient layout is interval-major. Interval 0 stores k*(N+1)
/// differential node values followed by (m-k)*N algebraic ones; each further
/// interval introduces N new values per differential component (its left
/// endpoint value is the previous interval's right endpoint value) and N per
/// algebraic component.
struct AnsatzSpace {
  Partition partition;
  int N = 1;
  int m = 1;
  int k = 1;
  int alg_nodes = 1;         // nodes per algebraic component (degree + 1)
  LagrangeBasis diff_basis;  // N+1 Gauss-Lobatto nodes on [0,1]
  LagrangeBasis alg_basis;   // alg_nodes Gauss nodes in (0,1)

  int n() const { return partition.n(); }
  Index dim() const {
    return static_cast<Index>(n()) * block_size() + k;
  }

  Index block0_size() const { return block_size() + k; }
  Index block_size() const {
    return static_cast<Index>(k) * N + Index(m - k) * alg_nodes;
  }

  /// Global coefficient index of (interval j, component, local node).
  /// Differential components: node in [0,N]; algebraic: node in [0,alg_nodes).
  Index coeff_index(int j, int comp, int node) const {
    if (comp < k) {
      if (j > 0 && node == 0) return coeff_index(j - 1, comp, N);
      const Index base = j == 0 ? 0 : block0_size() + Index(j - 1) * block_size();
      if (j == 0) return base + Index(comp) * (N + 1) + node;
      return base + Index(comp) * N + (node - 1);
    }
    const Index base = j == 0 ? Index(k) * (N + 1)
                              : block0_size() + Index(j - 1) * block_size() +
                                    Index(k) * N;
    return base + Index(comp - k) * alg_nodes + node;
  }

  /// Number of coefficients one interval couples to.
  Index local_size() const { return block_size() + k; }

  /// Local column ordering within an interval block, grouped so that the
  /// shared endpoint values sit at the ends:
  ///   [0,k)                    differential left endpoint values
  ///   [k, block_size())        interior: differential nodes 1..N-1, then
  ///                            algebraic
  ///   [block_size(), ..+k)     differential right endpoint values
  Index local_index(int comp, int node) const {
    if (comp < k) {
      if (node == 0) return comp;
      if (node == N) return block_size() + comp;
      return Index(k) + Index(comp) * (N - 1) + (node - 1);
    }
    return Index(k) + Index(k) * (N - 1) + Index(comp - k) * alg_nodes + node;
  }

  /// Global coefficient index for each local column of interval j.
  std::vector<Index> global_indices(int j) const {
    std::vector<Index> g(local_size());
    for (int comp = 0; comp < k; ++comp)
      for (int node = 0; node <= N; ++node)
        g[local_index(comp, node)] = coeff_index(j, comp, node);
    for (int comp = k; comp < m; ++comp)
      for (int node = 0; node < alg_nodes; ++node)
        g[local_index(comp, node)] = coeff_index(j, comp, node);
    return g;
  }
};

using AnsatzSpacePtr = std::shared_ptr<const AnsatzSpace>;

/// The standard space has algebraic local degree N-1 (alg_nodes = N), which
/// makes dim = n*N*m + k. alg_nodes may be overridden for experiments with
/// other algebraic degrees.
inline AnsatzSpacePtr make_space(Partition partition, int N, int m, int k,
                                 int alg_nodes = -1) {
  if (N < 1) throw ArgumentError("make_space: need N >= 1");
  if (!(k >= 1 && k <= m)) throw ArgumentError("make_space: need 1 <= k <= m");
  if (alg_nodes < 0) alg_nodes = N;
  if (alg_nodes < 1) throw ArgumentError("make_space: need alg_nodes >= 1");
  auto s = std::make_shared<AnsatzSpace>();
  s->partition = std::move(partition);
  s->N = N;
  s->m = m;
  s->k = k;
  s->alg_nodes = alg_nodes;
  s->diff_basis = make_lagrange_basis(gauss_lobatto_01(N + 1));
  s->alg_basis = make_lagrange_basis(gauss_legendre_01(alg_nodes).nodes);
  return s;
}

/// Element of an ansatz space: a coefficient vector in the fixed layout.
/// Plain value type; the space is shared and immutable.
struct AnsatzElement {
  AnsatzSpacePtr space;
  Vector coeffs;

  double get_node_value(int j, int comp, int node) const {
    return coeffs[space->coeff_index(j, comp, node)];
  }
  void set_node_value(int j, int comp, int node, double v) {
    coeffs[space->coeff_index(j, comp, node)] = v;
  }
};

inline AnsatzElement zero_element(AnsatzSpacePtr space) {
  AnsatzElement e;
  e.coeffs = Vector::Zero(space->dim());
  e.space = std::move(space);
  return e;
}

/// Gather the interval-j coefficients in local column order.
inline Vector local_coeffs(const AnsatzElement& e, int j) {
  const auto idx = e.space->global_indices(j);
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = e.coeffs[idx[i]];
  return out;
}

struct EvalResult {
  Vector x;        // all m components
  Vector dx_diff;  // derivative of the k differential components
};

/// Evaluate x(t) and (Dx)'(t). Right-continuous at interior breakpoints;
/// t = b uses the last subinterval. The derivative goes through the local
/// differentiation matrix scaled by 1/h_j.
inline EvalResult evaluate(const AnsatzElement& e, double t) {
  const AnsatzSpace& sp = *e.space;
  const int j = find_interval(sp.partition, t);
  const double hj = sp.partition.h(j);
  const double s = (t - sp.partition.breakpoints[j]) / hj;

  const Vector ld = sp.diff_basis.values_at(s);
  const Vector ldd = sp.diff_basis.diff.transpose() * ld;
  const Vector la = sp.alg_basis.values_at(s);

  EvalResult r;
  r.x = Vector::Zero(sp.m);
  r.dx_diff = Vector::Zero(sp.k);
  for (int comp = 0; comp < sp.k; ++comp) {
    double v = 0.0, dv = 0.0;
    for (int i = 0; i <= sp.N; ++i) {
      const double c = e.coeffs[sp.coeff_index(j, comp, i)];
      v += ld[i] * c;
      dv += ldd[i] * c;
    }
    r.x[comp] = v;
    r.dx_diff[comp] = dv / hj;
  }
  for (int comp = sp.k; comp < sp.m; ++comp) {
    double v = 0.0;
    for (int i = 0; i < sp.alg_nodes; ++i)
      v += la[i] * e.coeffs[sp.coeff_index(j, comp, i)];
    r.x[comp] = v;
  }
  return r;
}

/// Nodal interpolation of fn into the space: differential components at the
/// Gauss-Lobatto images, algebraic components at the Gauss images. Identity
/// on elements of the space.
inline AnsatzElement interpolate(AnsatzSpacePtr space,
                                 const std::function<Vector(double)>& fn) {
  const AnsatzSpace& sp = *space;
  AnsatzElement e = zero_element(space);
  for (int j = 0; j < sp.n(); ++j) {
    const double t0 = sp.partition.breakpoints[j];
    const double hj = sp.partition.h(j);
    for (int i = (j == 0 ? 0 : 1); i <= sp.N; ++i) {
      const double t = (i == sp.N) ? sp.partition.breakpoints[j + 1]
                                   : t0 + sp.diff_basis.nodes[i] * hj;
      const Vector v = fn(t);
      if (!all_finite(v))
        throw DomainError("interpolate: non-finite sample at t=" +
                          std::to_string(t));
      for (int comp = 0; comp < sp.k; ++comp)
        e.coeffs[sp.coeff_index(j, comp, i)] = v[comp];
    }
    for (int i = 0; i < sp.alg_nodes; ++i) {
      const double t = t0 + sp.alg_basis.nodes[i] * hj;
      const Vector v = fn(t);
      if (!all_finite(v))
        throw DomainError("interpolate: non-finite sample at t=" +
                          std::to_string(t));
      for (int comp = sp.k; comp < sp.m; ++comp)
        e.coeffs[sp.coeff_index(j, comp, i)] = v[comp];
    }
  }
  return e;
}

namespace detail {

/// Maps each fine interval to the coarse interval containing it, requiring
/// the fine breakpoints to be a superset of the coarse ones.
inline std::vector<int> nesting_map(const Partition& coarse,
                                    const Partition& fine) {
  const double tol = 1e-12 * (coarse.b() - coarse.a());
  std::vector<int> owner(fine.n());
  int jc = 0;
  for (int jf = 0; jf < fine.n(); ++jf) {
    const double mid = 0.5 * (fine.breakpoints[jf] + fine.breakpoints[jf + 1]);
    while (jc + 1 < static_cast<int>(coarse.breakpoints.size()) - 1 &&
           coarse.breakpoints[jc + 1] <= mid)
      ++jc;
    if (fine.breakpoints[jf] < coarse.breakpoints[jc] - tol ||
        fine.breakpoints[jf + 1] > coarse.breakpoints[jc + 1] + tol)
      throw ArgumentError("prolongate: partitions are not nested");
    owner[jf] = jc;
  }
  for (std::size_t i = 1; i + 1 < coarse.breakpoints.size(); ++i) {
    const double t = coarse.breakpoints[i];
    bool found = false;
    for (double tf : fine.breakpoints)
      if (std::abs(tf - t) <= tol) {
        found = true;
        break;
      }
    if (!found) throw ArgumentError("prolongate: partitions are not nested");
  }
  return owner;
}

}  // namespace detail

/// Exact re-expansion of an element on a nested refinement: polynomial
/// subdivision, so evaluate(prolongate(e), t) == evaluate(e, t) to round-off.
inline AnsatzElement prolongate(const AnsatzElement& e, AnsatzSpacePtr fine) {
  const AnsatzSpace& sc = *e.space;
  const AnsatzSpace& sf = *fine;
  if (sf.N != sc.N || sf.m != sc.m || sf.k != sc.k ||
      sf.alg_nodes != sc.alg_nodes)
    throw ArgumentError("prolongate: spaces differ in (N, m, k)");
  const auto owner = detail::nesting_map(sc.partition, sf.partition);

  AnsatzElement out = zero_element(fine);
  for (int jf = 0; jf < sf.n(); ++jf) {
    const int jc = owner[jf];
    const double tc0 = sc.partition.breakpoints[jc];
    const double hc = sc.partition.h(jc);
    const double tf0 = sf.partition.breakpoints[jf];
    const double hf = sf.partition.h(jf);
    for (int i = (jf == 0 ? 0 : 1); i <= sf.N; ++i) {
      const double t = tf0 + sf.diff_basis.nodes[i] * hf;
      const double s = std::min(1.0, std::max(0.0, (t - tc0) / hc));
      const Vector ld = sc.diff_basis.values_at(s);
      for (int comp = 0; comp < sc.k; ++comp) {
        double v = 0.0;
        for (int p = 0; p <= sc.N; ++p)
          v += ld[p] * e.coeffs[sc.coeff_index(jc, comp, p)];
        out.coeffs[sf.coeff_index(jf, comp, i)] = v;
      }
    }
    for (int i = 0; i < sf.alg_nodes; ++i) {
      const double t = tf0 + sf.alg_basis.nodes[i] * hf;
      const double s = (t - tc0) / hc;
      const Vector la = sc.alg_basis.values_at(s);
      for (int comp = sc.k; comp < sc.m; ++comp) {
        double v = 0.0;
        for (int p = 0; p < sc.alg_nodes; ++p)
          v += la[p] * e.coeffs[sc.coeff_index(jc, comp, p)];
        out.coeffs[sf.coeff_index(jf, comp, i)] = v;
      }
    }
  }
  return out;
}

inline nlohmann::json element_to_json(const AnsatzElement& e) {
  const AnsatzSpace& sp = *e.space;
  nlohmann::json j;
  j["a"] = sp.partition.a();
  j["b"] = sp.partition.b();
  j["breakpoints"] = sp.partition.breakpoints;
  j["N"] = sp.N;
  j["m"] = sp.m;
  j["k"] = sp.k;
  if (sp.alg_nodes != sp.N) j["alg_nodes"] = sp.alg_nodes;
  j["coeffs"] = std::vector<double>(e.coeffs.data(),
                                    e.coeffs.data() + e.coeffs.size());
  return j;
}

inline AnsatzElement element_from_json(const nlohmann::json& j) {
  auto bp = j.at("breakpoints").get<std::vector<double>>();
  auto space = make_space(make_partition(std::move(bp)), j.at("N").get<int>(),
                          j.at("m").get<int>(), j.at("k").get<int>(),
                          j.value("alg_nodes", j.at("N").get<int>()));
  auto cv = j.at("coeffs").get<std::vector<double>>();
  if (static_cast<Index>(cv.size()) != space->dim())
    throw ArgumentError("element_from_json: coefficient count mismatch");
  AnsatzElement e;
  e.space = std::move(space);
  e.coeffs = Eigen::Map<const Vector>(cv.data(), cv.size());
  return e;
}

}  // namespace lsqdae
