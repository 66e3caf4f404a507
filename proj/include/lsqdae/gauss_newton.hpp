#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lsqdae/abd.hpp"
#include "lsqdae/collocation.hpp"
#include "lsqdae/lsq.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

enum class Damping { none, armijo };
enum class Termination { no_improvement, step_small, max_iters, numerical_error };
enum class SubproblemSolver { automatic, structured, dense };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::no_improvement: return "no_improvement";
    case Termination::step_small: return "step_small";
    case Termination::max_iters: return "max_iters";
    case Termination::numerical_error: return "numerical_error";
  }
  return "?";
}

struct GNConfig {
  int max_iters = 50;
  double rel_improvement_tol = 1e-12;
  double step_tol = 1e-14;
  Damping damping = Damping::armijo;
  double armijo_sigma = 1e-4;
  double min_damping = 1.0 / 4096.0;
  SubproblemSolver solver = SubproblemSolver::automatic;
  double rank_tol = -1.0;
  bool check_optimality = false;  // records |J^T (J z + r)| per iteration

  void validate() const {
    if (max_iters < 1) throw ArgumentError("GNConfig: max_iters >= 1");
    if (!(rel_improvement_tol > 0) || !(step_tol > 0) || !(armijo_sigma > 0) ||
        !(min_damping > 0))
      throw ArgumentError("GNConfig: tolerances must be positive");
  }
};

struct GNIterate {
  int k = 0;
  double psi = 0.0;            // objective after the accepted step
  double residual_norm = 0.0;  // optimum of the linear subproblem
  double step_norm = 0.0;
  double damping_used = 1.0;
  Index rank_estimate = 0;
  double optimality_residual = std::numeric_limits<double>::quiet_NaN();
};

struct GNTrace {
  double psi_initial = 0.0;
  std::vector<GNIterate> iterates;
  Termination termination = Termination::max_iters;
  double psi_final = 0.0;
  std::string message;

  int iterations() const { return static_cast<int>(iterates.size()); }

  bool psi_nonincreasing() const {
    double prev = psi_initial;
    for (const auto& it : iterates) {
      if (it.psi > prev) return false;
      prev = it.psi;
    }
    return true;
  }
};

inline std::string trace_to_json_lines(const GNTrace& tr) {
  std::string out;
  for (const auto& it : tr.iterates) {
    nlohmann::json j{{"k", it.k},
                     {"psi", it.psi},
                     {"residual_norm", it.residual_norm},
                     {"step_norm", it.step_norm},
                     {"damping_used", it.damping_used},
                     {"rank_estimate", it.rank_estimate}};
    if (std::isfinite(it.optimality_residual))
      j["optimality_residual"] = it.optimality_residual;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

struct Subproblem {
  Vector z;
  double residual_norm = 0.0;
  Index rank_estimate = 0;
};

inline Subproblem solve_subproblem(const DiscreteResidual& dr,
                                   const GNConfig& cfg) {
  SubproblemSolver which = cfg.solver;
  if (which == SubproblemSolver::automatic)
    which = dr.space->n() == 1 ? SubproblemSolver::dense
                               : SubproblemSolver::structured;
  if (which == SubproblemSolver::structured) {
    AbdSolution s = abd_solve(dr);
    if (s.full_rank) return {std::move(s.z), s.residual_norm, s.rank_estimate};
    which = SubproblemSolver::dense;  // rank collapse: retry with pivoting
  }
  if (dr.cols() > 6000)
    throw NumericalError("gn_solve: dense fallback too large");
  LsqSolution s = solve_lsq(dr.dense_jacobian(), dr.r, cfg.rank_tol);
  return {std::move(s.z), s.residual_norm, s.rank_estimate};
}

}  // namespace detail

/// Damped Gauss-Newton on a fixed mesh: each step solves the weighted linear
/// least-squares subproblem min_z |J z + r|^2 over the ansatz space and
/// updates x <- x + lambda z. With Armijo damping the largest
/// lambda in {1, 1/2, 1/4, ...} is accepted for which
///   psi(x + lambda z) <= psi(x) - 2 sigma lambda (psi(x) - psi_lin),
/// psi_lin the subproblem optimum; psi(x) - psi_lin equals the squared norm
/// of the residual's projection onto the range of J, which is the computable
/// surrogate for -psi'(x)z/2. Stops when psi no longer improves relatively,
/// when the step is negligible, or at max_iters. Numerical failures abort the
/// iteration and return the best iterate seen.
inline std::pair<AnsatzElement, GNTrace> gn_solve(const DAESystem& sys,
                                                  const CollocationScheme& sc,
                                                  const AnsatzElement& x0,
                                                  const GNConfig& cfg = {}) {
  cfg.validate();
  AnsatzElement elem = x0;
  GNTrace tr;
  AnsatzElement best = x0;
  double best_psi = std::numeric_limits<double>::infinity();

  DiscreteResidual dr;
  try {
    dr = assemble(sys, elem, sc, true);
  } catch (const std::runtime_error& err) {
    tr.termination = Termination::numerical_error;
    tr.message = err.what();
    tr.psi_initial = tr.psi_final = std::numeric_limits<double>::quiet_NaN();
    return {x0, tr};
  }
  double psi = dr.psi;
  tr.psi_initial = psi;
  best_psi = psi;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    detail::Subproblem sub;
    try {
      sub = detail::solve_subproblem(dr, cfg);
    } catch (const std::runtime_error& err) {
      tr.termination = Termination::numerical_error;
      tr.message = err.what();
      break;
    }
    double opt_res = std::numeric_limits<double>::quiet_NaN();
    if (cfg.check_optimality)
      opt_res = dr.apply_jacobian_transpose(dr.apply_jacobian(sub.z) + dr.r)
                    .norm();

    const double step_norm = sub.z.norm();
    if (step_norm <= cfg.step_tol * (1.0 + elem.coeffs.norm())) {
      tr.iterates.push_back({iter, psi, sub.residual_norm, step_norm, 0.0,
                             sub.rank_estimate, opt_res});
      tr.termination = Termination::step_small;
      break;
    }

    const double psi_lin = sub.residual_norm * sub.residual_norm;
    const double predicted = std::max(psi - psi_lin, 0.0);

    double lambda = 1.0;
    double psi_try = std::numeric_limits<double>::infinity();
    bool accepted = false;
    AnsatzElement trial = elem;
    while (lambda >= cfg.min_damping * (1.0 - 1e-12)) {
      trial.coeffs = elem.coeffs + lambda * sub.z;
      try {
        psi_try = assemble(sys, trial, sc, false).psi;
      } catch (const std::runtime_error&) {
        psi_try = std::numeric_limits<double>::infinity();
      }
      if (cfg.damping == Damping::none ||
          psi_try <= psi - 2.0 * cfg.armijo_sigma * lambda * predicted) {
        accepted = std::isfinite(psi_try);
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      tr.termination = Termination::no_improvement;
      tr.message = "no damping factor yields descent";
      break;
    }

    const double improvement = psi - psi_try;
    elem = trial;
    const double psi_prev = psi;
    psi = psi_try;
    tr.iterates.push_back({iter, psi, sub.residual_norm, step_norm, lambda,
                           sub.rank_estimate, opt_res});
    if (psi < best_psi) {
      best_psi = psi;
      best = elem;
    }
    if (improvement <= cfg.rel_improvement_tol * psi_prev) {
      tr.termination = Termination::no_improvement;
      break;
    }
    if (iter == cfg.max_iters) {
      tr.termination = Termination::max_iters;
      break;
    }
    try {
      dr = assemble(sys, elem, sc, true);
    } catch (const std::runtime_error& err) {
      tr.termination = Termination::numerical_error;
      tr.message = err.what();
      break;
    }
  }
  if (tr.iterates.empty() && tr.termination == Termination::max_iters)
    tr.termination = Termination::no_improvement;

  if (best_psi <= psi) {
    tr.psi_final = best_psi;
    return {best, tr};
  }
  tr.psi_final = psi;
  return {elem, tr};
}

struct DescentReport {
  double directional_derivative = 0.0;   // finite-difference d/de psi(x + e z)
  double predicted = 0.0;                // -2 (psi - psi_lin)
};

/// Checks the descent identity of the projected Gauss-Newton direction: the
/// derivative of psi along the subproblem solution z equals minus twice the
/// squared norm of the projected residual.
inline DescentReport descent_check(const DAESystem& sys,
                                   const CollocationScheme& sc,
                                   const AnsatzElement& elem,
                                   double fd_step = 1e-7,
                                   const GNConfig& cfg = {}) {
  DiscreteResidual dr = assemble(sys, elem, sc, true);
  detail::Subproblem sub = detail::solve_subproblem(dr, cfg);
  DescentReport rep;
  rep.predicted = -2.0 * (dr.psi - sub.residual_norm * sub.residual_norm);
  AnsatzElement p = elem, q = elem;
  p.coeffs = elem.coeffs + fd_step * sub.z;
  q.coeffs = elem.coeffs - fd_step * sub.z;
  rep.directional_derivative =
      (assemble(sys, p, sc, false).psi - assemble(sys, q, sc, false).psi) /
      (2.0 * fd_step);
  return rep;
}

}  // namespace lsqdae
