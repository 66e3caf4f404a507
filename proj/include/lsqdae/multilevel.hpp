#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lsqdae/ansatz.hpp"
#include "lsqdae/gauss_newton.hpp"
#include "lsqdae/metrics.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

struct MultilevelConfig {
  int levels = 1;
  int q_inverse = 2;  // stepsize ratio between consecutive levels is 1/q_inverse
  GNConfig gn;
  std::map<int, GNConfig> per_level;  // optional per-level overrides
  bool record_errors = true;
  int quad_points = -1;

  void validate() const {
    if (levels < 1) throw ArgumentError("MultilevelConfig: levels >= 1");
    if (q_inverse < 2) throw ArgumentError("MultilevelConfig: q_inverse >= 2");
  }
};

struct LevelResult {
  int level = 0;
  int n = 0;
  double h_max = 0.0;
  AnsatzElement solution;
  GNTrace trace;
  std::optional<ErrorReport> errors;
};

/// Nested multilevel driver: solve on the coarse mesh, split every interval
/// into q_inverse parts, prolongate the final iterate as the warm start of
/// the next level, repeat. Nestedness of the ansatz spaces makes the
/// prolongation exact. A level that fails numerically aborts the remaining
/// ones; the partial results are returned.
inline std::vector<LevelResult> multilevel_solve(const DAESystem& sys,
                                                 const CollocationScheme& sc,
                                                 const AnsatzElement& x0,
                                                 const MultilevelConfig& cfg) {
  cfg.validate();
  std::vector<LevelResult> out;
  AnsatzElement start = x0;
  for (int lev = 0; lev < cfg.levels; ++lev) {
    const GNConfig& gn =
        cfg.per_level.count(lev) ? cfg.per_level.at(lev) : cfg.gn;
    auto [solution, trace] = gn_solve(sys, sc, start, gn);

    LevelResult res;
    res.level = lev;
    res.n = solution.space->n();
    res.h_max = solution.space->partition.h_max();
    res.solution = solution;
    res.trace = std::move(trace);
    if (cfg.record_errors && sys.reference)
      res.errors = error_norms(solution, sys.reference, cfg.quad_points);
    const bool failed = res.trace.termination == Termination::numerical_error;
    out.push_back(std::move(res));
    if (failed) break;

    if (lev + 1 < cfg.levels) {
      auto fine = make_space(
          refine_nested(solution.space->partition, cfg.q_inverse),
          solution.space->N, solution.space->m, solution.space->k);
      start = prolongate(solution, fine);
    }
  }
  return out;
}

}  // namespace lsqdae
