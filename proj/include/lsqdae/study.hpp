#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lsqdae/ansatz.hpp"
#include "lsqdae/gauss_newton.hpp"
#include "lsqdae/lsq.hpp"
#include "lsqdae/metrics.hpp"
#include "lsqdae/multilevel.hpp"
#include "lsqdae/problems.hpp"
#include "lsqdae/types.hpp"

namespace lsqdae {

enum class StudyInit { interpolate_reference, zero, file };

struct StudyOptions {
  int N = 3;
  int M = 4;
  NodeFamily family = NodeFamily::uniform_interior;
  std::vector<int> n_list;
  StudyInit init = StudyInit::interpolate_reference;
  std::string init_file;  // element JSON, used with StudyInit::file
  bool multilevel = false;
  int q_inverse = 2;
  GNConfig gn;
  double bc_weight = 1.0;
  int quad_points = -1;
};

struct StudyRow {
  int row_id = 0;  // row index, or level in multilevel mode
  int n = 0;
  int N = 0;
  int M = 0;
  NodeFamily family = NodeFamily::uniform_interior;
  double psi_final = 0.0;
  int gn_iters = 0;
  Vector comp_errors;  // per-component L2 errors (empty without reference)
  double h1d = 0.0;
  bool failed = false;
  bool psi_monotone = true;
  Termination termination = Termination::no_improvement;
  std::string message;
};

struct ConvergenceStudy {
  std::string problem;
  int m = 0;
  std::vector<StudyRow> rows;

  bool any_failed() const {
    for (const auto& r : rows)
      if (r.failed) return true;
    return false;
  }
};

/// Initial guess for a solve: reference interpolant, zero element, or an
/// element checkpoint file.
inline AnsatzElement make_initial_element(const BenchmarkProblem& prob,
                                          AnsatzSpacePtr space,
                                          const StudyOptions& opt) {
  switch (opt.init) {
    case StudyInit::zero:
      return zero_element(space);
    case StudyInit::file: {
      std::ifstream f(opt.init_file);
      if (!f) throw ArgumentError("cannot open init file " + opt.init_file);
      nlohmann::json j;
      f >> j;
      AnsatzElement e = element_from_json(j);
      if (e.space->dim() != space->dim() || e.space->N != space->N ||
          e.space->m != space->m || e.space->k != space->k)
        throw ArgumentError("init file does not match the requested space");
      e.space = space;
      return e;
    }
    case StudyInit::interpolate_reference:
    default:
      if (!prob.sys.reference)
        throw ArgumentError("problem has no reference solution to interpolate");
      return interpolate(space,
                         [&](double t) { return prob.sys.reference(t).x; });
  }
}

/// One Gauss-Newton solve per mesh in n_list, each started cold from the
/// chosen initial guess (or, with opt.multilevel, the warm-started nested
/// driver across the same meshes; n_list must then grow by factor q_inverse).
/// Failed rows are recorded and the study continues where possible.
inline ConvergenceStudy run_convergence_study(const BenchmarkProblem& prob,
                                              const StudyOptions& opt) {
  if (opt.n_list.empty()) throw ArgumentError("study: empty n_list");
  const CollocationScheme scheme =
      make_scheme(opt.M, opt.family, opt.N, opt.bc_weight);

  ConvergenceStudy study;
  study.problem = prob.name;
  study.m = prob.sys.m;

  auto fill_row = [&](int row_id, const AnsatzElement& sol,
                      const GNTrace& tr) {
    StudyRow row;
    row.row_id = row_id;
    row.n = sol.space->n();
    row.N = opt.N;
    row.M = opt.M;
    row.family = opt.family;
    row.psi_final = tr.psi_final;
    row.gn_iters = tr.iterations();
    row.failed = tr.termination == Termination::numerical_error;
    row.psi_monotone = tr.psi_nonincreasing();
    row.termination = tr.termination;
    row.message = tr.message;
    if (prob.sys.reference && !row.failed) {
      const ErrorReport rep =
          error_norms(sol, prob.sys.reference, opt.quad_points);
      row.comp_errors = rep.comp_l2;
      row.h1d = rep.h1d;
    }
    return row;
  };

  if (opt.multilevel) {
    for (std::size_t i = 1; i < opt.n_list.size(); ++i)
      if (opt.n_list[i] != opt.n_list[i - 1] * opt.q_inverse)
        throw ArgumentError(
            "multilevel study: n_list must grow by factor q_inverse");
    auto space = make_space(
        make_uniform_partition(prob.sys.interval.a, prob.sys.interval.b,
                               opt.n_list.front()),
        opt.N, prob.sys.m, prob.sys.k);
    MultilevelConfig mc;
    mc.levels = static_cast<int>(opt.n_list.size());
    mc.q_inverse = opt.q_inverse;
    mc.gn = opt.gn;
    mc.record_errors = false;  // rows are filled uniformly below
    const AnsatzElement x0 = make_initial_element(prob, space, opt);
    const auto levels = multilevel_solve(prob.sys, scheme, x0, mc);
    for (const auto& lev : levels)
      study.rows.push_back(fill_row(lev.level, lev.solution, lev.trace));
    return study;
  }

  for (std::size_t i = 0; i < opt.n_list.size(); ++i) {
    auto space = make_space(
        make_uniform_partition(prob.sys.interval.a, prob.sys.interval.b,
                               opt.n_list[i]),
        opt.N, prob.sys.m, prob.sys.k);
    try {
      const AnsatzElement x0 = make_initial_element(prob, space, opt);
      auto [sol, tr] = gn_solve(prob.sys, scheme, x0, opt.gn);
      study.rows.push_back(fill_row(static_cast<int>(i), sol, tr));
    } catch (const std::runtime_error& err) {
      StudyRow row;
      row.row_id = static_cast<int>(i);
      row.n = opt.n_list[i];
      row.N = opt.N;
      row.M = opt.M;
      row.family = opt.family;
      row.failed = true;
      row.termination = Termination::numerical_error;
      row.message = err.what();
      study.rows.push_back(std::move(row));
    }
  }
  return study;
}

struct OrderRow {
  int n = 0;                        // coarse mesh of the pair
  std::vector<double> comp_orders;  // NaN where undefined
  double h1d_order = 0.0;
};

/// log2(e_n / e_2n) between consecutive rows (which must double n). Entries
/// with vanishing or non-finite denominators are NaN and display as a dash.
inline std::vector<OrderRow> estimate_orders(const ConvergenceStudy& study) {
  std::vector<OrderRow> out;
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    const StudyRow& c = study.rows[i];
    const StudyRow& f = study.rows[i + 1];
    if (f.n != 2 * c.n)
      throw ArgumentError("estimate_orders: consecutive rows must double n");
    OrderRow r;
    r.n = c.n;
    auto ord = [](double e0, double e1) {
      if (!(e1 > 0.0) || !std::isfinite(e0) || !std::isfinite(e1) || e0 <= 0.0)
        return std::numeric_limits<double>::quiet_NaN();
      return std::log2(e0 / e1);
    };
    if (c.comp_errors.size() == f.comp_errors.size())
      for (Index j = 0; j < c.comp_errors.size(); ++j)
        r.comp_orders.push_back(ord(c.comp_errors[j], f.comp_errors[j]));
    r.h1d_order = ord(c.h1d, f.h1d);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Study serialization. Fixed CSV header:
//   row,n,N,M,nodes,psi_final,gn_iters,err_c1..err_cm,err_h1d[,ord_*]
// Error columns use %.2e, psi %.17g, orders one decimal; undefined orders
// are written as an em dash.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

inline std::string study_csv_header(int m, bool with_orders) {
  std::string h = "row,n,N,M,nodes,psi_final,gn_iters";
  for (int c = 1; c <= m; ++c) h += ",err_c" + std::to_string(c);
  h += ",err_h1d";
  if (with_orders) {
    for (int c = 1; c <= m; ++c) h += ",ord_c" + std::to_string(c);
    h += ",ord_h1d";
  }
  return h;
}

inline std::string write_study_csv(const ConvergenceStudy& study,
                                   bool with_orders = false) {
  std::ostringstream out;
  out << study_csv_header(study.m, with_orders) << "\n";
  std::vector<OrderRow> orders;
  if (with_orders) orders = estimate_orders(study);
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const StudyRow& r = study.rows[i];
    out << r.row_id << "," << r.n << "," << r.N << "," << r.M << ","
        << to_string(r.family) << "," << detail::fmt("%.17g", r.psi_final)
        << "," << r.gn_iters;
    for (int c = 0; c < study.m; ++c)
      out << ","
          << (r.comp_errors.size() == study.m
                  ? detail::fmt("%.2e", r.comp_errors[c])
                  : std::string("—"));
    out << ","
        << (r.comp_errors.size() == study.m ? detail::fmt("%.2e", r.h1d)
                                            : std::string("—"));
    if (with_orders) {
      auto cell = [&](double v) {
        return std::isfinite(v) ? detail::fmt("%.1f", v) : std::string("—");
      };
      if (i < orders.size()) {
        for (int c = 0; c < study.m; ++c)
          out << ","
              << (static_cast<int>(orders[i].comp_orders.size()) == study.m
                      ? cell(orders[i].comp_orders[c])
                      : std::string("—"));
        out << "," << cell(orders[i].h1d_order);
      } else {
        for (int c = 0; c <= study.m; ++c) out << ",—";
      }
    }
    out << "\n";
  }
  return out.str();
}

inline ConvergenceStudy parse_study_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("parse_study_csv: empty");
  int m = 0;
  {
    std::istringstream hs(line);
    std::string tok;
    while (std::getline(hs, tok, ','))
      if (tok.rfind("err_c", 0) == 0) ++m;
  }
  ConvergenceStudy study;
  study.m = m;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ls, tok, ',')) cells.push_back(tok);
    if (cells.size() < static_cast<std::size_t>(7 + m + 1))
      throw ArgumentError("parse_study_csv: short row");
    StudyRow r;
    r.row_id = std::stoi(cells[0]);
    r.n = std::stoi(cells[1]);
    r.N = std::stoi(cells[2]);
    r.M = std::stoi(cells[3]);
    r.family = cells[4] == "gauss" ? NodeFamily::gauss_legendre
                                   : NodeFamily::uniform_interior;
    r.psi_final = std::stod(cells[5]);
    r.gn_iters = std::stoi(cells[6]);
    if (cells[7] != "—") {
      r.comp_errors.resize(m);
      for (int c = 0; c < m; ++c) r.comp_errors[c] = std::stod(cells[7 + c]);
      r.h1d = std::stod(cells[7 + m]);
    } else {
      r.failed = true;
    }
    study.rows.push_back(std::move(r));
  }
  return study;
}

inline std::string write_study_markdown(const ConvergenceStudy& study,
                                        bool with_orders = false) {
  std::ostringstream out;
  out << "| n |";
  for (int c = 1; c <= study.m; ++c) out << " err_c" << c << " |";
  out << " err_h1d | psi_final | iters |";
  if (with_orders) out << " orders |";
  out << "\n|";
  for (int c = 0; c < study.m + 4 + (with_orders ? 1 : 0); ++c) out << "---|";
  out << "\n";
  std::vector<OrderRow> orders;
  if (with_orders) orders = estimate_orders(study);
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const StudyRow& r = study.rows[i];
    out << "| " << r.n << " |";
    for (int c = 0; c < study.m; ++c)
      out << " "
          << (r.comp_errors.size() == study.m
                  ? detail::fmt("%.2e", r.comp_errors[c])
                  : std::string("—"))
          << " |";
    out << " "
        << (r.comp_errors.size() == study.m ? detail::fmt("%.2e", r.h1d)
                                            : std::string("—"))
        << " | " << detail::fmt("%.3g", r.psi_final) << " | " << r.gn_iters
        << " |";
    if (with_orders) {
      out << " ";
      if (i < orders.size()) {
        for (std::size_t c = 0; c < orders[i].comp_orders.size(); ++c)
          out << (c ? " " : "")
              << (std::isfinite(orders[i].comp_orders[c])
                      ? detail::fmt("%.1f", orders[i].comp_orders[c])
                      : std::string("—"));
      } else {
        out << "—";
      }
      out << " |";
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Smallest-singular-value scan of the collocation Jacobian at the reference
// interpolant across meshes. The headline column measures the operator the
// theory bounds: the residual norm is the weighted Euclidean one already, and
// coefficient space is renormalized by the H^1_D Gram factor, so
// sigma_min = min |J z| / |z|_{H1D}. The raw matrix value is reported too.
// ---------------------------------------------------------------------------

struct SvScanRow {
  int n = 0;
  double h = 0.0;
  double sigma_min = 0.0;      // H1D-weighted
  double sigma_min_raw = 0.0;  // plain sigma_min(J)
};

struct SvScan {
  std::vector<SvScanRow> rows;
  double slope = 0.0;      // log-log fit of the H1D-weighted column vs h
  double slope_raw = 0.0;
};

inline SvScan run_sv_scan(const BenchmarkProblem& prob, int N, int M,
                          NodeFamily family, const std::vector<int>& n_list) {
  if (!prob.sys.reference)
    throw ArgumentError("sv-scan: problem has no reference solution");
  const CollocationScheme scheme = make_scheme(M, family, N);
  SvScan scan;
  for (int n : n_list) {
    auto space = make_space(
        make_uniform_partition(prob.sys.interval.a, prob.sys.interval.b, n),
        N, prob.sys.m, prob.sys.k);
    const AnsatzElement xref =
        interpolate(space, [&](double t) { return prob.sys.reference(t).x; });
    const DiscreteResidual dr = assemble(prob.sys, xref, scheme, true);
    const Matrix J = dr.dense_jacobian();
    const Matrix H = build_h1d_gram(*space);
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success)
      throw NumericalError("sv-scan: H1D Gram factorization failed");
    // min |J z|/|z|_H = sigma_min(J L^{-T}) where H = L L^T
    const Matrix Jw =
        llt.matrixL().solve(J.transpose()).transpose();
    SvScanRow row;
    row.n = n;
    row.h = space->partition.h_max();
    row.sigma_min = smallest_singular_value(Jw);
    row.sigma_min_raw = smallest_singular_value(J);
    scan.rows.push_back(row);
  }
  auto fit = [&](auto value) {
    const std::size_t n = scan.rows.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : scan.rows) {
      const double x = std::log(r.h), y = std::log(value(r));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  if (scan.rows.size() >= 2) {
    scan.slope = fit([](const SvScanRow& r) { return r.sigma_min; });
    scan.slope_raw = fit([](const SvScanRow& r) { return r.sigma_min_raw; });
  }
  return scan;
}

}  // namespace lsqdae
