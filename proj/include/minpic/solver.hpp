#ifndef MINPIC_SOLVER_HPP
#define MINPIC_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "minpic/program.hpp"
#include "minpic/types.hpp"

namespace minpic {

struct SolverOptions {
  double feas_tol = 1e-7;   // phase-I decision margin
  double gap_tol = 1e-6;    // duality gap stop, original objective units
  int max_outer = 200;      // barrier re-centerings
  int max_newton = 400;     // Newton steps per centering; cheap at these sizes
  double t0 = 1.0;
  double mu = 10.0;
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  std::ostream* trace = nullptr;
};

enum class SolveStatus { optimal, infeasible, iteration_limit, numeric_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::iteration_limit: return "iteration_limit";
    default: return "numeric_failure";
  }
}

struct SolverResult {
  SolveStatus status = SolveStatus::numeric_failure;
  std::vector<double> x;           // full variable layout, pinned entries zero
  double objective = 0.0;
  double duality_gap = 0.0;
  std::vector<double> cons_dual;   // one multiplier per constraint
  std::vector<double> bound_dual;  // per variable, for x >= 0
  double kkt_residual = 0.0;       // inf norm of the stationarity defect
  double min_slack = 0.0;
  int newton_iters = 0;
  int outer_iters = 0;
  std::string message;
};

namespace ipm_detail {

struct Row {
  bool logaff = false;
  std::vector<std::pair<int, double>> lhs;  // free-space variable indexing
  double lhs_const = 0.0;
  std::vector<std::pair<int, double>> arg;
  double gamma = 1.0;
  double scale = 1.0;
};

struct Compiled {
  int F = 0;
  std::vector<int> free_to_full;
  std::vector<double> c;    // objective over free vars, divided by obj_scale
  double obj_scale = 1.0;
  std::vector<Row> rows;
};

inline Compiled compile(const ConvexProgram& prog) {
  Compiled cp;
  std::vector<int> to_free(prog.vars.size(), -1);
  for (size_t k = 0; k < prog.vars.size(); ++k)
    if (!prog.vars[k].pinned) {
      to_free[k] = cp.F++;
      cp.free_to_full.push_back((int)k);
    }
  for (size_t k = 0; k < prog.vars.size(); ++k)
    cp.obj_scale = std::max(cp.obj_scale, std::abs(prog.objective[k]));
  cp.c.assign(cp.F, 0.0);
  for (size_t k = 0; k < prog.vars.size(); ++k)
    if (to_free[k] >= 0) cp.c[to_free[k]] = prog.objective[k] / cp.obj_scale;
  for (const auto& con : prog.cons) {
    Row row;
    row.logaff = con.kind == ConstraintKind::log_affine;
    row.lhs_const = con.lhs.constant;
    // terms on pinned variables drop out: pinned means fixed at zero
    for (const auto& t : con.lhs.terms)
      if (to_free[t.first] >= 0) row.lhs.push_back({to_free[t.first], t.second});
    if (row.logaff) {
      for (const auto& t : con.arg.terms)
        if (to_free[t.first] >= 0) row.arg.push_back({to_free[t.first], t.second});
      row.gamma = con.gamma;
      row.scale = con.scale;
    }
    cp.rows.push_back(std::move(row));
  }
  return cp;
}

inline double row_slack(const Row& r, const std::vector<double>& z, double* u_out = nullptr) {
  double lhs = r.lhs_const;
  for (const auto& t : r.lhs) lhs += t.second * z[t.first];
  if (!r.logaff) return -lhs;
  double delta = 0.0;  // summed separately: log1p keeps tiny-gain rows exact
  for (const auto& t : r.arg) delta += t.second * z[t.first];
  if (u_out) *u_out = r.gamma + delta;
  return r.scale * std::log1p(delta / r.gamma) / std::log(2.0) - lhs;
}

/// Barrier objective t*c.z - sum ln(slack) - sum ln(z). Returns +inf outside
/// the strict interior.
inline double barrier_value(const std::vector<Row>& rows, const std::vector<double>& c, double t,
                            const std::vector<double>& z) {
  double f = 0.0;
  for (size_t k = 0; k < z.size(); ++k) {
    if (!(z[k] > 0.0)) return std::numeric_limits<double>::infinity();
    f += t * c[k] * z[k] - std::log(z[k]);
  }
  for (const auto& r : rows) {
    const double s = row_slack(r, z);
    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
    f -= std::log(s);
  }
  return f;
}

/// Gradient and Hessian of the barrier objective. For a log-affine row with
/// slack s and inner value u = gamma + a.z the slack gradient is
/// scale/(ln2 u) a - l and the Hessian picks up ds ds^T / s^2 plus the
/// concavity term scale/(ln2 u^2 s) a a^T.
inline bool barrier_derivs(const std::vector<Row>& rows, const std::vector<double>& c, double t,
                           const std::vector<double>& z, std::vector<double>& g,
                           std::vector<double>& H) {
  const int F = (int)z.size();
  g.assign(F, 0.0);
  H.assign((size_t)F * F, 0.0);
  for (int k = 0; k < F; ++k) {
    g[k] = t * c[k] - 1.0 / z[k];
    H[(size_t)k * F + k] += 1.0 / (z[k] * z[k]);
  }
  std::vector<double> ds(F);
  for (const auto& r : rows) {
    double u = 0.0;
    const double s = row_slack(r, z, &u);
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    std::fill(ds.begin(), ds.end(), 0.0);
    for (const auto& tm : r.lhs) ds[tm.first] -= tm.second;
    const double ln2 = std::log(2.0);
    if (r.logaff) {
      const double k1 = r.scale / (ln2 * u);
      for (const auto& tm : r.arg) ds[tm.first] += k1 * tm.second;
    }
    for (int k = 0; k < F; ++k)
      if (ds[k] != 0.0) g[k] -= ds[k] / s;
    const double w1 = 1.0 / (s * s);
    for (int a = 0; a < F; ++a) {
      if (ds[a] == 0.0) continue;
      const double wa = ds[a] * w1;
      for (int b = a; b < F; ++b)
        if (ds[b] != 0.0) H[(size_t)a * F + b] += wa * ds[b];
    }
    if (r.logaff) {
      const double w2 = r.scale / (ln2 * u * u * s);
      for (const auto& ta : r.arg) {
        const double wa = ta.second * w2;
        for (const auto& tb : r.arg)
          if (tb.first >= ta.first) H[(size_t)ta.first * F + tb.first] += wa * tb.second;
      }
    }
  }
  for (int a = 0; a < F; ++a)
    for (int b = a + 1; b < F; ++b) H[(size_t)b * F + a] = H[(size_t)a * F + b];
  return true;
}

/// In-place dense Cholesky solve of H d = rhs, false when H is not positive
/// definite. H is overwritten.
inline bool chol_solve(std::vector<double>& H, std::vector<double>& rhs, int F) {
  for (int j = 0; j < F; ++j) {
    double d = H[(size_t)j * F + j];
    for (int k = 0; k < j; ++k) d -= H[(size_t)j * F + k] * H[(size_t)j * F + k];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double L = std::sqrt(d);
    H[(size_t)j * F + j] = L;
    for (int i = j + 1; i < F; ++i) {
      double v = H[(size_t)i * F + j];
      for (int k = 0; k < j; ++k) v -= H[(size_t)i * F + k] * H[(size_t)j * F + k];
      H[(size_t)i * F + j] = v / L;
    }
  }
  for (int i = 0; i < F; ++i) {
    double v = rhs[i];
    for (int k = 0; k < i; ++k) v -= H[(size_t)i * F + k] * rhs[k];
    rhs[i] = v / H[(size_t)i * F + i];
  }
  for (int i = F; i-- > 0;) {
    double v = rhs[i];
    for (int k = i + 1; k < F; ++k) v -= H[(size_t)k * F + i] * rhs[k];
    rhs[i] = v / H[(size_t)i * F + i];
  }
  return true;
}

struct CenterOutcome {
  bool ok = false;        // no numeric breakdown
  bool converged = false; // Newton decrement below threshold
  int iters = 0;
};

/// Damped Newton to the central point for fixed t. early_exit, when set, is
/// polled after every step so phase-I can stop as soon as it has certified a
/// strictly feasible point.
inline CenterOutcome center(const std::vector<Row>& rows, const std::vector<double>& c, double t,
                            std::vector<double>& z, const SolverOptions& o,
                            const std::function<bool(const std::vector<double>&)>& early_exit) {
  const int F = (int)z.size();
  CenterOutcome out;
  std::vector<double> g, H, d, ztry(F);
  for (int it = 0; it < o.max_newton; ++it) {
    if (!barrier_derivs(rows, c, t, z, g, H)) return out;
    double trace = 0.0;
    for (int k = 0; k < F; ++k) trace += H[(size_t)k * F + k];
    double ridge = 0.0;
    std::vector<double> Hw;
    bool solved = false;
    for (int attempt = 0; attempt < 5 && !solved; ++attempt) {
      Hw = H;
      if (ridge > 0.0)
        for (int k = 0; k < F; ++k) Hw[(size_t)k * F + k] += ridge;
      d = g;
      for (auto& v : d) v = -v;
      solved = chol_solve(Hw, d, F);
      ridge = ridge == 0.0 ? 1e-12 * std::max(trace / F, 1.0) : ridge * 1e3;
    }
    if (!solved) return out;
    double lam2 = 0.0;
    for (int k = 0; k < F; ++k) lam2 -= g[k] * d[k];
    if (!(lam2 >= 0.0) || !std::isfinite(lam2)) return out;
    if (lam2 / 2.0 <= 1e-10) {
      out.ok = out.converged = true;
      out.iters = it;
      return out;
    }
    const double f0 = barrier_value(rows, c, t, z);
    double step = 1.0;
    bool moved = false;
    while (step > 1e-14) {
      for (int k = 0; k < F; ++k) ztry[k] = z[k] + step * d[k];
      const double f1 = barrier_value(rows, c, t, ztry);
      if (f1 <= f0 - o.ls_alpha * step * lam2) {
        z = ztry;
        moved = true;
        break;
      }
      step *= o.ls_beta;
    }
    ++out.iters;
    if (!moved) {
      out.ok = true;  // stuck at line-search resolution, keep the point
      return out;
    }
    if (early_exit && early_exit(z)) {
      out.ok = out.converged = true;
      return out;
    }
  }
  out.ok = true;
  return out;
}

}  // namespace ipm_detail

/// Interior-point minimization of a ConvexProgram with x >= 0. Phase I
/// minimizes the uniform constraint relaxation tau (shifted into a
/// nonnegative variable) and exits early once tau is safely negative; phase
/// II follows the standard log-barrier path, warm-started when the caller
/// supplies a strictly feasible point from an earlier solve of the same
/// feasible set. guess, unlike warm, need not be feasible: it seeds phase I
/// at the right scale, which matters when the region sits at powers far from
/// the all-ones default. Multipliers come from the barrier optimality
/// condition lambda_i = 1/(t s_i), rescaled to the original objective.
inline SolverResult solve(const ConvexProgram& prog, const SolverOptions& opts = {},
                          const std::vector<double>* warm = nullptr,
                          const std::vector<double>* guess = nullptr) {
  using namespace ipm_detail;
  prog.structural_check();
  SolverResult res;
  res.cons_dual.assign(prog.cons.size(), 0.0);
  res.bound_dual.assign(prog.vars.size(), 0.0);
  res.x.assign(prog.vars.size(), 0.0);
  if (prog.infeasible_marker) {
    res.status = SolveStatus::infeasible;
    res.message = prog.infeasible_reason;
    return res;
  }
  Compiled cp = compile(prog);
  const int F = cp.F;
  if (F == 0) {
    res.status = SolveStatus::optimal;
    for (const auto& row : cp.rows)
      if (row_slack(row, {}) < 0.0) res.status = SolveStatus::infeasible;
    return res;
  }

  std::vector<double> z;
  bool have_start = false;
  auto adopt = [&](const std::vector<double>& full) {
    if ((int)full.size() != (int)prog.vars.size()) return false;
    z.assign(F, 0.0);
    for (int k = 0; k < F; ++k) {
      z[k] = full[cp.free_to_full[k]];
      if (!(z[k] > 0.0) || !std::isfinite(z[k])) return false;
    }
    for (const auto& row : cp.rows)
      if (!(row_slack(row, z) > 1e-12)) return false;
    return true;
  };
  if (warm) have_start = adopt(*warm);
  if (!have_start && guess) have_start = adopt(*guess);
  if (!have_start && !prog.interior_hint.empty()) have_start = adopt(prog.interior_hint);

  if (!have_start) {
    std::vector<double> ones(F, 1.0);
    double min_s = std::numeric_limits<double>::infinity();
    for (const auto& row : cp.rows) min_s = std::min(min_s, row_slack(row, ones));
    if (min_s > 1e-4) {
      z = ones;
      have_start = true;
    }
  }

  if (!have_start) {
    // Phase I on the shifted relaxation: variable F holds tau + B. Open at
    // the guess when there is one: it carries the right magnitudes even when
    // it violates a row, and crossing decades of power scale inside the
    // centering is what makes cold phase-I runs stall.
    std::vector<double> ones(F, 1.0);
    if (guess && (int)guess->size() == (int)prog.vars.size()) {
      bool usable = true;
      for (int k = 0; k < F && usable; ++k) usable = std::isfinite((*guess)[cp.free_to_full[k]]);
      if (usable)
        for (int k = 0; k < F; ++k) ones[k] = std::max(1e-8, (*guess)[cp.free_to_full[k]]);
    }
    double min_s = std::numeric_limits<double>::infinity();
    for (const auto& row : cp.rows) min_s = std::min(min_s, row_slack(row, ones));
    const double tau0 = std::max(0.0, -min_s) + 1.0;
    const double B = tau0 + 1.0;
    std::vector<Row> rows1 = cp.rows;
    for (auto& row : rows1) {
      row.lhs.push_back({F, -1.0});
      row.lhs_const += B;
    }
    // Minimize c.z + W tau, not tau alone: slacks here grow without bound in
    // the power variables, so a pure tau objective walks the costless
    // coordinates toward infinity while tau creeps down. Keeping the real
    // cost grounds them; W makes feasibility dominate the trade, and it must
    // outweigh the cost at the start scale or a few units of tau get sold
    // for a cheaper power bill and the search plateaus while still violated.
    double cz0 = 0.0;
    for (int k = 0; k < F; ++k) cz0 += cp.c[k] * ones[k];
    const double W = 100.0 * std::max(1.0, std::abs(cz0));
    std::vector<double> c1(cp.c);
    c1.push_back(W);
    std::vector<double> z1 = ones;
    z1.push_back(tau0 + B);
    // Deep-interior exit: handing phase II a point hugging the boundary makes
    // its first centering crawl, so push tau well below zero first. Thin
    // regions cannot reach that depth, so after a few rounds any certified
    // interior is accepted rather than grinding the t-ladder to its end.
    double exit_margin = 1.0;
    auto good = [&](const std::vector<double>& p) { return p[F] <= B - exit_margin; };
    double t = opts.t0;
    const int m1 = (int)rows1.size() + F + 1;
    bool found = false, numeric_ok = true;
    int stalls = 0;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      if (outer >= 3) exit_margin = 1e-3;
      auto co = center(rows1, c1, t, z1, opts, good);
      res.newton_iters += co.iters;
      if (opts.trace)
        (*opts.trace) << "phase1 t=" << t << " newton=" << co.iters << " centered=" << co.converged
                      << " tau=" << z1[F] - B << "\n";
      if (!co.ok) {
        numeric_ok = false;
        break;
      }
      if (good(z1)) {
        found = true;
        break;
      }
      if (!co.converged) {
        // resume the same centering; z1 already carries the progress
        if (++stalls > 3) break;
        continue;
      }
      stalls = 0;
      if ((double)m1 / t <= 0.1 * opts.feas_tol) break;
      t *= opts.mu;
    }
    const double tau_star = z1[F] - B;
    if (!found && tau_star <= -1e-4) found = true;  // thin but usable interior
    if (!found) {
      if (!numeric_ok) {
        res.status = SolveStatus::numeric_failure;
        res.message = "phase I breakdown";
      } else {
        res.status = SolveStatus::infeasible;
        res.message = tau_star > opts.feas_tol
                          ? "no feasible point (best uniform violation " + std::to_string(tau_star) + ")"
                          : "feasible set has no usable strict interior";
      }
      return res;
    }
    z.assign(z1.begin(), z1.begin() + F);
  }

  // Phase II. The m/t gap bound only certifies a centered point, so t moves
  // forward only after the centering at the current t actually converged.
  double t = opts.t0;
  const int m = (int)cp.rows.size() + F;
  const double stop = opts.gap_tol + 1e-9 * cp.obj_scale;
  bool converged = false, numeric_ok = true, centered = false;
  int stalls = 0;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    auto co = center(cp.rows, cp.c, t, z, opts, nullptr);
    res.newton_iters += co.iters;
    ++res.outer_iters;
    if (!co.ok) {
      numeric_ok = false;
      break;
    }
    if (opts.trace)
      (*opts.trace) << "t=" << t << " newton=" << co.iters << " centered=" << co.converged
                    << " gap=" << cp.obj_scale * m / t << "\n";
    centered = co.converged;
    if (!co.converged) {
      if (++stalls > 3) break;
      continue;
    }
    stalls = 0;
    if (cp.obj_scale * m / t <= stop) {
      converged = true;
      break;
    }
    if (t > 1e15) break;
    // Land exactly on the barrier level the gap target needs instead of
    // overshooting by a full mu step; every extra decade of t squeezes the
    // slacks and costs Newton conditioning for nothing.
    t = std::min(t * opts.mu, 1.05 * cp.obj_scale * m / stop);
  }
  converged = converged && centered;

  for (int k = 0; k < F; ++k) res.x[cp.free_to_full[k]] = z[k];
  res.objective = 0.0;
  for (size_t k = 0; k < prog.vars.size(); ++k) res.objective += prog.objective[k] * res.x[k];
  res.duality_gap = cp.obj_scale * m / t;
  res.min_slack = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cp.rows.size(); ++i) {
    const double s = row_slack(cp.rows[i], z);
    res.min_slack = std::min(res.min_slack, s);
    res.cons_dual[i] = s > 0.0 ? cp.obj_scale / (t * s) : 0.0;
  }
  for (int k = 0; k < F; ++k)
    res.bound_dual[cp.free_to_full[k]] = cp.obj_scale / (t * z[k]);
  {
    std::vector<double> g, H;
    if (ipm_detail::barrier_derivs(cp.rows, cp.c, t, z, g, H)) {
      double worst = 0.0;
      for (double v : g) worst = std::max(worst, std::abs(v));
      res.kkt_residual = cp.obj_scale * worst / t;
    }
  }
  res.status = !numeric_ok ? SolveStatus::numeric_failure
               : converged ? SolveStatus::optimal
                           : SolveStatus::iteration_limit;
  if (res.status == SolveStatus::iteration_limit) res.message = "barrier stopped before gap target";
  return res;
}

/// Max relative mismatch between the analytic barrier gradient (t=1, raw
/// objective) and central differences at a strictly feasible point.
inline double finite_difference_audit(const ConvexProgram& prog, const std::vector<double>& x_full,
                                      double h = 1e-6) {
  using namespace ipm_detail;
  prog.structural_check();
  Compiled cp = compile(prog);
  std::vector<double> craw(cp.F);
  for (int k = 0; k < cp.F; ++k) craw[k] = cp.c[k] * cp.obj_scale;
  std::vector<double> z(cp.F);
  for (int k = 0; k < cp.F; ++k) z[k] = x_full[cp.free_to_full[k]];
  for (double v : z)
    if (!(v > 0.0)) throw argument_error("audit point must be componentwise positive");
  for (const auto& row : cp.rows)
    if (!(row_slack(row, z) > 0.0)) throw argument_error("audit point must be strictly feasible");
  std::vector<double> g, H;
  if (!barrier_derivs(cp.rows, craw, 1.0, z, g, H))
    throw numeric_error("audit point evaluation failed");
  double worst = 0.0;
  for (int k = 0; k < cp.F; ++k) {
    auto zp = z, zm = z;
    zp[k] += h;
    zm[k] -= h;
    const double fp = barrier_value(cp.rows, craw, 1.0, zp);
    const double fm = barrier_value(cp.rows, craw, 1.0, zm);
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(g[k] - fd) / (1.0 + std::abs(fd)));
  }
  return worst;
}

struct DualityReport {
  double gap = 0.0;
  double kkt_residual = 0.0;
  double max_comp_slack = 0.0;          // max over constraints of lambda_i * s_i
  std::vector<double> comp;             // per constraint
};

inline DualityReport duality_report(const ConvexProgram& prog, const SolverResult& res) {
  DualityReport rep;
  rep.gap = res.duality_gap;
  rep.kkt_residual = res.kkt_residual;
  rep.comp.resize(prog.cons.size());
  for (size_t i = 0; i < prog.cons.size(); ++i) {
    rep.comp[i] = res.cons_dual[i] * prog.cons[i].slack(res.x);
    rep.max_comp_slack = std::max(rep.max_comp_slack, rep.comp[i]);
  }
  return rep;
}

}  // namespace minpic

#endif
