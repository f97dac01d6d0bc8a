#ifndef MINPIC_CASES_HPP
#define MINPIC_CASES_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "minpic/baselines.hpp"
#include "minpic/outer_loop.hpp"
#include "minpic/sic.hpp"
#include "minpic/types.hpp"

namespace minpic {

/// Bundled study scenarios: two worked demos plus the five-case coupling
/// sweep (A near-zero cross talk .. E strong one-sided link). All use unit
/// noise, unit weights and a 0.5 bits/use requirement per user, scaled by
/// rate_factor just like everything else.
inline const std::vector<std::string>& builtin_case_ids() {
  static const std::vector<std::string> ids = {"demo2", "demo3", "A", "B", "C", "D", "E"};
  return ids;
}

namespace case_detail {
inline Scenario from_amplitudes(const std::vector<std::vector<double>>& h, double rate_factor) {
  const int u = static_cast<int>(h.size());
  Scenario sc;
  sc.users = u;
  sc.blocks = 1;
  sc.rate_factor = rate_factor;
  sc.gain.assign(u, std::vector<std::vector<double>>(u));
  for (int r = 0; r < u; ++r)
    for (int i = 0; i < u; ++i) sc.gain[r][i] = {h[r][i]};
  sc.noise.assign(u, std::vector<double>(1, 1.0));
  sc.weight.assign(u, 1.0);
  sc.rate_min.assign(u, 0.5);
  sc.validate();
  return sc;
}
}  // namespace case_detail

inline Scenario built_in_scenario(const std::string& id, double rate_factor = 1.0) {
  using case_detail::from_amplitudes;
  if (id == "demo2") return from_amplitudes({{0.4, 0.0}, {0.9, 1.0}}, rate_factor);
  if (id == "demo3")
    return from_amplitudes(
        {{1.0, 0.9, 0.001}, {0.001, 1.0, 0.001}, {0.001, 0.001, 1.0}}, rate_factor);
  if (id == "A") return from_amplitudes({{1.0, 1e-6}, {1e-6, 1.0}}, rate_factor);
  if (id == "B") return from_amplitudes({{1.0, 1e-2}, {1e-2, 1.0}}, rate_factor);
  if (id == "C") return from_amplitudes({{1.0, 0.9}, {1e-5, 1.0}}, rate_factor);
  if (id == "D")
    return from_amplitudes(
        {{1.0, 1e-5, 1e-5}, {1e-5, 1.0, 1e-5}, {1e-5, 1e-5, 1.0}}, rate_factor);
  if (id == "E")
    return from_amplitudes(
        {{1.0, 0.9, 1e-3}, {1e-3, 1.0, 1e-3}, {1e-3, 1e-3, 1.0}}, rate_factor);
  throw argument_error("unknown case id: " + id);
}

/// Totals quoted in the source write-up, kept as regression references only.
/// They sit above straightforward feasible points under either per-use
/// convention, so they anchor comparisons rather than assertions.
inline double reference_total(const std::string& id) {
  if (id == "demo2") return 23.02;
  if (id == "demo3") return 5.53;
  if (id == "A") return 1.76;
  if (id == "B") return 2.00;
  if (id == "C") return 4.33;
  if (id == "D") return 2.43;
  if (id == "E") return 4.55;
  throw argument_error("unknown case id: " + id);
}

/// Quoted penalty weights for the two demos (same caveat as the totals).
inline double reference_lambda(const std::string& id) {
  if (id == "demo2") return 16.80;
  if (id == "demo3") return 5.016;
  return std::numeric_limits<double>::quiet_NaN();
}

struct CaseReport {
  std::string id;
  double rate_factor = 1.0;
  Scenario scenario;
  SolveReport report;
  double our_total = std::numeric_limits<double>::infinity();
  double oma_total = std::numeric_limits<double>::infinity();
  double tin_total = std::numeric_limits<double>::infinity();
  bool tin_feasible = false;
  double waterfill_total = std::numeric_limits<double>::infinity();
  bool waterfill_feasible_here = false;  // diagonal-only allocation survives the cross talk
  double ref_total = std::numeric_limits<double>::quiet_NaN();
  double ratio_oma = std::numeric_limits<double>::quiet_NaN();
  std::string dominance;  // "ok" | "violated" | "infeasible"
};

/// Checks whether splitting the band 1/U-th per user really supports the
/// requirement: each user alone on its slice is a single-user problem.
inline bool oma_feasible(const Scenario& sc, const OmaResult& oma) {
  if (!oma.feasible) return false;
  for (int u = 0; u < sc.users; ++u) {
    std::vector<double> g2(sc.blocks), s2(sc.blocks);
    for (int n = 0; n < sc.blocks; ++n) {
      g2[n] = sc.power_gain(u, u, n);
      s2[n] = sc.sigma2(u, n);
    }
    WaterfillResult w =
        waterfill_min_power(g2, s2, sc.rate_factor / sc.users, sc.users * sc.rate_min[u]);
    if (!w.feasible) return false;
  }
  return true;
}

inline CaseReport reproduce_case(const std::string& id, double rate_factor,
                                 const MinpicOptions& opts = {}) {
  CaseReport cr;
  cr.id = id;
  cr.rate_factor = rate_factor;
  cr.scenario = built_in_scenario(id, rate_factor);
  const Scenario& sc = cr.scenario;
  cr.ref_total = reference_total(id);

  cr.report = minpic_solve(sc, opts);
  cr.our_total = cr.report.total;

  OmaResult oma = oma_total_power(sc);
  cr.oma_total = oma.total;

  TinResult tin = tin_fixed_point(sc);
  if (tin.converged) {
    cr.tin_total = tin.total;
    auto [tprof, tpt] = tin_allocation(sc, tin);
    cr.tin_feasible = verify_feasible(sc, tprof, tpt, 1e-6).feasible;
  }

  // interference-free waterfilling: a reference floor, feasible here only if
  // the same diagonal powers still decode once the cross talk is real
  cr.waterfill_total = interference_free_total(sc);
  if (std::isfinite(cr.waterfill_total)) {
    AllocationPoint pt = AllocationPoint::zeros(sc);
    DecodingProfile prof;
    prof.order.assign(sc.users, {});
    for (int u = 0; u < sc.users; ++u) {
      prof.order[u].push_back(SubStreamId{u, u});
      for (int j = 0; j < sc.users; ++j)
        if (j != u) prof.order[u].push_back(SubStreamId{u, j});
      std::vector<double> g2(sc.blocks), s2(sc.blocks);
      for (int n = 0; n < sc.blocks; ++n) {
        g2[n] = sc.power_gain(u, u, n);
        s2[n] = sc.sigma2(u, n);
      }
      WaterfillResult w = waterfill_min_power(g2, s2, sc.rate_factor, sc.rate_min[u]);
      for (int n = 0; n < sc.blocks; ++n) pt.power[u][u][n] = w.power[n];
    }
    auto rates = supportable_stream_rates(sc, prof, pt);
    for (int u = 0; u < sc.users; ++u)
      for (int n = 0; n < sc.blocks; ++n) pt.rate[u][u][n] = rates[u][u][n];
    cr.waterfill_feasible_here = verify_feasible(sc, prof, pt, 1e-6).feasible;
  }

  if (cr.report.feasible && cr.our_total > 0.0) cr.ratio_oma = cr.oma_total / cr.our_total;

  if (!cr.report.feasible) {
    cr.dominance = "infeasible";
  } else {
    // OMA stays out of this minimum: its total is costed on a 1/U slice of
    // the dimensions at U times the spectral efficiency, which is not an
    // allocation of this channel, only a reference to ratio against.
    double best_baseline = std::numeric_limits<double>::infinity();
    if (cr.tin_feasible) best_baseline = std::min(best_baseline, cr.tin_total);
    if (cr.waterfill_feasible_here) best_baseline = std::min(best_baseline, cr.waterfill_total);
    cr.dominance = cr.our_total <= best_baseline + 1e-4 ? "ok" : "violated";
  }
  return cr;
}

}  // namespace minpic

#endif
