#ifndef MINPIC_OUTER_LOOP_HPP
#define MINPIC_OUTER_LOOP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "minpic/baselines.hpp"
#include "minpic/order_search.hpp"
#include "minpic/relaxation.hpp"
#include "minpic/sic.hpp"
#include "minpic/solver.hpp"
#include "minpic/types.hpp"

namespace minpic {

struct BisectionConfig {
  double lambda_low = 0.0;
  double lambda_high = 64.0;       // doubled until the predicate holds
  double lambda_cap = 1048576.0;   // 2^20
  double epsilon = 1e-3;
  int max_doublings = 25;
  double verify_tol = 1e-6;
};

/// Outcome of the penalty search on one profile + aggregation.
struct ProfileSolve {
  DecodingProfile profile;
  AggregationMap agg;
  bool verified = false;
  double lambda_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double total = std::numeric_limits<double>::infinity();
  double relaxed_bound = std::numeric_limits<double>::infinity();  // objective at lambda 0
  AllocationPoint point;
  AllocationPoint probe;   // last point any solve recovered, verified or not
  bool has_probe = false;  // probes seed exact refits when verification failed
  // exactness margin at the ramp attempt whose total passed the incumbent
  double abandon_margin = -std::numeric_limits<double>::infinity();
  SolverResult sol;
  DualVector user_duals;
  int solves = 0;
  std::string note;
};

/// Smallest penalty weight at which the relaxed solution, expanded back to
/// per-stream powers, is exactly decodable and meets every rate requirement.
/// The feasible set does not depend on lambda, so the first solve doubles as
/// a warm start for every later one, and a relaxation declared infeasible at
/// any lambda is infeasible at all of them. prune_above, when finite, stops
/// after the lambda-0 solve if even the relaxed optimum (a lower bound on
/// this profile's verified total) cannot beat it.
inline ProfileSolve bisect_lambda(const Scenario& sc, const DecodingProfile& prof,
                                  const AggregationMap& agg, const BisectionConfig& bis = {},
                                  const SolverOptions& sopts = {},
                                  double prune_above = std::numeric_limits<double>::infinity()) {
  ProfileSolve ps;
  ps.profile = prof;
  ps.agg = agg;
  ps.user_duals.assign(sc.users, 0.0);
  Relaxation rel = build_relaxation(sc, prof, agg, bis.lambda_low);

  std::vector<double> warm;
  bool have_warm = false;
  AllocationPoint pt_ok;
  SolverResult sol_ok;
  struct Att {
    int st = 3;  // 0: exact-feasible, 1: not yet, 2: relaxation infeasible, 3: numeric trouble
    double total = std::numeric_limits<double>::infinity();
    double objective = 0.0;
    double margin = -std::numeric_limits<double>::infinity();  // worst exactness shortfall
    std::string message;
  };
  auto attempt = [&](double lam) -> Att {
    rel.set_lambda(lam);
    SolverResult r = solve(rel.prog, sopts, have_warm ? &warm : nullptr);
    ++ps.solves;
    Att a;
    a.objective = r.objective;
    a.message = r.message;
    if (r.status == SolveStatus::infeasible) {
      a.st = 2;
      return a;
    }
    if (r.status == SolveStatus::numeric_failure) {
      a.st = 3;
      return a;
    }
    warm = r.x;
    have_warm = true;
    AllocationPoint pt = recover_allocation(sc, prof, agg, rel, r.x);
    a.total = total_weighted_power(sc, pt);
    ps.probe = pt;
    ps.has_probe = true;
    const FeasibilityReport fr = verify_feasible(sc, prof, pt, bis.verify_tol);
    a.margin = fr.worst_chain_slack;
    for (double m : fr.user_margin) a.margin = std::min(a.margin, m);
    if (fr.feasible) {
      pt_ok = std::move(pt);
      sol_ok = std::move(r);
    }
    a.st = fr.feasible ? 0 : 1;
    return a;
  };

  const Att a0 = attempt(bis.lambda_low);
  if (a0.st == 2) {
    ps.note = "relaxation infeasible: " + a0.message;
    return ps;
  }
  if (a0.st == 3) {
    ps.note = "solver failed at lambda " + std::to_string(bis.lambda_low) + ": " + a0.message;
    return ps;
  }
  ps.relaxed_bound = a0.objective;

  double lo = bis.lambda_low, hi = bis.lambda_low;
  if (a0.st != 0) {
    if (ps.relaxed_bound >= prune_above) {
      ps.note = "pruned: relaxed lower bound " + std::to_string(ps.relaxed_bound) +
                " cannot improve the incumbent";
      return ps;
    }
    // Probe upward from a mild penalty rather than opening at lambda_high:
    // most profiles either verify within a few bits of penalty or reveal a
    // hopeless power ramp early, and both are far cheaper to learn at small
    // lambda where the program is well scaled and the warm start is close.
    hi = std::max(bis.epsilon, std::min(2.0, bis.lambda_high));
    bool found = false;
    double best_margin = a0.margin;
    int flat = 0;
    for (int d = 0; d <= bis.max_doublings; ++d) {
      const Att a = attempt(hi);
      if (a.st == 0) {
        found = true;
        break;
      }
      // Totals along the penalty ramp only climb from here; once they pass
      // the incumbent this profile cannot win, so stop feeding it solves.
      if (a.st == 1 && std::isfinite(prune_above) && a.total > 1.2 * prune_above + 0.1) {
        ps.note = "abandoned: penalty ramp total " + std::to_string(a.total) +
                  " passes the incumbent";
        ps.abandon_margin = a.margin;
        ps.bracket_lo = lo;
        ps.bracket_hi = hi;
        return ps;
      }
      // On channels where inflating the floor keeps paying for its own
      // credit, the shortfall freezes while lambda doubles; there is no
      // exactness in that direction at any price.
      if (a.st == 1) {
        if (a.margin > best_margin + 1e-4) {
          best_margin = a.margin;
          flat = 0;
        } else if (best_margin < -1e-3 && ++flat >= 3) {  // nearly exact: keep going
          ps.note = "abandoned: exactness shortfall stuck at " + std::to_string(-best_margin) +
                    " while the penalty doubled";
          ps.bracket_lo = lo;
          ps.bracket_hi = hi;
          return ps;
        }
      }
      lo = hi;
      if (hi * 2.0 > bis.lambda_cap) break;
      hi *= 2.0;
    }
    if (!found) {
      ps.note = "no finite penalty reached exactness (cap " + std::to_string(bis.lambda_cap) + ")";
      ps.bracket_lo = lo;
      ps.bracket_hi = hi;
      return ps;
    }
    while (hi - lo > bis.epsilon) {
      const double mid = 0.5 * (lo + hi);
      if (attempt(mid).st == 0)
        hi = mid;
      else
        lo = mid;
    }
  }

  ps.verified = true;
  ps.lambda_star = hi;
  ps.bracket_lo = lo;
  ps.bracket_hi = hi;
  ps.point = pt_ok;
  ps.sol = sol_ok;
  ps.total = total_weighted_power(sc, pt_ok);
  for (int u = 0; u < sc.users; ++u) {
    const int row = rel.layout.rate_row[u];
    if (row >= 0) ps.user_duals[u] = sol_ok.cons_dual[row];
  }
  return ps;
}

/// Result of the successive refit loop on one profile.
struct RefitOutcome {
  bool verified = false;
  AllocationPoint point;
  double total = std::numeric_limits<double>::infinity();
  SolverResult sol;
  DualVector user_duals;
  int rounds = 0;
  int solves = 0;
};

/// Descend over exactly decodable allocations by re-solving the per-position
/// program around its own answer. Conservative rows make every accepted
/// iterate exact, so no penalty or verification bracket is involved; the
/// loop stops when the total stalls, a solve fails, or the trajectory sits
/// hopelessly above hopeless_above. Returns the cheapest verified iterate.
inline RefitOutcome refit_exact(const Scenario& sc, const DecodingProfile& prof,
                                const AggregationMap& agg, const AllocationPoint& seed,
                                const SolverOptions& sopts = {}, double verify_tol = 1e-6,
                                int max_rounds = 16,
                                double hopeless_above = std::numeric_limits<double>::infinity()) {
  RefitOutcome out;
  out.user_duals.assign(sc.users, 0.0);
  AllocationPoint cur = seed;
  double prev = std::numeric_limits<double>::infinity();
  int stalls = 0;
  for (int round = 0; round < max_rounds; ++round) {
    Relaxation rel = build_refit_program(sc, prof, agg, cur);
    if (rel.prog.infeasible_marker) break;
    // Open at the expansion powers with the rates their chains support: the
    // rate rows hold from the first step and phase I only has to clear the
    // decode rows.
    std::vector<double> x =
        relax_detail::power_values(sc, agg, rel.layout, rel.prog.vars.size(), cur);
    const auto corner = supportable_stream_rates(sc, prof, cur);
    if (round == 0) {
      // A seed whose chains give some user essentially none of its floor is
      // structurally wrong for this profile; the refit would only prove
      // infeasibility the slow way.
      bool hopeless = false;
      for (int u = 0; u < sc.users; ++u) {
        if (sc.rate_min[u] <= 0.0) continue;
        double sum = 0.0;
        for (int j = 0; j < sc.users; ++j)
          for (int n = 0; n < sc.blocks; ++n) sum += corner[u][j][n];
        hopeless = hopeless || sum < 1e-3 * sc.rate_min[u];
      }
      if (hopeless) break;
    }
    for (int i = 0; i < sc.users; ++i)
      for (int j = 0; j < sc.users; ++j)
        for (int n = 0; n < sc.blocks; ++n) {
          const int v = rel.layout.rate_var[i][j][n];
          if (v >= 0 && !rel.prog.vars[v].pinned) x[v] += corner[i][j][n];
        }
    for (int i = 0; i < sc.users; ++i)
      for (int j = 0; j < sc.users; ++j)
        for (int n = 0; n < sc.blocks; ++n) {
          const int v = rel.layout.rate_var[i][j][n];
          if (v >= 0 && !rel.prog.vars[v].pinned) x[v] = std::max(x[v], 1e-6);
        }
    // Solve in units of the opening point. Strong-rate channels push powers
    // across four or more decades and the barrier stalls when raw units put
    // the Hessian that far out of scale; dividing each variable by its seed
    // magnitude brings every start back to order one. Row duals and the
    // objective value are invariant under this change of variables.
    ConvexProgram scaled = rel.prog;
    std::vector<double> unit(scaled.vars.size(), 1.0);
    for (size_t v = 0; v < scaled.vars.size(); ++v)
      if (!scaled.vars[v].pinned) unit[v] = std::max(1.0, std::abs(x[v]));
    for (auto& con : scaled.cons) {
      for (auto& t : con.lhs.terms) t.second *= unit[t.first];
      for (auto& t : con.arg.terms) t.second *= unit[t.first];
    }
    for (size_t v = 0; v < scaled.vars.size(); ++v) scaled.objective[v] *= unit[v];
    std::vector<double> xs(x.size(), 0.0);
    for (size_t v = 0; v < x.size(); ++v) xs[v] = x[v] / unit[v];
    SolverResult r = solve(scaled, sopts, &xs, &xs);
    for (size_t v = 0; v < r.x.size() && v < unit.size(); ++v) r.x[v] *= unit[v];
    ++out.solves;
    if (r.status != SolveStatus::optimal && r.status != SolveStatus::iteration_limit) break;
    AllocationPoint pt = recover_allocation(sc, prof, agg, rel, r.x);
    // no credit variables here; report the exact floor value so the
    // exactness gap of an accepted point reads zero
    for (int rr = 0; rr < sc.users; ++rr)
      for (int n = 0; n < sc.blocks; ++n) {
        const double unc = undecoded_interference(sc, prof, pt, rr, n);
        pt.aux[rr][n] = sc.rate_factor * std::log2(1.0 + unc / sc.sigma2(rr, n));
      }
    const double tot = total_weighted_power(sc, pt);
    ++out.rounds;
    if (verify_feasible(sc, prof, pt, verify_tol).feasible && tot < out.total) {
      out.verified = true;
      out.total = tot;
      out.point = pt;
      out.sol = r;
      for (int u = 0; u < sc.users; ++u) {
        const int row = rel.layout.rate_row[u];
        if (row >= 0) out.user_duals[u] = r.cons_dual[row];
      }
    }
    // Descent is front-loaded: the early rounds move support and scale, the
    // late ones polish. A trajectory still far over the incumbent by then is
    // finishing an answer that loses.
    if (round >= 2 && tot > 3.0 * hopeless_above + 1.0) break;
    if (round >= 4 && tot > 1.5 * hopeless_above + 0.5) break;
    if (prev - tot <= 1e-7 * (1.0 + std::abs(tot))) {
      if (++stalls >= 2) break;
    } else {
      stalls = 0;
    }
    prev = tot;
    cur = std::move(pt);
  }
  return out;
}

enum class SearchMode { exhaustive, dual_guided };

inline const char* to_string(SearchMode m) {
  return m == SearchMode::exhaustive ? "exhaustive" : "dual-guided";
}

struct MinpicOptions {
  SearchMode mode = SearchMode::exhaustive;
  BisectionConfig bisection;
  SolverOptions solver;
  bool use_collapse = true;       // pool redundant power dimensions before solving
  int max_exhaustive_users = 3;   // profile count grows super-exponentially past this
  int guided_rounds = 10;
};

struct ProfileLogEntry {
  std::string profile;
  double lambda_star = 0.0;
  double total = std::numeric_limits<double>::infinity();
  bool verified = false;
  int solves = 0;
  std::string note;
};

struct SolveReport {
  bool feasible = false;
  SearchMode mode = SearchMode::exhaustive;
  DecodingProfile profile;
  AggregationMap agg;
  AllocationPoint point;
  double total = std::numeric_limits<double>::infinity();
  double lambda_star = 0.0;
  SolverResult sol;
  DualVector user_duals;
  std::vector<double> rates;               // recomputed from chains, never from the program
  std::vector<std::vector<double>> gaps;   // exactness gap per receiver-block
  std::vector<ProfileLogEntry> log;
  int profiles_examined = 0;
  long total_solves = 0;
  std::string message;
};

/// Floor-matching seeds over single-companion support patterns. Each user
/// concentrates its power on one companion stream and a multiplicative
/// iteration chases the rate floors through the profile's chains. Support is
/// what matters: an active stream another receiver cannot cancel saturates
/// that receiver's increments, and no power scaling recovers the floor, so
/// saturated patterns are detected here and dropped instead of handing the
/// refit an infeasibility proof to grind through.
inline std::vector<AllocationPoint> support_seeds(const Scenario& sc,
                                                  const DecodingProfile& prof) {
  std::vector<AllocationPoint> out;
  const int U = sc.users, N = sc.blocks;
  long combos = 1;
  for (int u = 0; u < U; ++u) combos *= U;
  if (combos > 81) return out;
  for (long m = 0; m < combos; ++m) {
    AllocationPoint pt = AllocationPoint::zeros(sc);
    long v = m;
    for (int u = 0; u < U; ++u) {
      const int pick = (int)(v % U);
      v /= U;
      if (sc.rate_min[u] <= 0.0) continue;
      for (int n = 0; n < N; ++n) pt.power[u][pick][n] = 1.0;
    }
    for (int round = 0; round < 48; ++round) {
      const auto corner = supportable_stream_rates(sc, prof, pt);
      for (int u = 0; u < U; ++u) {
        if (sc.rate_min[u] <= 0.0) continue;
        double have = 0.0;
        for (int j = 0; j < U; ++j)
          for (int n = 0; n < N; ++n) have += corner[u][j][n];
        double f = std::pow(2.0, sc.rate_min[u] - have);
        f = std::min(4.0, std::max(0.25, f));
        for (int j = 0; j < U; ++j)
          for (int n = 0; n < N; ++n)
            pt.power[u][j][n] = std::min(1e12, pt.power[u][j][n] * f);
      }
    }
    const auto corner = supportable_stream_rates(sc, prof, pt);
    bool viable = true;
    for (int u = 0; u < U; ++u) {
      double have = 0.0;
      for (int j = 0; j < U; ++j)
        for (int n = 0; n < N; ++n) have += corner[u][j][n];
      viable = viable && have >= sc.rate_min[u] - 0.05;
    }
    if (viable) out.push_back(std::move(pt));
  }
  // cheapest fixed point first: it usually is the answer, and the callers
  // cut off the expensive redundant patterns once it has been refined
  std::sort(out.begin(), out.end(), [&](const AllocationPoint& a, const AllocationPoint& b) {
    return total_weighted_power(sc, a) < total_weighted_power(sc, b);
  });
  return out;
}

/// One profile end to end: penalty bisection per aggregation, then exact
/// refits seeded from the points the bisection visited and from the
/// floor-matched support seeds. The penalty search can stall short of
/// exactness on channels where the credit keeps paying for itself; the refit
/// lanes recover those profiles.
inline ProfileSolve best_for_profile(const Scenario& sc, const DecodingProfile& prof,
                                     const MinpicOptions& opts, SolveReport& rep,
                                     double incumbent) {
  const AggregationMap ident = AggregationMap::identity(sc);
  ProfileSolve best;
  best.profile = prof;
  best.agg = ident;
  best.user_duals.assign(sc.users, 0.0);
  int lane_solves = 0;
  double rb = std::numeric_limits<double>::infinity();  // identity-equivalent lambda-0 bound
  double abandon_margin = -std::numeric_limits<double>::infinity();
  double lambda_star_seen = 0.0;
  bool bisect_verified = false;
  std::vector<AllocationPoint> seeds;

  auto gate = [&] { return std::min(incumbent, best.verified ? best.total : incumbent); };

  auto run_bisect = [&](const AggregationMap& agg, bool bound_is_tight) {
    ProfileSolve ps = bisect_lambda(sc, prof, agg, opts.bisection, opts.solver, gate());
    lane_solves += ps.solves;
    rep.total_solves += ps.solves;
    rep.log.push_back(
        {to_string(prof), ps.lambda_star, ps.total, ps.verified, ps.solves, ps.note});
    if (bound_is_tight) rb = std::min(rb, ps.relaxed_bound);
    abandon_margin = std::max(abandon_margin, ps.abandon_margin);
    if (ps.verified) {
      seeds.push_back(ps.point);
      if (!bisect_verified || ps.lambda_star < lambda_star_seen) {
        lambda_star_seen = ps.lambda_star;
        bisect_verified = true;
      }
      if (!best.verified || ps.total < best.total - 1e-9) best = std::move(ps);
    } else if (ps.has_probe) {
      seeds.push_back(ps.probe);
    }
  };

  if (!opts.use_collapse) {
    run_bisect(ident, true);
  } else {
    // a merge with shared values restricts the feasible powers, so its
    // lambda-0 objective does not bound the unmerged program
    AggregationMap agg = collapse_dof(sc, prof);
    run_bisect(agg, !agg.has_shared());
  }

  // The lambda-0 bound prices credits for free, so it sits well under any
  // exact answer; it still rules a profile out once the incumbent dips
  // beneath it.
  auto futile = [&] { return std::isfinite(rb) && rb >= gate() - 1e-9; };

  auto try_refit = [&](const AllocationPoint& seed, const char* origin) {
    RefitOutcome ro = refit_exact(sc, prof, ident, seed, opts.solver, opts.bisection.verify_tol,
                                  16, gate());
    lane_solves += ro.solves;
    rep.total_solves += ro.solves;
    ProfileLogEntry e;
    e.profile = to_string(prof);
    e.total = ro.total;
    e.verified = ro.verified;
    e.solves = ro.solves;
    e.note = std::string("exact refit, ") + origin + " seed";
    rep.log.push_back(std::move(e));
    if (ro.verified && (!best.verified || ro.total < best.total - 1e-9)) {
      best.verified = true;
      best.agg = ident;
      best.total = ro.total;
      best.point = std::move(ro.point);
      best.sol = std::move(ro.sol);
      best.user_duals = std::move(ro.user_duals);
      best.lambda_star = bisect_verified ? lambda_star_seen : 0.0;
      best.bracket_lo = best.bracket_hi = best.lambda_star;
      best.note = std::string("exact refit, ") + origin + " seed";
    }
  };

  if (!futile())
    for (const auto& seed : seeds) try_refit(seed, "bisection");

  // Support-pattern seeds step in when the bisection-side lanes left the
  // profile unverified or verified far above the bound: the penalty path can
  // settle on the wrong set of active streams, and no amount of polishing
  // moves it to a different support.
  bool want_support = !best.verified;
  if (!want_support && std::isfinite(rb)) want_support = best.total > 2.0 * rb + 1.0;
  // A ramp that passed the incumbent while nearly exact was reading real
  // totals: that profile lost on the merits. The failure this lane repairs,
  // a support the penalty path cannot leave, announces itself as a large
  // shortfall instead.
  if (want_support && abandon_margin > -0.05) want_support = false;
  if (want_support && !futile()) {
    std::vector<AllocationPoint> pats = support_seeds(sc, prof);
    // The refit is not confined to its seed's support, so the cheapest fixed
    // points already reach the basins that matter; the costlier patterns
    // rediscover the same answers from further away.
    if (pats.size() > 2) pats.resize(2);
    for (const auto& seed : pats) {
      if (futile()) break;
      // same logic once an incumbent exists: a pattern whose floor-matched
      // cost sits far above it only re-derives the cheaper pattern's answer
      const double g = gate();
      if (std::isfinite(g) && total_weighted_power(sc, seed) > 4.0 * g + 1.0) continue;
      try_refit(seed, "support");
    }
  }

  best.relaxed_bound = rb;
  best.solves = lane_solves;
  return best;
}

/// Full search: order optimization wrapped around the per-profile pipeline.
/// exhaustive visits the whole profile family (raw orders for U <= 2, the
/// block family for U = 3) deduplicated by program isomorphism; dual_guided
/// starts from decode-strongest-first and follows the rate-constraint duals.
/// Ties in total break toward the lexicographically smallest profile string.
inline SolveReport minpic_solve(const Scenario& sc, const MinpicOptions& opts = {}) {
  sc.validate();
  SolveReport rep;
  rep.mode = opts.mode;
  rep.user_duals.assign(sc.users, 0.0);

  ProfileSolve best;
  std::string best_key;
  auto merge = [&](ProfileSolve&& ps) {
    if (!ps.verified) return;
    const std::string key = to_string(ps.profile);
    const bool better = ps.total < best.total - 1e-9 ||
                        (std::abs(ps.total - best.total) <= 1e-9 &&
                         (!best.verified || key < best_key));
    if (better) {
      best = std::move(ps);
      best_key = key;
    }
  };

  if (opts.mode == SearchMode::exhaustive) {
    if (sc.users > opts.max_exhaustive_users)
      throw capacity_error("exhaustive search capped at " +
                           std::to_string(opts.max_exhaustive_users) + " users");
    std::set<std::string> seen;
    auto visit = [&](const DecodingProfile& p) {
      if (!seen.insert(profile_signature(sc, p)).second) return;
      ++rep.profiles_examined;
      merge(best_for_profile(sc, p, opts, rep,
                             best.verified ? best.total
                                           : std::numeric_limits<double>::infinity()));
    };
    // strongest-decoded-first is the usual winner; visiting it first gives
    // the bound prune a tight incumbent for the rest of the family
    DualVector neg_gain(sc.users, 0.0);
    for (int u = 0; u < sc.users; ++u)
      for (int n = 0; n < sc.blocks; ++n) neg_gain[u] -= sc.power_gain(u, u, n);
    visit(dual_rank_profile(sc, neg_gain));
    if (sc.users <= 2)
      enumerate_profiles(sc, true, visit);
    else
      enumerate_block_profiles(sc, visit);
  } else {
    DualVector neg_gain(sc.users, 0.0);
    for (int u = 0; u < sc.users; ++u)
      for (int n = 0; n < sc.blocks; ++n) neg_gain[u] -= sc.power_gain(u, u, n);
    DecodingProfile cur = dual_rank_profile(sc, neg_gain);  // strongest decoded first
    std::set<std::string> seen;
    for (int round = 0; round < opts.guided_rounds; ++round) {
      if (!seen.insert(profile_signature(sc, cur)).second) break;
      ++rep.profiles_examined;
      ProfileSolve ps = best_for_profile(sc, cur, opts, rep,
                                         best.verified ? best.total
                                                       : std::numeric_limits<double>::infinity());
      if (!ps.verified) break;
      DualVector round_duals = ps.user_duals;
      merge(std::move(ps));
      cur = dual_rank_profile(sc, round_duals);
    }
  }

  if (!best.verified) {
    rep.message = "no profile produced a verified feasible allocation";
    return rep;
  }
  rep.feasible = true;
  rep.profile = best.profile;
  rep.agg = best.agg;
  rep.point = best.point;
  rep.total = best.total;
  rep.lambda_star = best.lambda_star;
  rep.sol = best.sol;
  rep.user_duals = best.user_duals;
  rep.rates = achieved_user_rates(sc, rep.profile, rep.point);
  rep.gaps = exactness_gap(sc, rep.profile, rep.point);
  return rep;
}

}  // namespace minpic

#endif
