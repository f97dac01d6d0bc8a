#ifndef MINPIC_BASELINES_HPP
#define MINPIC_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "minpic/order_search.hpp"
#include "minpic/sic.hpp"
#include "minpic/types.hpp"

namespace minpic {

struct WaterfillResult {
  std::vector<double> power;
  double total = 0.0;
  double level = 0.0;  // common water level over active blocks
  bool feasible = false;
};

/// Least total power hitting `target` bits on parallel channels with power
/// gains g2 and noises s2: fill to the level where the active-set rate
/// matches. Exact active-set sweep, no iteration.
inline WaterfillResult waterfill_min_power(const std::vector<double>& g2,
                                           const std::vector<double>& s2, double rho,
                                           double target) {
  const int N = (int)g2.size();
  WaterfillResult out;
  out.power.assign(N, 0.0);
  if (target <= 0.0) {
    out.feasible = true;
    return out;
  }
  std::vector<int> usable;
  for (int n = 0; n < N; ++n)
    if (g2[n] > 0.0) usable.push_back(n);
  if (usable.empty()) return out;
  std::sort(usable.begin(), usable.end(),
            [&](int a, int b) { return s2[a] / g2[a] < s2[b] / g2[b]; });
  const int K = (int)usable.size();
  double log_tau_sum = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double tau_k = s2[usable[k - 1]] / g2[usable[k - 1]];
    log_tau_sum += std::log2(tau_k);
    const double log_mu = (target / rho + log_tau_sum) / k;
    const double mu = std::exp2(log_mu);
    const double next_tau =
        k < K ? s2[usable[k]] / g2[usable[k]] : std::numeric_limits<double>::infinity();
    if (mu <= next_tau || k == K) {
      if (mu <= tau_k) continue;  // numerically degenerate, widen the set
      out.level = mu;
      for (int i = 0; i < k; ++i) {
        const int n = usable[i];
        out.power[n] = mu - s2[n] / g2[n];
        out.total += out.power[n];
      }
      out.feasible = true;
      return out;
    }
  }
  return out;
}

struct OmaResult {
  double total = std::numeric_limits<double>::infinity();
  bool feasible = false;
  std::vector<WaterfillResult> per_user;  // peak powers during the user's slot
};

/// Orthogonal time sharing: each user gets a 1/U slice of every block and
/// must burst at U times its rate. The reported total is the duty-cycled
/// average (at one block: sum_u sigma2 (2^(U b_u / rho) - 1) / (U g_uu^2));
/// peak_accounting instead charges the full burst power.
inline OmaResult oma_total_power(const Scenario& sc, bool peak_accounting = false) {
  OmaResult out;
  out.total = 0.0;
  out.feasible = true;
  for (int u = 0; u < sc.users; ++u) {
    std::vector<double> g2(sc.blocks), s2(sc.blocks);
    for (int n = 0; n < sc.blocks; ++n) {
      g2[n] = sc.power_gain(u, u, n);
      s2[n] = sc.sigma2(u, n);
    }
    auto wf = waterfill_min_power(g2, s2, sc.rate_factor, sc.users * sc.rate_min[u]);
    if (!wf.feasible) {
      out.feasible = false;
      out.total = std::numeric_limits<double>::infinity();
      return out;
    }
    out.total += sc.weight[u] * wf.total / (peak_accounting ? 1.0 : sc.users);
    out.per_user.push_back(std::move(wf));
  }
  return out;
}

/// Interference-free reference: every user waterfills its own channel as if
/// alone. A lower reference on any scheme, feasible only when cross gains
/// vanish.
inline double interference_free_total(const Scenario& sc) {
  double total = 0.0;
  for (int u = 0; u < sc.users; ++u) {
    std::vector<double> g2(sc.blocks), s2(sc.blocks);
    for (int n = 0; n < sc.blocks; ++n) {
      g2[n] = sc.power_gain(u, u, n);
      s2[n] = sc.sigma2(u, n);
    }
    auto wf = waterfill_min_power(g2, s2, sc.rate_factor, sc.rate_min[u]);
    if (!wf.feasible) return std::numeric_limits<double>::infinity();
    total += sc.weight[u] * wf.total;
  }
  return total;
}

struct TinResult {
  std::vector<std::vector<double>> power;  // [u][n], all of it on the private stream
  double total = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

/// Treat interference as noise, no cancellation anywhere: per block the
/// required powers satisfy p_u = (2^(b/rho) - 1)(sigma2 + sum_v G_uv p_v)/G_uu,
/// a monotone fixed point iterated from zero (so it converges to the least
/// solution whenever one exists; divergence means TIN cannot meet the rates).
/// Multi-block instances split each user's rate evenly across blocks.
inline TinResult tin_fixed_point(const Scenario& sc, int max_iter = 100000, double tol = 1e-13) {
  TinResult out;
  out.power.assign(sc.users, std::vector<double>(sc.blocks, 0.0));
  for (int n = 0; n < sc.blocks; ++n) {
    std::vector<double> p(sc.users, 0.0), factor(sc.users, 0.0);
    for (int u = 0; u < sc.users; ++u) {
      const double b = sc.rate_min[u] / sc.blocks;
      if (b <= 0.0) continue;
      if (sc.power_gain(u, u, n) == 0.0) return out;  // not converged
      factor[u] = (std::exp2(b / sc.rate_factor) - 1.0) / sc.power_gain(u, u, n);
    }
    bool done = false;
    int it = 0;
    for (; it < max_iter && !done; ++it) {
      done = true;
      for (int u = 0; u < sc.users; ++u) {
        double intf = sc.sigma2(u, n);
        for (int v = 0; v < sc.users; ++v)
          if (v != u) intf += sc.power_gain(u, v, n) * p[v];
        const double next = factor[u] * intf;
        if (std::abs(next - p[u]) > tol * (1.0 + std::abs(next))) done = false;
        p[u] = next;
        if (p[u] > 1e14) return out;  // diverging, requirements unreachable
      }
    }
    out.iterations += it;
    if (!done) return out;
    for (int u = 0; u < sc.users; ++u) out.power[u][n] = p[u];
  }
  out.converged = true;
  out.total = 0.0;
  for (int u = 0; u < sc.users; ++u)
    for (int n = 0; n < sc.blocks; ++n) out.total += sc.weight[u] * out.power[u][n];
  return out;
}

/// TIN as a decoding profile plus allocation (power on private streams only),
/// mostly so its claim can go through the same verifier as everything else.
inline std::pair<DecodingProfile, AllocationPoint> tin_allocation(const Scenario& sc,
                                                                  const TinResult& tin) {
  DecodingProfile prof;
  prof.order.resize(sc.users);
  for (int r = 0; r < sc.users; ++r)
    for (int j = 0; j < sc.users; ++j) prof.order[r].push_back({r, j});
  AllocationPoint pt = AllocationPoint::zeros(sc);
  for (int u = 0; u < sc.users; ++u)
    for (int n = 0; n < sc.blocks; ++n) pt.power[u][u][n] = tin.power[u][n];
  pt.rate = supportable_stream_rates(sc, prof, pt);
  return {prof, pt};
}

struct GridSpec {
  int points_per_axis = 25;
  double power_cap = 0.0;  // 0: derive from the orthogonal bound
  double feas_tol = 1e-9;

  /// Multiplicative spacing of the positive grid for a given cap.
  double ratio(double cap) const {
    const double lo = cap * 1e-3;
    return std::pow(cap / lo, 1.0 / (points_per_axis - 2));
  }
};

struct OracleResult {
  double total = std::numeric_limits<double>::infinity();
  DecodingProfile profile;
  AllocationPoint point;
  long evaluations = 0;
  double power_cap = 0.0;
};

namespace oracle_detail {

inline void assign_group_powers(const DecodingProfile& prof, const AggregationMap& agg,
                                const std::vector<double>& vals, AllocationPoint& pt) {
  for (size_t g = 0; g < agg.groups.size(); ++g) {
    const auto& grp = agg.groups[g];
    if (grp.shared_value) {
      for (const auto& m : grp.members) pt.power[m.tx][m.companion][0] = vals[g];
    } else if (grp.members.size() == 1) {
      pt.power[grp.members[0].tx][grp.members[0].companion][0] = vals[g];
    } else {
      const int home = grp.members.front().tx;
      auto last = grp.members.front();
      for (const auto& m : grp.members)
        if (prof.position(home, m) > prof.position(home, last)) last = m;
      for (const auto& m : grp.members) pt.power[m.tx][m.companion][0] = 0.0;
      pt.power[last.tx][last.companion][0] = vals[g];
    }
  }
}

}  // namespace oracle_detail

/// Exhaustive log-grid search over the same profile family and power
/// aggregations the solver uses (including the ungrouped retry when an
/// equal-power merge fired). Small instances only; the point is an
/// independent ceiling for the solver's answer, within grid resolution.
inline OracleResult brute_force_oracle(const Scenario& sc, const GridSpec& spec = {}) {
  sc.validate();
  if (sc.users > 2 || sc.blocks != 1)
    throw capacity_error("oracle: supported up to 2 users and a single block");
  if (spec.points_per_axis < 3) throw argument_error("oracle: need at least 3 grid points");

  double cap = spec.power_cap;
  if (cap <= 0.0) {
    for (int u = 0; u < sc.users; ++u) {
      if (sc.power_gain(u, u, 0) > 0.0) {
        const double peak = sc.sigma2(u, 0) *
                            (std::exp2(sc.users * sc.rate_min[u] / sc.rate_factor) - 1.0) /
                            sc.power_gain(u, u, 0);
        cap = std::max(cap, 10.0 * peak);
      }
    }
    if (cap <= 0.0) cap = 10.0;
  }

  std::vector<double> axis{0.0};
  {
    const double lo = cap * 1e-3, r = spec.ratio(cap);
    double v = lo;
    for (int i = 0; i < spec.points_per_axis - 1; ++i, v *= r) axis.push_back(v);
  }

  OracleResult best;
  best.power_cap = cap;
  std::set<std::string> seen;
  enumerate_profiles(sc, true, [&](const DecodingProfile& prof) {
    if (!seen.insert(profile_signature(sc, prof)).second) return;
    std::vector<AggregationMap> maps{collapse_dof(sc, prof)};
    if (maps.front().has_shared()) maps.push_back(AggregationMap::identity(sc));
    for (const auto& agg : maps) {
      const int D = (int)agg.groups.size();
      std::vector<int> idx(D, 0);
      std::vector<double> vals(D, 0.0);
      AllocationPoint pt = AllocationPoint::zeros(sc);
      while (true) {
        for (int d = 0; d < D; ++d) vals[d] = axis[idx[d]];
        oracle_detail::assign_group_powers(prof, agg, vals, pt);
        ++best.evaluations;
        double weighted = 0.0;
        for (int i = 0; i < sc.users; ++i)
          for (int j = 0; j < sc.users; ++j) weighted += sc.weight[i] * pt.power[i][j][0];
        if (weighted < best.total) {
          auto rates = achieved_user_rates(sc, prof, pt);
          bool ok = true;
          for (int u = 0; u < sc.users; ++u)
            ok = ok && rates[u] >= sc.rate_min[u] - spec.feas_tol;
          if (ok) {
            best.total = weighted;
            best.profile = prof;
            best.point = pt;
            best.point.rate = supportable_stream_rates(sc, prof, pt);
          }
        }
        int d = 0;
        for (; d < D; ++d) {
          if (++idx[d] < (int)axis.size()) break;
          idx[d] = 0;
        }
        if (d == D) break;
      }
    }
  });
  return best;
}

/// Worst-case gap between the oracle's grid total and the true optimum of the
/// searched family: shrinking every coordinate one grid notch stays within a
/// factor 1/r^2 of any point bracketed by the grid, plus the floor below the
/// smallest positive value on each axis.
inline double oracle_grid_slack(const Scenario& sc, const OracleResult& res,
                                const GridSpec& spec = {}) {
  const double r = spec.ratio(res.power_cap);
  const double lo = res.power_cap * 1e-3;
  return res.total * (1.0 - 1.0 / (r * r)) + sc.users * sc.users * lo + 1e-6;
}

}  // namespace minpic

#endif
