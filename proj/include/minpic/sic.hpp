#ifndef MINPIC_SIC_HPP
#define MINPIC_SIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "minpic/types.hpp"

namespace minpic {

/// Interference power at receiver r on block n from streams it never decodes.
inline double undecoded_interference(const Scenario& sc, const DecodingProfile& prof,
                                     const AllocationPoint& pt, int r, int n) {
  double acc = 0.0;
  for (int i = 0; i < sc.users; ++i)
    for (int j = 0; j < sc.users; ++j)
      if (!prof.decodes(r, {i, j})) acc += sc.power_gain(r, i, n) * pt.power[i][j][n];
  return acc;
}

/// Successive-cancellation chain at receiver r on block n. Position 0 is
/// decoded first against the full remaining stack; the floor under the last
/// position is noise plus never-decoded interference. Increments telescope:
/// their sum equals rate_factor * log2((floor + total stacked power)/floor).
inline RateChain sic_rate_chain(const Scenario& sc, const DecodingProfile& prof,
                                const AllocationPoint& pt, int r, int n) {
  RateChain chain;
  chain.streams = prof.order[r];
  chain.floor_power = sc.sigma2(r, n) + undecoded_interference(sc, prof, pt, r, n);
  const size_t K = chain.streams.size();
  std::vector<double> suffix(K + 1, 0.0);
  for (size_t k = K; k-- > 0;) {
    const auto& s = chain.streams[k];
    suffix[k] = suffix[k + 1] + sc.power_gain(r, s.tx, n) * pt.power[s.tx][s.companion][n];
  }
  chain.increment.resize(K);
  for (size_t k = 0; k < K; ++k)
    chain.increment[k] = sc.rate_factor * (std::log2(chain.floor_power + suffix[k]) -
                                           std::log2(chain.floor_power + suffix[k + 1]));
  return chain;
}

inline std::vector<std::vector<RateChain>> all_chains(const Scenario& sc,
                                                      const DecodingProfile& prof,
                                                      const AllocationPoint& pt) {
  std::vector<std::vector<RateChain>> chains(sc.users);
  for (int r = 0; r < sc.users; ++r) {
    chains[r].reserve(sc.blocks);
    for (int n = 0; n < sc.blocks; ++n) chains[r].push_back(sic_rate_chain(sc, prof, pt, r, n));
  }
  return chains;
}

/// Largest per-stream rates the powers support: the home increment for a
/// stream decoded only at its transmitter's receiver, and the minimum of the
/// two chain increments when the companion decodes it too (the stream carries
/// one codeword, both receivers must get through).
inline std::vector<std::vector<std::vector<double>>> supportable_stream_rates(
    const Scenario& sc, const DecodingProfile& prof, const AllocationPoint& pt) {
  auto chains = all_chains(sc, prof, pt);
  auto rate = AllocationPoint::zeros(sc).rate;
  for (int i = 0; i < sc.users; ++i)
    for (int j = 0; j < sc.users; ++j) {
      const SubStreamId s{i, j};
      const int ph = prof.position(i, s);
      if (ph < 0) continue;  // validate() rules this out for own streams
      const int pa = (i == j) ? -1 : prof.position(j, s);
      for (int n = 0; n < sc.blocks; ++n) {
        double v = chains[i][n].increment[ph];
        if (pa >= 0) v = std::min(v, chains[j][n].increment[pa]);
        rate[i][j][n] = v;
      }
    }
  return rate;
}

/// Total rate each user can deliver with pt.power under prof, summed over the
/// user's sub-streams and blocks.
inline std::vector<double> achieved_user_rates(const Scenario& sc, const DecodingProfile& prof,
                                               const AllocationPoint& pt) {
  auto rate = supportable_stream_rates(sc, prof, pt);
  std::vector<double> totals(sc.users, 0.0);
  for (int i = 0; i < sc.users; ++i)
    for (int j = 0; j < sc.users; ++j)
      for (int n = 0; n < sc.blocks; ++n) totals[i] += rate[i][j][n];
  return totals;
}

inline double total_weighted_power(const Scenario& sc, const AllocationPoint& pt) {
  double acc = 0.0;
  for (int i = 0; i < sc.users; ++i)
    for (int j = 0; j < sc.users; ++j)
      for (int n = 0; n < sc.blocks; ++n) acc += sc.weight[i] * pt.power[i][j][n];
  return acc;
}

struct FeasibilityReport {
  bool feasible = false;
  std::vector<double> user_margin;  // achieved minus required, per user
  double worst_chain_slack = 0.0;   // min over all suffix checks, >= -tol when ok
  std::string detail;               // first violation, empty when feasible
};

/// Check that the claimed rates in pt.rate are decodable with pt.power under
/// prof and that the powers meet every user's requirement. Decodability is
/// the suffix test on every chain: at each position k the rates claimed by
/// positions k.. must fit under the capacity from the floor up through
/// position k's layer. Requirements are judged on the rates the powers
/// support, not on the claimed split: a receiver cannot move rate between
/// positions, so the chain rates cap every user simultaneously.
inline FeasibilityReport verify_feasible(const Scenario& sc, const DecodingProfile& prof,
                                         const AllocationPoint& pt, double tol = 1e-6) {
  prof.validate(sc);
  FeasibilityReport rep;
  rep.worst_chain_slack = std::numeric_limits<double>::infinity();
  auto chains = all_chains(sc, prof, pt);
  for (int r = 0; r < sc.users; ++r)
    for (int n = 0; n < sc.blocks; ++n) {
      const auto& chain = chains[r][n];
      const size_t K = chain.streams.size();
      double cap_suffix = 0.0, rate_suffix = 0.0;
      for (size_t k = K; k-- > 0;) {
        const auto& s = chain.streams[k];
        cap_suffix += chain.increment[k];
        rate_suffix += pt.rate[s.tx][s.companion][n];
        const double slack = cap_suffix - rate_suffix;
        if (slack < rep.worst_chain_slack) rep.worst_chain_slack = slack;
        if (slack < -tol && rep.detail.empty())
          rep.detail = "receiver " + std::to_string(r + 1) + " block " + std::to_string(n + 1) +
                       " cannot decode from position " + std::to_string(k + 1) +
                       " (short by " + std::to_string(-slack) + " bits)";
      }
    }
  const auto supported = achieved_user_rates(sc, prof, pt);
  rep.user_margin.assign(sc.users, 0.0);
  for (int i = 0; i < sc.users; ++i) {
    rep.user_margin[i] = supported[i] - sc.rate_min[i];
    if (rep.user_margin[i] < -tol && rep.detail.empty())
      rep.detail = "user " + std::to_string(i + 1) + " rate short by " +
                   std::to_string(-rep.user_margin[i]) + " bits";
  }
  bool ok = rep.worst_chain_slack >= -tol;
  for (double m : rep.user_margin) ok = ok && m >= -tol;
  rep.feasible = ok;
  return rep;
}

}  // namespace minpic

#endif
