#ifndef MINPIC_ORDER_SEARCH_HPP
#define MINPIC_ORDER_SEARCH_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "minpic/types.hpp"

namespace minpic {

using DualVector = std::vector<double>;  // one entry per user

/// One power variable covering one or more sub-streams.
/// pooled (shared_value == false): the variable is the group's total power,
/// split back onto members on recovery. shared: every member transmits the
/// variable's value, so a receiver hearing several members sums their gains.
struct AggregationGroup {
  std::vector<SubStreamId> members;
  bool shared_value = false;
};

struct AggregationMap {
  std::vector<AggregationGroup> groups;

  int group_of(const SubStreamId& s) const {
    for (size_t g = 0; g < groups.size(); ++g)
      for (const auto& m : groups[g].members)
        if (m == s) return (int)g;
    return -1;
  }

  bool has_shared() const {
    for (const auto& g : groups)
      if (g.shared_value) return true;
    return false;
  }

  static AggregationMap identity(const Scenario& sc) {
    AggregationMap map;
    for (int i = 0; i < sc.users; ++i)
      for (int j = 0; j < sc.users; ++j)
        map.groups.push_back({{SubStreamId{i, j}}, false});
    return map;
  }

  /// Every sub-stream in exactly one group, members sorted, no empty groups.
  void validate(const Scenario& sc) const {
    std::vector<std::vector<int>> hits(sc.users, std::vector<int>(sc.users, 0));
    for (const auto& g : groups) {
      if (g.members.empty()) throw argument_error("aggregation: empty group");
      for (const auto& m : g.members) {
        if (m.tx < 0 || m.tx >= sc.users || m.companion < 0 || m.companion >= sc.users)
          throw argument_error("aggregation: stream out of range");
        ++hits[m.tx][m.companion];
      }
    }
    for (int i = 0; i < sc.users; ++i)
      for (int j = 0; j < sc.users; ++j)
        if (hits[i][j] != 1)
          throw argument_error("aggregation: stream (" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ") covered " +
                               std::to_string(hits[i][j]) + " times");
  }
};

/// Decoding profile implied by per-user duals: at every receiver, user blocks
/// in ascending dual order (the cheapest user is decoded first and eats the
/// most interference, the most expensive one last against the cleanest floor),
/// every cross stream decoded. Within a receiver's own block the cross
/// sub-streams come before the private one; ties in the duals break toward
/// the lower user index. Invariant under rescaling all duals by a positive
/// constant.
inline DecodingProfile dual_rank_profile(const Scenario& sc, const DualVector& duals) {
  if ((int)duals.size() != sc.users)
    throw argument_error("dual_rank_profile: need one dual per user");
  std::vector<int> by_dual(sc.users);
  std::iota(by_dual.begin(), by_dual.end(), 0);
  std::stable_sort(by_dual.begin(), by_dual.end(),
                   [&](int a, int b) { return duals[a] < duals[b]; });
  DecodingProfile prof;
  prof.order.resize(sc.users);
  for (int r = 0; r < sc.users; ++r)
    for (int u : by_dual) {
      if (u == r) {
        for (int j = 0; j < sc.users; ++j)
          if (j != r) prof.order[r].push_back({r, j});
        prof.order[r].push_back({r, r});
      } else {
        prof.order[r].push_back({u, r});
      }
    }
  return prof;
}

/// Visit every decoding profile: per receiver, every permutation of its own
/// streams together with a subset of its cross streams (all subsets when
/// include_cross_subsets, only the full set otherwise), then the cartesian
/// product across receivers. Deterministic order: subsets by ascending
/// bitmask, permutations lexicographic, receiver 1 outermost.
inline void enumerate_profiles(const Scenario& sc, bool include_cross_subsets,
                               const std::function<void(const DecodingProfile&)>& visit) {
  const int U = sc.users;
  std::vector<std::vector<std::vector<SubStreamId>>> per_receiver(U);
  for (int r = 0; r < U; ++r) {
    std::vector<SubStreamId> cross;
    for (int i = 0; i < U; ++i)
      if (i != r) cross.push_back({i, r});
    const int masks = include_cross_subsets ? (1 << (int)cross.size()) : 1;
    for (int m = 0; m < masks; ++m) {
      std::vector<SubStreamId> items;
      for (int j = 0; j < U; ++j) items.push_back({r, j});
      if (include_cross_subsets) {
        for (size_t c = 0; c < cross.size(); ++c)
          if (m & (1 << c)) items.push_back(cross[c]);
      } else {
        items.insert(items.end(), cross.begin(), cross.end());
      }
      std::sort(items.begin(), items.end());
      do {
        per_receiver[r].push_back(items);
      } while (std::next_permutation(items.begin(), items.end()));
    }
  }
  DecodingProfile prof;
  prof.order.resize(U);
  std::function<void(int)> rec = [&](int r) {
    if (r == U) {
      visit(prof);
      return;
    }
    for (const auto& ord : per_receiver[r]) {
      prof.order[r] = ord;
      rec(r + 1);
    }
  };
  rec(0);
}

inline std::vector<DecodingProfile> enumerate_profiles(const Scenario& sc,
                                                       bool include_cross_subsets) {
  std::vector<DecodingProfile> out;
  enumerate_profiles(sc, include_cross_subsets,
                     [&](const DecodingProfile& p) { out.push_back(p); });
  return out;
}

/// Block-structured profile family: per receiver, each decoded foreign user
/// is a single-stream block, the receiver's own streams form one contiguous
/// block, and blocks appear in every order; cross-decode subsets included.
/// Within the own block every stream has the same gain, so any split of the
/// block's rate over its streams is reachable by re-splitting power; the
/// internal order is immaterial and kept canonical (companion ascending).
/// This is the family the ordering analysis ranks by duals, and it keeps the
/// three-user search at 11^3 = 1331 profiles instead of millions.
inline void enumerate_block_profiles(const Scenario& sc,
                                     const std::function<void(const DecodingProfile&)>& visit) {
  const int U = sc.users;
  std::vector<std::pair<int, int>> cross;  // (tx, rx) bits
  for (int i = 0; i < U; ++i)
    for (int r = 0; r < U; ++r)
      if (i != r) cross.push_back({i, r});
  const long masks = 1L << cross.size();
  for (long m = 0; m < masks; ++m) {
    std::vector<std::vector<std::vector<SubStreamId>>> per_receiver(U);
    for (int r = 0; r < U; ++r) {
      std::vector<int> present{r};
      for (size_t c = 0; c < cross.size(); ++c)
        if ((m & (1L << c)) && cross[c].second == r) present.push_back(cross[c].first);
      std::sort(present.begin(), present.end());
      do {
        std::vector<SubStreamId> ord;
        for (int u : present) {
          if (u == r) {
            for (int j = 0; j < U; ++j) ord.push_back({r, j});
          } else {
            ord.push_back({u, r});
          }
        }
        per_receiver[r].push_back(std::move(ord));
      } while (std::next_permutation(present.begin(), present.end()));
    }
    DecodingProfile prof;
    prof.order.resize(U);
    std::function<void(int)> rec = [&](int r) {
      if (r == U) {
        visit(prof);
        return;
      }
      for (const auto& ord : per_receiver[r]) {
        prof.order[r] = ord;
        rec(r + 1);
      }
    };
    rec(0);
  }
}

/// Program-isomorphism key. Own streams decoded nowhere else are fungible
/// (same gain everywhere they appear, same constraints up to relabeling), so
/// they all map to one token; every other stream keeps its identity.
inline std::string profile_signature(const Scenario& sc, const DecodingProfile& prof) {
  std::string sig;
  for (int r = 0; r < sc.users; ++r) {
    sig += "|";
    for (const auto& s : prof.order[r]) {
      const bool fungible = s.tx == r && (s.is_private() || !prof.decodes(s.companion, s));
      sig += fungible ? std::string("o") : to_string(s);
      sig += ";";
    }
  }
  return sig;
}

/// Merge power variables that cannot change the reachable rate region.
/// Rule A (pooled): a maximal run of receiver u's own streams, none decoded
/// elsewhere, consecutive in u's order. Same gain and one decoder means only
/// the run's total power matters. Rule B (shared): a cross pair (i,j),(j,i)
/// with both members cross-decoded and adjacent in both chains; merged with
/// equal-power semantics. B can cost power on asymmetric channels, so callers
/// that must not lose optimality re-solve ungrouped when a B merge fired
/// (see has_shared()). Every remaining stream becomes its own group.
inline AggregationMap collapse_dof(const Scenario& sc, const DecodingProfile& prof) {
  prof.validate(sc);
  const int U = sc.users;
  std::vector<std::vector<char>> taken(U, std::vector<char>(U, 0));
  AggregationMap map;

  for (int u = 0; u < U; ++u) {
    std::vector<SubStreamId> run;
    auto flush = [&]() {
      if (run.size() >= 2) {
        for (const auto& s : run) taken[s.tx][s.companion] = 1;
        map.groups.push_back({run, false});
      }
      run.clear();
    };
    for (const auto& s : prof.order[u]) {
      const bool sole_home = s.tx == u && (s.is_private() || !prof.decodes(s.companion, s));
      if (sole_home)
        run.push_back(s);
      else
        flush();
    }
    flush();
  }

  for (int i = 0; i < U; ++i)
    for (int j = i + 1; j < U; ++j) {
      const SubStreamId a{i, j}, b{j, i};
      if (!prof.decodes(j, a) || !prof.decodes(i, b)) continue;
      const bool adj_i = std::abs(prof.position(i, a) - prof.position(i, b)) == 1;
      const bool adj_j = std::abs(prof.position(j, a) - prof.position(j, b)) == 1;
      if (adj_i && adj_j) {
        taken[i][j] = taken[j][i] = 1;
        map.groups.push_back({{a, b}, true});
      }
    }

  for (int i = 0; i < U; ++i)
    for (int j = 0; j < U; ++j)
      if (!taken[i][j]) map.groups.push_back({{SubStreamId{i, j}}, false});

  std::sort(map.groups.begin(), map.groups.end(),
            [](const AggregationGroup& a, const AggregationGroup& b) {
              return a.members.front() < b.members.front();
            });
  map.validate(sc);
  return map;
}

}  // namespace minpic

#endif
