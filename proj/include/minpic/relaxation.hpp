#ifndef MINPIC_RELAXATION_HPP
#define MINPIC_RELAXATION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "minpic/order_search.hpp"
#include "minpic/program.hpp"
#include "minpic/sic.hpp"
#include "minpic/types.hpp"

namespace minpic {

struct RelaxLayout {
  std::vector<std::vector<int>> power_var;              // [group][n], -1 when pinned
  std::vector<std::vector<std::vector<int>>> rate_var;  // [i][j][n], -1 when pinned;
                                                        // members of a pooled run share one
  std::vector<std::vector<int>> aux_var;                // [r][n], -1 when receiver r hears
                                                        // no undecoded power on block n
  std::vector<int> rate_row;                            // [u] constraint index of the user's
                                                        // rate requirement, -1 when rate_min=0
};

struct Relaxation {
  ConvexProgram prog;
  RelaxLayout layout;
  double lambda = 0.0;

  /// Only the objective depends on lambda; the feasible set does not.
  void set_lambda(double l) {
    lambda = l;
    for (const auto& row : layout.aux_var)
      for (int v : row)
        if (v >= 0) prog.objective[v] = -l;
  }
};

namespace relax_detail {

// One decode step of a receiver chain after pooled runs are collapsed: the
// rates that must fit at this position and the power stacked on top of it.
struct Slot {
  std::vector<int> rate_vars;
  int power_var = -1;
  double gain = 0.0;
};

// Variables, undecoded-interference forms, and per-receiver slot chains that
// every program over (scenario, profile, aggregation) shares. Constraints
// differ per program kind and are added by the callers.
struct Skeleton {
  ConvexProgram prog;
  RelaxLayout lay;
  std::vector<std::vector<AffineForm>> unc;           // [r][n]
  std::vector<std::vector<std::vector<Slot>>> slots;  // [r][n][position]
};

inline Skeleton make_skeleton(const Scenario& sc, const DecodingProfile& prof,
                              const AggregationMap& agg) {
  prof.validate(sc);
  agg.validate(sc);
  const int U = sc.users, N = sc.blocks;
  Skeleton sk;
  auto& prog = sk.prog;
  auto& lay = sk.lay;
  const int G = (int)agg.groups.size();

  // Pin decisions first. A stream's rate is dead on a block when any receiver
  // that must decode it has zero power gain there; a power is dead when every
  // rate it could carry is dead (power with no rate is pure interference).
  std::vector<std::vector<std::vector<char>>> rate_dead(
      U, std::vector<std::vector<char>>(U, std::vector<char>(N, 0)));
  for (int i = 0; i < U; ++i)
    for (int j = 0; j < U; ++j) {
      const SubStreamId s{i, j};
      for (int n = 0; n < N; ++n) {
        bool dead = sc.power_gain(i, i, n) == 0.0;
        if (!s.is_private() && prof.decodes(j, s) && sc.power_gain(j, i, n) == 0.0) dead = true;
        rate_dead[i][j][n] = dead ? 1 : 0;
      }
    }

  auto group_name = [&](int g) {
    std::string nm;
    for (const auto& m : agg.groups[g].members) nm += to_string(m);
    return nm;
  };

  lay.power_var.assign(G, std::vector<int>(N, -1));
  for (int g = 0; g < G; ++g)
    for (int n = 0; n < N; ++n) {
      bool dead = true;
      for (const auto& m : agg.groups[g].members) dead = dead && rate_dead[m.tx][m.companion][n];
      const int v = prog.add_var("P[" + group_name(g) + "][n" + std::to_string(n + 1) + "]", dead);
      if (!dead) {
        lay.power_var[g][n] = v;
        double w = 0.0;
        if (agg.groups[g].shared_value)
          for (const auto& m : agg.groups[g].members) w += sc.weight[m.tx];
        else
          w = sc.weight[agg.groups[g].members.front().tx];
        prog.objective[v] = w;
      }
    }

  lay.rate_var.assign(U, std::vector<std::vector<int>>(U, std::vector<int>(N, -1)));
  for (int g = 0; g < G; ++g) {
    const auto& grp = agg.groups[g];
    const bool pooled_run = !grp.shared_value && grp.members.size() > 1;
    for (int n = 0; n < N; ++n) {
      if (pooled_run) {
        // one decoder, same gain: only the run's total rate is constrained
        const auto& m0 = grp.members.front();
        const bool dead = rate_dead[m0.tx][m0.companion][n];
        const int v =
            prog.add_var("b[" + group_name(g) + "][n" + std::to_string(n + 1) + "]", dead);
        for (const auto& m : grp.members) lay.rate_var[m.tx][m.companion][n] = dead ? -1 : v;
      } else {
        for (const auto& m : grp.members) {
          const bool dead = rate_dead[m.tx][m.companion][n];
          const int v =
              prog.add_var("b[" + to_string(m) + "][n" + std::to_string(n + 1) + "]", dead);
          if (!dead) lay.rate_var[m.tx][m.companion][n] = v;
        }
      }
    }
  }

  // Undecoded interference seen by each receiver-block, over unpinned powers.
  // A pooled group is either fully decoded at r (its home) or fully undecoded,
  // and its variable is the total, so its gain enters once; a shared group
  // contributes each transmitting member separately.
  sk.unc.assign(U, std::vector<AffineForm>(N));
  for (int r = 0; r < U; ++r)
    for (int n = 0; n < N; ++n)
      for (int g = 0; g < G; ++g) {
        const int pv = lay.power_var[g][n];
        if (pv < 0) continue;
        const auto& grp = agg.groups[g];
        if (grp.shared_value) {
          for (const auto& m : grp.members) {
            const double gg = sc.power_gain(r, m.tx, n);
            if (gg > 0.0 && !prof.decodes(r, m)) sk.unc[r][n].add(pv, gg);
          }
        } else if (!prof.decodes(r, grp.members.front())) {
          const double gg = sc.power_gain(r, grp.members.front().tx, n);
          if (gg > 0.0) sk.unc[r][n].add(pv, gg);
        }
      }

  // Decode chains as slots. Consecutive positions of one pooled run collapse
  // to a single slot; the run's interior boundaries constrain nothing the
  // outer ones do not already.
  sk.slots.assign(U, std::vector<std::vector<Slot>>(N));
  for (int r = 0; r < U; ++r)
    for (int n = 0; n < N; ++n) {
      int prev_group = -1;
      for (const auto& s : prof.order[r]) {
        const int g = agg.group_of(s);
        const bool pooled = !agg.groups[g].shared_value && agg.groups[g].members.size() > 1;
        if (pooled && g == prev_group) continue;  // same run, same slot
        prev_group = pooled ? g : -1;
        Slot slot;
        slot.power_var = lay.power_var[g][n];
        slot.gain = sc.power_gain(r, s.tx, n);
        const int rv = lay.rate_var[s.tx][s.companion][n];
        if (rv >= 0) slot.rate_vars.push_back(rv);
        sk.slots[r][n].push_back(std::move(slot));
      }
    }

  lay.aux_var.assign(U, std::vector<int>(N, -1));
  lay.rate_row.assign(U, -1);
  return sk;
}

// Per-user rate requirement rows over whatever carrier variables are live.
inline void add_rate_rows(const Scenario& sc, ConvexProgram& prog, RelaxLayout& lay) {
  const int U = sc.users, N = sc.blocks;
  for (int u = 0; u < U; ++u) {
    if (sc.rate_min[u] <= 0.0) continue;
    Constraint c;
    c.kind = ConstraintKind::linear;
    c.lhs.constant = sc.rate_min[u];
    std::vector<int> seen;
    for (int j = 0; j < U; ++j)
      for (int n = 0; n < N; ++n) {
        const int rv = lay.rate_var[u][j][n];
        if (rv >= 0 && std::find(seen.begin(), seen.end(), rv) == seen.end()) {
          seen.push_back(rv);
          c.lhs.add(rv, -1.0);
        }
      }
    c.tag = "rate[u" + std::to_string(u + 1) + "]";
    if (c.lhs.terms.empty()) {
      prog.infeasible_marker = true;
      prog.infeasible_reason = "user " + std::to_string(u + 1) +
                               " requires rate but every carrier stream is dead";
      continue;
    }
    lay.rate_row[u] = (int)prog.cons.size();
    prog.cons.push_back(std::move(c));
  }
}

// Full-layout vector with the power variables set to the point's levels: a
// shared group takes the largest member (members are forced equal anyway), a
// pooled run its total, a singleton its own entry. Rates and aux stay zero.
inline std::vector<double> power_values(const Scenario& sc, const AggregationMap& agg,
                                        const RelaxLayout& lay, size_t nvars,
                                        const AllocationPoint& pt) {
  std::vector<double> x(nvars, 0.0);
  for (size_t g = 0; g < agg.groups.size(); ++g) {
    const auto& grp = agg.groups[g];
    for (int n = 0; n < sc.blocks; ++n) {
      const int pv = lay.power_var[g][n];
      if (pv < 0) continue;
      double v = 0.0;
      for (const auto& m : grp.members) {
        const double p = pt.power[m.tx][m.companion][n];
        v = grp.shared_value ? std::max(v, p) : v + p;
      }
      x[pv] = v;
    }
  }
  return x;
}

}  // namespace relax_detail

/// Convex relaxation of the minimum-power problem for one decoding profile
/// and one power aggregation. Variables: group powers, stream rates, and per
/// receiver-block an auxiliary credit c bounded by what the undecoded floor
/// could carry. Per receiver chain, every suffix of decoded rates plus c must
/// fit under the capacity of the stacked suffix powers over the noise alone;
/// when c sits at its bound these reduce to the exact decodability tests.
/// The objective prices powers by user weight and rewards c at rate lambda,
/// so raising lambda pushes solutions toward exactness.
inline Relaxation build_relaxation(const Scenario& sc, const DecodingProfile& prof,
                                   const AggregationMap& agg, double lambda) {
  const int U = sc.users, N = sc.blocks;
  relax_detail::Skeleton sk = relax_detail::make_skeleton(sc, prof, agg);
  Relaxation rel;
  rel.prog = std::move(sk.prog);
  rel.layout = std::move(sk.lay);
  auto& prog = rel.prog;
  auto& lay = rel.layout;

  for (int r = 0; r < U; ++r)
    for (int n = 0; n < N; ++n) {
      const bool dead = sk.unc[r][n].terms.empty();
      const int v = prog.add_var(
          "c[r" + std::to_string(r + 1) + "][n" + std::to_string(n + 1) + "]", dead);
      if (!dead) lay.aux_var[r][n] = v;
    }

  // Suffix capacity constraints, stacked from the last-decoded position up.
  std::vector<size_t> credit_rows;
  for (int r = 0; r < U; ++r)
    for (int n = 0; n < N; ++n) {
      const auto& slots = sk.slots[r][n];
      AffineForm lhs, arg = sk.unc[r][n];
      if (lay.aux_var[r][n] >= 0) lhs.add(lay.aux_var[r][n], 1.0);
      for (size_t k = slots.size(); k-- > 0;) {
        for (int rv : slots[k].rate_vars) lhs.add(rv, 1.0);
        if (slots[k].power_var >= 0) arg.add(slots[k].power_var, slots[k].gain);
        if (lhs.terms.empty()) continue;
        Constraint c;
        c.kind = ConstraintKind::log_affine;
        c.lhs = lhs;
        c.arg = arg;
        c.gamma = sc.sigma2(r, n);
        c.scale = sc.rate_factor;
        c.tag = "suffix[r" + std::to_string(r + 1) + ",n" + std::to_string(n + 1) + ",k" +
                std::to_string(k + 1) + "]";
        prog.cons.push_back(std::move(c));
      }
      if (lay.aux_var[r][n] >= 0) {
        Constraint c;
        c.kind = ConstraintKind::log_affine;
        c.lhs.add(lay.aux_var[r][n], 1.0);
        c.arg = sk.unc[r][n];
        c.gamma = sc.sigma2(r, n);
        c.scale = sc.rate_factor;
        c.tag = "credit[r" + std::to_string(r + 1) + ",n" + std::to_string(n + 1) + "]";
        credit_rows.push_back(prog.cons.size());
        prog.cons.push_back(std::move(c));
      }
    }

  relax_detail::add_rate_rows(sc, prog, lay);

  // Strictly interior start. Each user's first live carrier takes its rate
  // demand plus a unit, other rates and every credit sit just inside their
  // bounds, and a common power level grows until all suffix rows clear their
  // left side by half a bit. Credit caps can be arbitrarily thin (weak cross
  // gains), so those rows only need positive slack, which the construction
  // gives them. No level working means no usable interior; leave the hint
  // empty and let the solver's own feasibility phase have the final word.
  {
    std::vector<char> is_credit(prog.cons.size(), 0);
    for (size_t k : credit_rows) is_credit[k] = 1;
    std::vector<int> first_carrier(U, -1);
    for (int u = 0; u < U; ++u) {
      for (int n = 0; n < N && first_carrier[u] < 0; ++n)
        if (lay.rate_var[u][u][n] >= 0) first_carrier[u] = lay.rate_var[u][u][n];
      for (int j = 0; j < U && first_carrier[u] < 0; ++j)
        for (int n = 0; n < N && first_carrier[u] < 0; ++n)
          if (lay.rate_var[u][j][n] >= 0) first_carrier[u] = lay.rate_var[u][j][n];
    }
    std::vector<double> x(prog.vars.size(), 0.0);
    for (double level = 10.0; level <= 1e20; level *= 100.0) {
      for (size_t g = 0; g < lay.power_var.size(); ++g)
        for (int n = 0; n < N; ++n)
          if (lay.power_var[g][n] >= 0) x[lay.power_var[g][n]] = level;
      for (int u = 0; u < U; ++u)
        for (int j = 0; j < U; ++j)
          for (int n = 0; n < N; ++n) {
            const int v = lay.rate_var[u][j][n];
            if (v >= 0) x[v] = v == first_carrier[u] ? sc.rate_min[u] + 1.0 : 0.01;
          }
      for (int r = 0; r < U; ++r)
        for (int n = 0; n < N; ++n)
          if (lay.aux_var[r][n] >= 0) {
            double unc_val = 0.0;
            for (const auto& t : sk.unc[r][n].terms) unc_val += t.second * x[t.first];
            const double cap =
                sc.rate_factor * std::log2(1.0 + unc_val / sc.sigma2(r, n));
            x[lay.aux_var[r][n]] = std::min(0.01, 0.5 * cap);
          }
      bool ok = true;
      for (size_t k = 0; k < prog.cons.size() && ok; ++k) {
        const auto& con = prog.cons[k];
        double lhs = con.lhs.constant;
        for (const auto& t : con.lhs.terms) lhs += t.second * x[t.first];
        if (con.kind == ConstraintKind::linear) {
          ok = -lhs >= 0.5;
        } else {
          double arg_val = con.gamma;
          for (const auto& t : con.arg.terms) arg_val += t.second * x[t.first];
          const double slack =
              con.scale * (std::log2(arg_val) - std::log2(con.gamma)) - lhs;
          ok = is_credit[k] ? slack > 0.0 : slack >= 0.5;
        }
      }
      if (ok) {
        prog.interior_hint = x;
        break;
      }
    }
  }

  rel.set_lambda(lambda);
  prog.structural_check();
  return rel;
}

/// Conservative per-position variant, linearized around a power point. No
/// credit variables: every decode position gets its own row saying the
/// position's rate plus a tangent overestimate of the capacity the later
/// layers consume must fit under the capacity of the whole tail. The tangent
/// sits above its log everywhere, so each rate is capped by at most its true
/// incremental capacity and any feasible point decodes exactly, position by
/// position. The rows are only tight near the expansion point; an outer loop
/// recovers the lost ground by rebuilding around its own answer.
inline Relaxation build_refit_program(const Scenario& sc, const DecodingProfile& prof,
                                      const AggregationMap& agg, const AllocationPoint& around) {
  const int U = sc.users, N = sc.blocks;
  relax_detail::Skeleton sk = relax_detail::make_skeleton(sc, prof, agg);
  Relaxation rel;
  rel.prog = std::move(sk.prog);
  rel.layout = std::move(sk.lay);
  auto& prog = rel.prog;
  auto& lay = rel.layout;

  const std::vector<double> x0 =
      relax_detail::power_values(sc, agg, lay, prog.vars.size(), around);
  const double ln2 = std::log(2.0);

  // Streams carrying no rate at the expansion point get their rate variable
  // pinned and dropped from the layout, same treatment as structurally dead
  // streams. Leaving them free forces the barrier to hold a strictly positive
  // rate against a near-zero-capacity row, which squeezes the program's
  // interior to nothing and stalls feasibility search.
  {
    const auto corner = supportable_stream_rates(sc, prof, around);
    std::vector<double> mass(prog.vars.size(), 0.0);
    for (int i = 0; i < U; ++i)
      for (int j = 0; j < U; ++j)
        for (int n = 0; n < N; ++n) {
          const int v = lay.rate_var[i][j][n];
          if (v >= 0) mass[v] += corner[i][j][n];
        }
    for (int i = 0; i < U; ++i)
      for (int j = 0; j < U; ++j)
        for (int n = 0; n < N; ++n) {
          const int v = lay.rate_var[i][j][n];
          if (v >= 0 && mass[v] < 1e-9) {
            prog.vars[v].pinned = true;
            lay.rate_var[i][j][n] = -1;
          }
        }
  }

  for (int r = 0; r < U; ++r)
    for (int n = 0; n < N; ++n) {
      const auto& slots = sk.slots[r][n];
      const size_t K = slots.size();
      // tail[k] = interference-plus-signal power stacked from position k on;
      // tail[K] is the undecoded floor alone
      std::vector<AffineForm> tail(K + 1);
      tail[K] = sk.unc[r][n];
      for (size_t k = K; k-- > 0;) {
        tail[k] = tail[k + 1];
        if (slots[k].power_var >= 0) tail[k].add(slots[k].power_var, slots[k].gain);
      }
      const double gamma = sc.sigma2(r, n);
      const double rho = sc.rate_factor;
      for (size_t k = 0; k < K; ++k) {
        bool live = false;
        for (int rv : slots[k].rate_vars) live = live || !prog.vars[rv].pinned;
        if (!live) continue;
        double later0 = 0.0;
        for (const auto& t : tail[k + 1].terms) later0 += t.second * x0[t.first];
        const double at = gamma + later0;
        const double slope = rho / (ln2 * at);
        Constraint c;
        c.kind = ConstraintKind::log_affine;
        for (int rv : slots[k].rate_vars)
          if (!prog.vars[rv].pinned) c.lhs.add(rv, 1.0);
        for (const auto& t : tail[k + 1].terms) c.lhs.add(t.first, slope * t.second);
        c.lhs.constant = rho * std::log2(at / gamma) - slope * later0;
        c.arg = tail[k];
        c.gamma = gamma;
        c.scale = rho;
        c.tag = "decode[r" + std::to_string(r + 1) + ",n" + std::to_string(n + 1) + ",k" +
                std::to_string(k + 1) + "]";
        prog.cons.push_back(std::move(c));
      }
    }

  relax_detail::add_rate_rows(sc, prog, lay);
  prog.structural_check();
  return rel;
}

/// Expand a relaxation solution back to per-stream powers. A pooled run's
/// total lands on its last-decoded member (any split is equivalent; the rates
/// are recomputed canonically from the chains); shared members each transmit
/// the group value. Rates are the largest the powers support, aux is copied.
inline AllocationPoint recover_allocation(const Scenario& sc, const DecodingProfile& prof,
                                          const AggregationMap& agg, const Relaxation& rel,
                                          const std::vector<double>& x) {
  AllocationPoint pt = AllocationPoint::zeros(sc);
  for (size_t g = 0; g < agg.groups.size(); ++g) {
    const auto& grp = agg.groups[g];
    for (int n = 0; n < sc.blocks; ++n) {
      const int pv = rel.layout.power_var[g][n];
      if (pv < 0) continue;
      if (grp.shared_value) {
        for (const auto& m : grp.members) pt.power[m.tx][m.companion][n] = x[pv];
      } else if (grp.members.size() == 1) {
        const auto& m = grp.members.front();
        pt.power[m.tx][m.companion][n] = x[pv];
      } else {
        const int home = grp.members.front().tx;
        const auto last = *std::max_element(
            grp.members.begin(), grp.members.end(), [&](const SubStreamId& a, const SubStreamId& b) {
              return prof.position(home, a) < prof.position(home, b);
            });
        pt.power[last.tx][last.companion][n] = x[pv];
      }
    }
  }
  pt.rate = supportable_stream_rates(sc, prof, pt);
  for (int r = 0; r < sc.users; ++r)
    for (int n = 0; n < sc.blocks; ++n) {
      const int cv = rel.layout.aux_var[r][n];
      pt.aux[r][n] = cv >= 0 ? x[cv] : 0.0;
    }
  return pt;
}

/// Distance of each receiver-block's credit from its bound. Zero everywhere
/// means the relaxed solution satisfies the exact decodability constraints.
inline std::vector<std::vector<double>> exactness_gap(const Scenario& sc,
                                                      const DecodingProfile& prof,
                                                      const AllocationPoint& pt) {
  std::vector<std::vector<double>> gap(sc.users, std::vector<double>(sc.blocks, 0.0));
  for (int r = 0; r < sc.users; ++r)
    for (int n = 0; n < sc.blocks; ++n) {
      const double unc = undecoded_interference(sc, prof, pt, r, n);
      gap[r][n] =
          sc.rate_factor * std::log2(1.0 + unc / sc.sigma2(r, n)) - pt.aux[r][n];
    }
  return gap;
}

}  // namespace minpic

#endif
