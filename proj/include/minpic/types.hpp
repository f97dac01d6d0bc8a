#ifndef MINPIC_TYPES_HPP
#define MINPIC_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace minpic {

class argument_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class build_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class capacity_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sub-stream (i,j): transmitted by user i, intended for decoding at receivers
/// i and j. tx == companion marks the private stream, decoded at i only.
/// Indices are 0-based internally; the CLI prints them 1-based.
struct SubStreamId {
  int tx = 0;
  int companion = 0;

  bool is_private() const { return tx == companion; }

  friend bool operator==(const SubStreamId& a, const SubStreamId& b) {
    return a.tx == b.tx && a.companion == b.companion;
  }
  friend bool operator!=(const SubStreamId& a, const SubStreamId& b) { return !(a == b); }
  friend bool operator<(const SubStreamId& a, const SubStreamId& b) {
    if (a.tx != b.tx) return a.tx < b.tx;
    return a.companion < b.companion;
  }
};

inline std::string to_string(const SubStreamId& s) {
  return "(" + std::to_string(s.tx + 1) + "," + std::to_string(s.companion + 1) + ")";
}

/// Channel instance. Gains are real amplitudes; power gain is the square.
/// gain[r][i][n] is the amplitude from transmitter i into receiver r on
/// resource block n. noise[r][n] > 0. rate_min is per user, summed over the
/// user's sub-streams and blocks. rate_factor scales every log2 term (1 for
/// rates in bits per complex symbol, 0.5 for bits per real dimension).
struct Scenario {
  int users = 0;
  int blocks = 1;
  std::vector<std::vector<std::vector<double>>> gain;  // [r][i][n]
  std::vector<std::vector<double>> noise;              // [r][n]
  std::vector<double> weight;                          // [u]
  std::vector<double> rate_min;                        // [u]
  double rate_factor = 1.0;

  double g(int r, int i, int n) const { return gain[r][i][n]; }
  double power_gain(int r, int i, int n) const { return gain[r][i][n] * gain[r][i][n]; }
  double sigma2(int r, int n) const { return noise[r][n]; }

  void validate() const {
    if (users < 1) throw argument_error("scenario: users must be >= 1");
    if (blocks < 1) throw argument_error("scenario: blocks must be >= 1");
    if ((int)gain.size() != users) throw argument_error("scenario: gain must have users rows");
    for (int r = 0; r < users; ++r) {
      if ((int)gain[r].size() != users)
        throw argument_error("scenario: gain[" + std::to_string(r) + "] must have users columns");
      for (int i = 0; i < users; ++i)
        if ((int)gain[r][i].size() != blocks)
          throw argument_error("scenario: gain[" + std::to_string(r) + "][" + std::to_string(i) +
                               "] must have blocks entries");
    }
    if ((int)noise.size() != users) throw argument_error("scenario: noise must have users rows");
    for (int r = 0; r < users; ++r) {
      if ((int)noise[r].size() != blocks)
        throw argument_error("scenario: noise[" + std::to_string(r) + "] must have blocks entries");
      for (double v : noise[r])
        if (!(v > 0.0)) throw argument_error("scenario: noise must be strictly positive");
    }
    if ((int)weight.size() != users) throw argument_error("scenario: weights must have users entries");
    for (double w : weight)
      if (!(w > 0.0)) throw argument_error("scenario: weights must be strictly positive");
    if ((int)rate_min.size() != users) throw argument_error("scenario: rate_min must have users entries");
    for (double b : rate_min)
      if (b < 0.0) throw argument_error("scenario: rate_min must be nonnegative");
    if (!(rate_factor > 0.0)) throw argument_error("scenario: rate_factor must be strictly positive");
    for (const auto& rows : gain)
      for (const auto& col : rows)
        for (double v : col)
          if (!std::isfinite(v)) throw argument_error("scenario: gains must be finite");
  }
};

/// Per receiver r, order[r] lists the sub-streams receiver r decodes, first
/// entry decoded first (so it sees every later entry as interference).
/// A valid order contains each own stream (r,j) exactly once and any subset
/// of the cross streams (i,r), i != r.
struct DecodingProfile {
  std::vector<std::vector<SubStreamId>> order;

  bool decodes(int r, const SubStreamId& s) const {
    for (const auto& e : order[r])
      if (e == s) return true;
    return false;
  }

  int position(int r, const SubStreamId& s) const {
    for (size_t k = 0; k < order[r].size(); ++k)
      if (order[r][k] == s) return (int)k;
    return -1;
  }

  void validate(const Scenario& sc) const {
    const int U = sc.users;
    if ((int)order.size() != U) throw argument_error("profile: need one order per receiver");
    for (int r = 0; r < U; ++r) {
      if (order[r].empty() && sc.rate_min[r] > 0.0)
        throw argument_error("profile: receiver " + std::to_string(r + 1) +
                             " decodes nothing but has positive rate_min");
      std::vector<int> own_seen(U, 0);
      std::vector<int> cross_seen(U, 0);
      for (const auto& s : order[r]) {
        if (s.tx < 0 || s.tx >= U || s.companion < 0 || s.companion >= U)
          throw argument_error("profile: stream index out of range at receiver " +
                               std::to_string(r + 1));
        if (s.tx == r) {
          if (++own_seen[s.companion] > 1)
            throw argument_error("profile: duplicate own stream " + to_string(s) +
                                 " at receiver " + std::to_string(r + 1));
        } else if (s.companion == r) {
          if (++cross_seen[s.tx] > 1)
            throw argument_error("profile: duplicate cross stream " + to_string(s) +
                                 " at receiver " + std::to_string(r + 1));
        } else {
          throw argument_error("profile: stream " + to_string(s) +
                               " does not belong at receiver " + std::to_string(r + 1));
        }
      }
      for (int j = 0; j < U; ++j)
        if (!own_seen[j])
          throw argument_error("profile: receiver " + std::to_string(r + 1) +
                               " is missing own stream (" + std::to_string(r + 1) + "," +
                               std::to_string(j + 1) + ")");
    }
  }

  /// Receivers that decode stream s under this profile: always s.tx, plus
  /// s.companion when the companion actually includes s in its order.
  std::vector<int> decoded_at(const SubStreamId& s) const {
    std::vector<int> out{s.tx};
    if (!s.is_private() && decodes(s.companion, s)) out.push_back(s.companion);
    return out;
  }
};

inline std::string to_string(const DecodingProfile& p) {
  std::string out;
  for (size_t r = 0; r < p.order.size(); ++r) {
    if (r) out += " ";
    out += "r" + std::to_string(r + 1) + ":[";
    for (size_t k = 0; k < p.order[r].size(); ++k) {
      if (k) out += " ";
      out += to_string(p.order[r][k]);
    }
    out += "]";
  }
  return out;
}

/// A transmit allocation: power[i][j][n] on sub-stream (i,j) in block n,
/// the rate carried by each sub-stream per block, and the auxiliary
/// pre-cancellation rate credit per receiver and block (zero when unused).
struct AllocationPoint {
  std::vector<std::vector<std::vector<double>>> power;  // [i][j][n]
  std::vector<std::vector<std::vector<double>>> rate;   // [i][j][n]
  std::vector<std::vector<double>> aux;                 // [r][n]

  static AllocationPoint zeros(const Scenario& sc) {
    AllocationPoint pt;
    pt.power.assign(sc.users,
                    std::vector<std::vector<double>>(sc.users, std::vector<double>(sc.blocks, 0.0)));
    pt.rate = pt.power;
    pt.aux.assign(sc.users, std::vector<double>(sc.blocks, 0.0));
    return pt;
  }
};

/// One receiver's successive-cancellation chain on one block.
/// increment[k] is the rate supportable by the stream at position k given that
/// positions 0..k-1 are decoded and removed and positions k+1.. remain.
struct RateChain {
  double floor_power = 0.0;  // noise plus never-decoded interference
  std::vector<SubStreamId> streams;
  std::vector<double> increment;

  double total() const {
    double t = 0.0;
    for (double v : increment) t += v;
    return t;
  }
};

}  // namespace minpic

#endif
