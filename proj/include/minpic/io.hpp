#ifndef MINPIC_IO_HPP
#define MINPIC_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minpic/cases.hpp"
#include "minpic/outer_loop.hpp"
#include "minpic/sic.hpp"
#include "minpic/types.hpp"

namespace minpic {

inline constexpr const char* kToolVersion = "minpic 1.0.0";

namespace io_detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw argument_error(where + " must be a number");
  return j.get<double>();
}

inline void reject_unknown(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw argument_error("unknown key in " + where + ": " + it.key());
  }
}

// 64-bit FNV-1a; stable across platforms, good enough to pair results with
// the scenario they were computed from
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace io_detail

struct ScenarioFile {
  Scenario scenario;
  SolverOptions solver;
  BisectionConfig bisection;
};

inline ScenarioFile parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw argument_error(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw argument_error("scenario must be a JSON object");
  io_detail::reject_unknown(
      j,
      {"version", "U", "N", "rate_factor", "noise", "weights", "rate_min", "gains", "solver",
       "bisection"},
      "scenario");
  for (const char* k : {"version", "U", "N", "rate_factor", "noise", "weights", "rate_min",
                        "gains"})
    if (!j.contains(k)) throw argument_error(std::string("missing key: ") + k);
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw argument_error("version must be the integer 1");

  ScenarioFile sf;
  Scenario& sc = sf.scenario;
  if (!j["U"].is_number_integer()) throw argument_error("U must be an integer");
  sc.users = j["U"].get<int>();
  if (!j["N"].is_number_integer()) throw argument_error("N must be an integer");
  sc.blocks = j["N"].get<int>();
  if (sc.users < 1 || sc.blocks < 1) throw argument_error("U and N must be at least 1");
  sc.rate_factor = io_detail::require_number(j["rate_factor"], "rate_factor");

  const auto& jn = j["noise"];
  sc.noise.assign(sc.users, std::vector<double>(sc.blocks, 0.0));
  if (jn.is_number()) {
    const double v = jn.get<double>();
    for (auto& row : sc.noise) row.assign(sc.blocks, v);
  } else if (jn.is_array()) {
    if (static_cast<int>(jn.size()) != sc.users)
      throw argument_error("noise array must have U entries");
    for (int r = 0; r < sc.users; ++r) {
      if (jn[r].is_number()) {
        if (sc.blocks != 1) throw argument_error("noise entries must be arrays when N > 1");
        sc.noise[r][0] = jn[r].get<double>();
      } else if (jn[r].is_array() && static_cast<int>(jn[r].size()) == sc.blocks) {
        for (int n = 0; n < sc.blocks; ++n)
          sc.noise[r][n] = io_detail::require_number(jn[r][n], "noise");
      } else {
        throw argument_error("noise entries must be numbers or length-N arrays");
      }
    }
  } else {
    throw argument_error("noise must be a number or an array");
  }

  auto read_user_vec = [&](const char* key) {
    const auto& a = j[key];
    if (!a.is_array() || static_cast<int>(a.size()) != sc.users)
      throw argument_error(std::string(key) + " must be an array of U numbers");
    std::vector<double> v(sc.users);
    for (int u = 0; u < sc.users; ++u) v[u] = io_detail::require_number(a[u], key);
    return v;
  };
  sc.weight = read_user_vec("weights");
  sc.rate_min = read_user_vec("rate_min");

  const auto& jg = j["gains"];
  if (!jg.is_array() || static_cast<int>(jg.size()) != sc.users)
    throw argument_error("gains must be a U x U array");
  sc.gain.assign(sc.users, std::vector<std::vector<double>>(sc.users));
  for (int r = 0; r < sc.users; ++r) {
    if (!jg[r].is_array() || static_cast<int>(jg[r].size()) != sc.users)
      throw argument_error("gains must be a U x U array");
    for (int i = 0; i < sc.users; ++i) {
      const auto& cell = jg[r][i];
      if (cell.is_number()) {
        if (sc.blocks != 1)
          throw argument_error("gain entries must be length-N arrays when N > 1");
        sc.gain[r][i] = {cell.get<double>()};
      } else if (cell.is_array() && static_cast<int>(cell.size()) == sc.blocks) {
        sc.gain[r][i].resize(sc.blocks);
        for (int n = 0; n < sc.blocks; ++n)
          sc.gain[r][i][n] = io_detail::require_number(cell[n], "gains");
      } else {
        throw argument_error("gain entries must be numbers or length-N arrays");
      }
    }
  }

  if (j.contains("solver")) {
    const auto& js = j["solver"];
    if (!js.is_object()) throw argument_error("solver must be an object");
    io_detail::reject_unknown(
        js, {"feas_tol", "gap_tol", "max_outer", "max_newton", "t0", "mu", "ls_alpha", "ls_beta"},
        "solver");
    SolverOptions& so = sf.solver;
    if (js.contains("feas_tol")) so.feas_tol = io_detail::require_number(js["feas_tol"], "feas_tol");
    if (js.contains("gap_tol")) so.gap_tol = io_detail::require_number(js["gap_tol"], "gap_tol");
    if (js.contains("max_outer")) so.max_outer = static_cast<int>(io_detail::require_number(js["max_outer"], "max_outer"));
    if (js.contains("max_newton")) so.max_newton = static_cast<int>(io_detail::require_number(js["max_newton"], "max_newton"));
    if (js.contains("t0")) so.t0 = io_detail::require_number(js["t0"], "t0");
    if (js.contains("mu")) so.mu = io_detail::require_number(js["mu"], "mu");
    if (js.contains("ls_alpha")) so.ls_alpha = io_detail::require_number(js["ls_alpha"], "ls_alpha");
    if (js.contains("ls_beta")) so.ls_beta = io_detail::require_number(js["ls_beta"], "ls_beta");
  }
  if (j.contains("bisection")) {
    const auto& jb = j["bisection"];
    if (!jb.is_object()) throw argument_error("bisection must be an object");
    io_detail::reject_unknown(
        jb, {"lambda_low", "lambda_high", "lambda_cap", "epsilon", "max_doublings", "verify_tol"},
        "bisection");
    BisectionConfig& b = sf.bisection;
    if (jb.contains("lambda_low")) b.lambda_low = io_detail::require_number(jb["lambda_low"], "lambda_low");
    if (jb.contains("lambda_high")) b.lambda_high = io_detail::require_number(jb["lambda_high"], "lambda_high");
    if (jb.contains("lambda_cap")) b.lambda_cap = io_detail::require_number(jb["lambda_cap"], "lambda_cap");
    if (jb.contains("epsilon")) b.epsilon = io_detail::require_number(jb["epsilon"], "epsilon");
    if (jb.contains("max_doublings")) b.max_doublings = static_cast<int>(io_detail::require_number(jb["max_doublings"], "max_doublings"));
    if (jb.contains("verify_tol")) b.verify_tol = io_detail::require_number(jb["verify_tol"], "verify_tol");
  }

  sc.validate();
  return sf;
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw argument_error("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Canonical text of the physical problem (options excluded), hashed so a
/// result file can be matched to the scenario it came from.
inline std::string scenario_digest(const Scenario& sc) {
  std::ostringstream os;
  os << "U=" << sc.users << ";N=" << sc.blocks << ";rf=" << io_detail::fmt("%.17g", sc.rate_factor);
  os << ";noise=";
  for (const auto& row : sc.noise)
    for (double v : row) os << io_detail::fmt("%.17g", v) << ",";
  os << ";w=";
  for (double v : sc.weight) os << io_detail::fmt("%.17g", v) << ",";
  os << ";b=";
  for (double v : sc.rate_min) os << io_detail::fmt("%.17g", v) << ",";
  os << ";G=";
  for (const auto& r : sc.gain)
    for (const auto& i : r)
      for (double v : i) os << io_detail::fmt("%.17g", v) << ",";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(io_detail::fnv1a(os.str())));
  return buf;
}

// Result files are written by hand so key order and float text are fixed:
// the same solve must produce byte-identical output everywhere.
inline std::string render_result(const Scenario& sc, const SolveReport& rep) {
  std::ostringstream os;
  auto f6 = [](double v) { return io_detail::fmt("%.6f", v); };
  os << "{\n";
  os << "  \"version\": 1,\n";
  os << "  \"tool\": \"" << kToolVersion << "\",\n";
  os << "  \"scenario_digest\": \"" << scenario_digest(sc) << "\",\n";
  os << "  \"status\": \"" << (rep.feasible ? "optimal" : "infeasible") << "\",\n";
  os << "  \"mode\": \"" << to_string(rep.mode) << "\",\n";
  os << "  \"profile\": [";
  for (int r = 0; r < sc.users; ++r) {
    if (r) os << ", ";
    os << "[";
    if (rep.feasible)
      for (std::size_t k = 0; k < rep.profile.order[r].size(); ++k) {
        const auto& s = rep.profile.order[r][k];
        if (k) os << ", ";
        os << "[" << s.tx + 1 << ", " << s.companion + 1 << "]";
      }
    os << "]";
  }
  os << "],\n";
  os << "  \"powers\": [";
  for (int i = 0; i < sc.users; ++i) {
    if (i) os << ", ";
    os << "[";
    for (int jj = 0; jj < sc.users; ++jj) {
      if (jj) os << ", ";
      os << "[";
      for (int n = 0; n < sc.blocks; ++n) {
        if (n) os << ", ";
        os << f6(rep.feasible ? rep.point.power[i][jj][n] : 0.0);
      }
      os << "]";
    }
    os << "]";
  }
  os << "],\n";
  os << "  \"rates_achieved\": [";
  for (int u = 0; u < sc.users; ++u) {
    if (u) os << ", ";
    os << f6(rep.feasible && u < static_cast<int>(rep.rates.size()) ? rep.rates[u] : 0.0);
  }
  os << "],\n";
  os << "  \"aux\": [";
  for (int r = 0; r < sc.users; ++r) {
    if (r) os << ", ";
    os << "[";
    for (int n = 0; n < sc.blocks; ++n) {
      if (n) os << ", ";
      os << f6(rep.feasible ? rep.point.aux[r][n] : 0.0);
    }
    os << "]";
  }
  os << "],\n";
  os << "  \"lambda_star\": " << f6(rep.lambda_star) << ",\n";
  os << "  \"duals\": [";
  for (int u = 0; u < sc.users; ++u) {
    if (u) os << ", ";
    os << f6(u < static_cast<int>(rep.user_duals.size()) ? rep.user_duals[u] : 0.0);
  }
  os << "],\n";
  os << "  \"total_weighted_power\": " << f6(rep.total) << ",\n";
  double gap_max = 0.0;
  for (const auto& row : rep.gaps)
    for (double g : row) gap_max = std::max(gap_max, std::abs(g));
  os << "  \"diagnostics\": {\n";
  os << "    \"profiles_examined\": " << rep.profiles_examined << ",\n";
  os << "    \"total_solves\": " << rep.total_solves << ",\n";
  os << "    \"duality_gap\": " << io_detail::fmt("%.3e", rep.sol.duality_gap) << ",\n";
  os << "    \"kkt_residual\": " << io_detail::fmt("%.3e", rep.sol.kkt_residual) << ",\n";
  os << "    \"exactness_gap_max\": " << io_detail::fmt("%.3e", gap_max) << "\n";
  os << "  }\n";
  os << "}\n";
  return os.str();
}

struct ResultFile {
  std::string digest;
  std::string status;
  DecodingProfile profile;
  std::vector<std::vector<std::vector<double>>> powers;
  std::vector<double> rates;
  double lambda_star = 0.0;
  double total = 0.0;
};

inline ResultFile parse_result(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw argument_error(std::string("result is not valid JSON: ") + e.what());
  }
  ResultFile rf;
  try {
    rf.digest = j.at("scenario_digest").get<std::string>();
    rf.status = j.at("status").get<std::string>();
    const auto& jp = j.at("profile");
    rf.profile.order.resize(jp.size());
    for (std::size_t r = 0; r < jp.size(); ++r)
      for (const auto& pair : jp[r])
        rf.profile.order[r].push_back(
            SubStreamId{pair.at(0).get<int>() - 1, pair.at(1).get<int>() - 1});
    rf.powers = j.at("powers").get<std::vector<std::vector<std::vector<double>>>>();
    rf.rates = j.at("rates_achieved").get<std::vector<double>>();
    rf.lambda_star = j.at("lambda_star").get<double>();
    rf.total = j.at("total_weighted_power").get<double>();
  } catch (const std::exception& e) {
    throw argument_error(std::string("malformed result file: ") + e.what());
  }
  return rf;
}

inline ResultFile load_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw argument_error("cannot open result file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_result(ss.str());
}

/// Power table in the style of the worked examples: one row per transmitter,
/// one column per companion, powers at two decimals.
inline std::string render_power_table(const Scenario& sc, const AllocationPoint& pt) {
  std::ostringstream os;
  for (int n = 0; n < sc.blocks; ++n) {
    if (sc.blocks > 1) os << "block " << n + 1 << "\n";
    char buf[32];
    os << "User k / Sub-user j";
    for (int jj = 0; jj < sc.users; ++jj) {
      std::snprintf(buf, sizeof buf, "%9d", jj + 1);
      os << buf;
    }
    os << "\n";
    for (int i = 0; i < sc.users; ++i) {
      std::snprintf(buf, sizeof buf, "%-19d", i + 1);
      os << buf;
      for (int jj = 0; jj < sc.users; ++jj) os << io_detail::fmt("%9.2f", pt.power[i][jj][n]);
      os << "\n";
    }
  }
  return os.str();
}

inline std::string render_rates(const std::vector<double>& rates) {
  std::ostringstream os;
  os << "[";
  for (std::size_t u = 0; u < rates.size(); ++u) {
    if (u) os << ", ";
    os << io_detail::fmt("%.3f", rates[u]);
  }
  os << "]";
  return os.str();
}

inline std::string render_report(const Scenario& sc, const SolveReport& rep) {
  std::ostringstream os;
  if (!rep.feasible) {
    os << "status: infeasible\n";
    if (!rep.message.empty()) os << rep.message << "\n";
    return os.str();
  }
  os << "Optimal sub-user power allocations\n";
  os << render_power_table(sc, rep.point);
  os << "decoding order: " << to_string(rep.profile) << "\n";
  os << "achieved rates: " << render_rates(rep.rates) << "\n";
  os << "total weighted power: " << io_detail::fmt("%.2f", rep.total) << "\n";
  os << "lambda*: " << io_detail::fmt("%.6f", rep.lambda_star) << "\n";
  os << "status: optimal\n";
  return os.str();
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return io_detail::fmt("%.6f", v);
}

inline std::string render_case_csv_header() {
  return "case,rate_factor,mode,ref_total,our_total,oma_total,tin_total,waterfill_total,"
         "ratio_oma,ref_within_10pct,dominance";
}

inline std::string render_case_csv_row(const CaseReport& cr) {
  std::ostringstream os;
  const bool near_ref = std::isfinite(cr.our_total) &&
                        std::abs(cr.our_total - cr.ref_total) <= 0.10 * cr.ref_total;
  os << cr.id << "," << io_detail::fmt("%g", cr.rate_factor) << "," << to_string(cr.report.mode)
     << "," << csv_number(cr.ref_total) << "," << csv_number(cr.our_total) << ","
     << csv_number(cr.oma_total) << "," << csv_number(cr.tin_total) << ","
     << csv_number(cr.waterfill_total) << "," << csv_number(cr.ratio_oma) << ","
     << (near_ref ? "yes" : "no") << "," << cr.dominance;
  return os.str();
}

}  // namespace minpic

#endif
