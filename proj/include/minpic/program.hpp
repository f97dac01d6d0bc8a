#ifndef MINPIC_PROGRAM_HPP
#define MINPIC_PROGRAM_HPP

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "minpic/types.hpp"

namespace minpic {

struct AffineForm {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  double constant = 0.0;

  void add(int var, double coef) {
    if (coef == 0.0) return;
    for (auto& t : terms)
      if (t.first == var) {
        t.second += coef;
        return;
      }
    terms.push_back({var, coef});
  }

  double eval(const std::vector<double>& x) const {
    double v = constant;
    for (const auto& t : terms) v += t.second * x[t.first];
    return v;
  }
};

enum class ConstraintKind { linear, log_affine };

/// linear:      lhs(x) <= 0
/// log_affine:  lhs(x) <= scale * (log2(gamma + arg(x)) - log2(gamma))
/// with gamma > 0 and arg having nonnegative coefficients, so the right side
/// is concave and the feasible set convex (slack is concave in x).
struct Constraint {
  ConstraintKind kind = ConstraintKind::linear;
  AffineForm lhs;
  AffineForm arg;
  double gamma = 1.0;
  double scale = 1.0;
  std::string tag;

  double slack(const std::vector<double>& x) const {
    if (kind == ConstraintKind::linear) return -lhs.eval(x);
    return scale * (std::log2(gamma + arg.eval(x)) - std::log2(gamma)) - lhs.eval(x);
  }
};

/// Minimize objective . x subject to the constraints and x >= 0.
/// Pinned variables are structurally forced to zero; no constraint or
/// objective term may reference them (kept in the list so callers can index
/// the original variable layout).
struct ConvexProgram {
  struct Variable {
    std::string name;
    bool pinned = false;
  };

  std::vector<Variable> vars;
  std::vector<double> objective;
  std::vector<Constraint> cons;
  std::vector<double> interior_hint;  // builder-supplied strictly feasible start, may be empty
  bool infeasible_marker = false;     // detected at build time, e.g. a rate
  std::string infeasible_reason;      // requirement with every carrier pinned

  int add_var(std::string name, bool pinned = false) {
    vars.push_back({std::move(name), pinned});
    objective.push_back(0.0);
    return (int)vars.size() - 1;
  }

  /// Substitute pinned variables (fixed at zero) out of every form. Call
  /// after pinning variables post construction, so the program still passes
  /// structural_check.
  void drop_pinned_terms() {
    auto strip = [&](AffineForm& f) {
      size_t w = 0;
      for (size_t k = 0; k < f.terms.size(); ++k)
        if (!vars[f.terms[k].first].pinned) f.terms[w++] = f.terms[k];
      f.terms.resize(w);
    };
    for (auto& c : cons) {
      strip(c.lhs);
      strip(c.arg);
    }
    for (size_t k = 0; k < vars.size(); ++k)
      if (vars[k].pinned) objective[k] = 0.0;
  }

  void structural_check() const {
    if (objective.size() != vars.size())
      throw build_error("program: objective length mismatch");
    auto check_form = [&](const AffineForm& f, bool nonneg, const std::string& where) {
      for (const auto& t : f.terms) {
        if (t.first < 0 || t.first >= (int)vars.size())
          throw build_error("program: variable index out of range in " + where);
        if (vars[t.first].pinned)
          throw build_error("program: pinned variable referenced in " + where);
        if (nonneg && t.second < 0.0)
          throw build_error("program: negative gain coefficient in " + where);
      }
    };
    for (const auto& c : cons) {
      check_form(c.lhs, false, c.tag + " lhs");
      if (c.kind == ConstraintKind::log_affine) {
        check_form(c.arg, true, c.tag + " arg");
        if (!(c.gamma > 0.0)) throw build_error("program: gamma must be positive in " + c.tag);
        if (!(c.scale > 0.0)) throw build_error("program: scale must be positive in " + c.tag);
      }
    }
    for (size_t k = 0; k < vars.size(); ++k)
      if (vars[k].pinned && objective[k] != 0.0)
        throw build_error("program: pinned variable has objective weight");
  }

  void dump(std::ostream& os) const {
    os << std::setprecision(12);
    for (size_t k = 0; k < vars.size(); ++k) {
      os << "var " << k << " " << vars[k].name;
      if (vars[k].pinned) os << " (pinned)";
      os << "\n";
    }
    os << "min:";
    for (size_t k = 0; k < vars.size(); ++k)
      if (objective[k] != 0.0) os << " " << objective[k] << "*x" << k;
    os << "\n";
    auto put_form = [&](const AffineForm& f) {
      os << f.constant;
      for (const auto& t : f.terms) os << " + " << t.second << "*x" << t.first;
    };
    for (const auto& c : cons) {
      os << (c.kind == ConstraintKind::linear ? "lin " : "log ") << c.tag << ": ";
      put_form(c.lhs);
      if (c.kind == ConstraintKind::linear) {
        os << " <= 0\n";
      } else {
        os << " <= " << c.scale << "*(log2(" << c.gamma << " + ";
        put_form(c.arg);
        os << ") - log2(" << c.gamma << "))\n";
      }
    }
    if (infeasible_marker) os << "infeasible at build: " << infeasible_reason << "\n";
  }
};

}  // namespace minpic

#endif
