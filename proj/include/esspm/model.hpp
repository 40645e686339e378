#pragma once

// Mixed-integer linear feasibility model for pure-mutation stability.
//
// For each pure strategy j a binary y_j selects which stability condition
// must hold for mutation j:
//   y_j = 0:  u1(j, x) <= z - eps1
//   y_j = 1:  u1(j, x) == z  and  u1(j, j) <= u1(x, j) - eps2
// encoded with big-M rows. u1(j, x) and u1(x, j) are linear in x; the only
// nonlinear quantity is z = x^T A x, which is replaced by a piecewise-linear
// model built from SOS2 lambda formulations of univariate squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esspm/game.hpp"

namespace esspm {

enum class Relation { Le, Eq, Ge };

struct LinearTerm {
  std::size_t var;
  double coef;
};

struct Variable {
  std::string name;
  double lb;
  double ub;
  bool binary = false;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation rel;
  double rhs;
};

/// Ordered lambda variables of which at most two adjacent ones may be nonzero.
struct Sos2Set {
  std::string name;
  std::vector<std::size_t> members;
};

/// One univariate square q = s^2 replaced by its chord interpolant.
struct SquareTerm {
  std::string name;
  double lo;
  double hi;
  double coef;  // weight of q in z
  std::vector<LinearTerm> arg;  // s as a linear form in the strategy variables
  std::size_t q_var;
  std::size_t sos;  // index into ModelIR::sos2_sets()

  double spacing(std::size_t k) const { return (hi - lo) / static_cast<double>(k); }
  /// Largest gap between chord and parabola on one segment.
  double max_chord_gap(std::size_t k) const {
    const double h = spacing(k);
    return h * h / 4.0;
  }
};

struct ModelMeta {
  std::size_t m = 0;
  std::size_t k = 0;
  double eps = 0;
  double big_m = 0;
  std::size_t z_var = 0;
  // Bounded correction variables absorbing the linearization error of z
  // (empty when z is tied exactly to the interpolant).
  std::vector<std::size_t> correction_vars;
  double over_bound = 0;   // max of (interpolant - x^T A x)
  double under_bound = 0;  // max of (x^T A x - interpolant)
};

class ModelIR {
 public:
  std::size_t add_continuous(std::string name, double lb, double ub) {
    if (!(lb <= ub)) throw std::invalid_argument("variable " + name + " has empty bounds");
    vars_.push_back({std::move(name), lb, ub, false});
    return vars_.size() - 1;
  }

  std::size_t add_binary(std::string name) {
    vars_.push_back({std::move(name), 0.0, 1.0, true});
    return vars_.size() - 1;
  }

  void add_constraint(std::string name, std::vector<LinearTerm> terms, Relation rel, double rhs) {
    for (const auto& t : terms)
      if (t.var >= vars_.size())
        throw std::out_of_range("constraint " + name + " references an undeclared variable");
    rows_.push_back({std::move(name), std::move(terms), rel, rhs});
  }

  std::size_t add_sos2(std::string name, std::vector<std::size_t> members) {
    if (members.size() < 2) throw std::invalid_argument("SOS2 set needs at least two members");
    for (auto v : members)
      if (v >= vars_.size()) throw std::out_of_range("SOS2 set references an undeclared variable");
    sos_.push_back({std::move(name), std::move(members)});
    return sos_.size() - 1;
  }

  std::vector<Variable>& variables() { return vars_; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<Sos2Set>& sos2_sets() const { return sos_; }
  const std::vector<SquareTerm>& squares() const { return squares_; }
  std::vector<SquareTerm>& squares() { return squares_; }
  ModelMeta& meta() { return meta_; }
  const ModelMeta& meta() const { return meta_; }

  std::size_t num_binaries() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.binary; }));
  }

  /// Throws on dangling references or malformed sets.
  void validate() const {
    for (const auto& v : vars_)
      if (!(v.lb <= v.ub) || !std::isfinite(v.lb) || !std::isfinite(v.ub))
        throw std::invalid_argument("variable " + v.name + " needs finite, ordered bounds");
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("row " + r.name + " has bad rhs");
      for (const auto& t : r.terms)
        if (t.var >= vars_.size() || !std::isfinite(t.coef))
          throw std::invalid_argument("row " + r.name + " is malformed");
    }
    for (const auto& s : sos_) {
      if (s.members.size() < 2) throw std::invalid_argument("SOS2 set " + s.name + " too short");
      for (auto v : s.members)
        if (v >= vars_.size()) throw std::invalid_argument("SOS2 set " + s.name + " is malformed");
    }
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<Sos2Set> sos_;
  std::vector<SquareTerm> squares_;
  ModelMeta meta_;
};

/// Per-mutation overrides for the margins and big-M constants of one row block.
struct IndicatorParams {
  double eps1;
  double eps2;
  double m1, m2, m3, m4;
};

enum class ZCoupling {
  // z equals the piecewise-linear interpolant exactly.
  Interpolant,
  // z may deviate from the interpolant by at most the worst-case
  // linearization error in either direction, so z can always equal x^T A x.
  Enclosure,
};

struct BuildParams {
  std::size_t k = 20;
  double eps = 1e-5;
  std::optional<double> big_m;  // defaults to 1 + eps
  ZCoupling coupling = ZCoupling::Enclosure;
  // Adds x_j <= y_j: a strategy in the strict branch earns less than z and
  // so cannot carry weight in a symmetric equilibrium.
  bool link_support = true;
  std::vector<IndicatorParams> per_strategy;  // empty, or one entry per pure strategy

  double effective_big_m() const { return big_m.value_or(1.0 + eps); }
};

/// Breakpoints lo + r (hi - lo) / k for r = 0..k.
inline std::vector<double> breakpoints(double lo, double hi, std::size_t k) {
  std::vector<double> t(k + 1);
  for (std::size_t r = 0; r <= k; ++r)
    t[r] = (r == k) ? hi : lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(k);
  return t;
}

/// Adds the linearization subsystem for z ~= x^T A x over the variables x_vars
/// and returns z's defining terms. Products x_i x_j with i < j go through
/// ((x_i + x_j)^2 - (x_i - x_j)^2) / 4; each square gets its own lambda set.
inline std::vector<LinearTerm> linearize_quadratic_form(ModelIR& model, const GameMatrix& a,
                                                        std::span<const std::size_t> x_vars,
                                                        std::size_t k) {
  if (k < 2) throw std::invalid_argument("need at least 2 breakpoint segments");
  const std::size_t m = a.size();
  if (x_vars.size() != m) throw std::invalid_argument("x variable count does not match game");

  std::vector<LinearTerm> z_terms;

  auto add_square = [&](const std::string& tag, std::vector<LinearTerm> arg,
                        std::vector<LinearTerm> arg_x, double lo, double hi, double coef) {
    const auto t = breakpoints(lo, hi, k);
    std::vector<std::size_t> lam(k + 1);
    for (std::size_t r = 0; r <= k; ++r)
      lam[r] = model.add_continuous("lam_" + tag + "_" + std::to_string(r), 0.0, 1.0);
    const double qmax = std::max(lo * lo, hi * hi);
    const double qmin = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
    const std::size_t q = model.add_continuous("q_" + tag, qmin, qmax);

    // s = sum lambda_r t_r
    std::vector<LinearTerm> srow = std::move(arg);
    for (std::size_t r = 0; r <= k; ++r)
      if (t[r] != 0.0) srow.push_back({lam[r], -t[r]});
    model.add_constraint("arg_" + tag, std::move(srow), Relation::Eq, 0.0);

    // q = sum lambda_r t_r^2
    std::vector<LinearTerm> qrow{{q, 1.0}};
    for (std::size_t r = 0; r <= k; ++r)
      if (t[r] != 0.0) qrow.push_back({lam[r], -t[r] * t[r]});
    model.add_constraint("sq_" + tag, std::move(qrow), Relation::Eq, 0.0);

    std::vector<LinearTerm> conv;
    for (auto v : lam) conv.push_back({v, 1.0});
    model.add_constraint("conv_" + tag, std::move(conv), Relation::Eq, 1.0);

    const std::size_t sos = model.add_sos2("sos_" + tag, lam);
    model.squares().push_back({tag, lo, hi, coef, std::move(arg_x), q, sos});
    if (coef != 0.0) z_terms.push_back({q, coef});
  };

  for (std::size_t i = 0; i < m; ++i)
    add_square("d" + std::to_string(i), {{x_vars[i], 1.0}}, {{x_vars[i], 1.0}}, 0.0, 1.0,
               a(i, i));

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::string ij = std::to_string(i) + "_" + std::to_string(j);
      const double c = (a(i, j) + a(j, i)) / 4.0;
      const std::size_t sp = model.add_continuous("s_p" + ij, 0.0, 1.0);
      const std::size_t sm = model.add_continuous("s_m" + ij, -1.0, 1.0);
      model.add_constraint("def_p" + ij, {{sp, 1.0}, {x_vars[i], -1.0}, {x_vars[j], -1.0}},
                           Relation::Eq, 0.0);
      model.add_constraint("def_m" + ij, {{sm, 1.0}, {x_vars[i], -1.0}, {x_vars[j], 1.0}},
                           Relation::Eq, 0.0);
      add_square("p" + ij, {{sp, 1.0}}, {{x_vars[i], 1.0}, {x_vars[j], 1.0}}, 0.0, 1.0, c);
      add_square("m" + ij, {{sm, 1.0}}, {{x_vars[i], 1.0}, {x_vars[j], -1.0}}, -1.0, 1.0, -c);
    }
  }
  return z_terms;
}

/// Builds the feasibility model for a game normalized to [0,1].
inline ModelIR build_model(const GameMatrix& game, const BuildParams& p = {}) {
  if (!game.is_normalized()) throw std::invalid_argument("build_model needs a normalized game");
  if (p.k < 2) throw std::invalid_argument("need at least 2 breakpoint segments");
  if (!(p.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t m = game.size();
  if (!p.per_strategy.empty() && p.per_strategy.size() != m)
    throw std::invalid_argument("per-strategy overrides must cover every pure strategy");

  ModelIR model;
  std::vector<std::size_t> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = model.add_continuous("x_" + std::to_string(i), 0, 1);
  for (std::size_t i = 0; i < m; ++i) y[i] = model.add_binary("y_" + std::to_string(i));
  const std::size_t z = model.add_continuous("z", -1.0, 2.0);

  auto& meta = model.meta();
  meta.m = m;
  meta.k = p.k;
  meta.eps = p.eps;
  meta.big_m = p.effective_big_m();
  meta.z_var = z;

  auto z_terms = linearize_quadratic_form(model, game, x, p.k);

  for (const auto& sq : model.squares()) {
    const double gap = std::abs(sq.coef) * sq.max_chord_gap(p.k);
    if (sq.coef > 0.0) meta.over_bound += gap;
    if (sq.coef < 0.0) meta.under_bound += gap;
  }

  // z - sum coef q (+ corrections) = 0
  std::vector<LinearTerm> zrow{{z, 1.0}};
  for (const auto& t : z_terms) zrow.push_back({t.var, -t.coef});
  if (p.coupling == ZCoupling::Enclosure) {
    const std::size_t up = model.add_continuous("zcorr_up", 0.0, meta.under_bound);
    const std::size_t dn = model.add_continuous("zcorr_dn", 0.0, meta.over_bound);
    zrow.push_back({up, -1.0});
    zrow.push_back({dn, 1.0});
    meta.correction_vars = {up, dn};
  }
  model.add_constraint("zdef", std::move(zrow), Relation::Eq, 0.0);

  for (std::size_t j = 0; j < m; ++j) {
    const IndicatorParams ip = p.per_strategy.empty()
                                   ? IndicatorParams{p.eps, p.eps, meta.big_m, meta.big_m,
                                                     meta.big_m, meta.big_m}
                                   : p.per_strategy[j];
    const std::string sj = std::to_string(j);

    // u1(j, x) as a linear form in x
    std::vector<LinearTerm> row_j, col_j;
    for (std::size_t i = 0; i < m; ++i) {
      row_j.push_back({x[i], game(j, i)});
      col_j.push_back({x[i], game(i, j)});
    }
    auto with = [](std::vector<LinearTerm> base, double scale,
                   std::initializer_list<LinearTerm> extra) {
      for (auto& t : base) t.coef *= scale;
      base.insert(base.end(), extra.begin(), extra.end());
      return base;
    };

    // u1(j,x) <= z - eps1 + M1 y
    model.add_constraint("strict_" + sj, with(row_j, 1.0, {{z, -1.0}, {y[j], -ip.m1}}),
                         Relation::Le, -ip.eps1);
    // u1(j,x) <= z + M2 (1 - y)
    model.add_constraint("eq_hi_" + sj, with(row_j, 1.0, {{z, -1.0}, {y[j], ip.m2}}),
                         Relation::Le, ip.m2);
    // z <= u1(j,x) + M3 (1 - y)
    model.add_constraint("eq_lo_" + sj, with(row_j, -1.0, {{z, 1.0}, {y[j], ip.m3}}),
                         Relation::Le, ip.m3);
    // a_jj <= u1(x,j) - eps2 + M4 (1 - y)
    model.add_constraint("second_" + sj, with(col_j, -1.0, {{y[j], ip.m4}}), Relation::Le,
                         ip.m4 - ip.eps2 - game(j, j));
  }

  if (p.link_support)
    for (std::size_t j = 0; j < m; ++j)
      model.add_constraint("link_" + std::to_string(j), {{x[j], 1.0}, {y[j], -1.0}},
                           Relation::Le, 0.0);

  std::vector<LinearTerm> simplex;
  for (auto v : x) simplex.push_back({v, 1.0});
  model.add_constraint("simplex", std::move(simplex), Relation::Eq, 1.0);
  return model;
}

/// Worst-case |z - x^T A x| over the simplex for the interpolant alone.
inline double linearization_bound(const ModelIR& model) {
  return std::max(model.meta().over_bound, model.meta().under_bound);
}

// ---------------------------------------------------------------------------
// CPLEX LP text format

namespace detail {

inline std::string lp_number(double v) {
  if (v == 0.0) return "0";
  return format_real(v);
}

inline void lp_terms(std::ostream& os, const std::vector<Variable>& vars,
                     const std::vector<LinearTerm>& terms) {
  bool first = true;
  for (const auto& t : terms) {
    if (t.coef == 0.0) continue;
    const double mag = std::abs(t.coef);
    if (first)
      os << (t.coef < 0 ? "- " : "");
    else
      os << (t.coef < 0 ? " - " : " + ");
    if (mag != 1.0) os << lp_number(mag) << ' ';
    os << vars[t.var].name;
    first = false;
  }
  if (first) os << "0 " << vars.front().name;
}

}  // namespace detail

/// Serializes the model in LP format. Output depends only on the model, so a
/// given model always exports to the same bytes.
inline std::string export_lp(const ModelIR& model) {
  const auto& vars = model.variables();
  std::ostringstream os;
  const auto& meta = model.meta();
  os << "\\ pure-mutation stability feasibility model: m=" << meta.m << " k=" << meta.k
     << " eps=" << detail::lp_number(meta.eps) << " M=" << detail::lp_number(meta.big_m) << '\n';
  os << "Minimize\n obj: 0 " << (vars.empty() ? "x_0" : vars.front().name) << '\n';
  os << "Subject To\n";
  for (const auto& r : model.constraints()) {
    os << ' ' << r.name << ": ";
    detail::lp_terms(os, vars, r.terms);
    os << (r.rel == Relation::Le ? " <= " : r.rel == Relation::Ge ? " >= " : " = ")
       << detail::lp_number(r.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : vars) {
    if (v.binary) continue;
    os << ' ' << detail::lp_number(v.lb) << " <= " << v.name << " <= " << detail::lp_number(v.ub)
       << '\n';
  }
  os << "Binary\n";
  for (const auto& v : vars)
    if (v.binary) os << ' ' << v.name;
  os << '\n';
  if (!model.sos2_sets().empty()) {
    os << "SOS\n";
    for (const auto& s : model.sos2_sets()) {
      os << ' ' << s.name << ": S2 ::";
      for (std::size_t r = 0; r < s.members.size(); ++r)
        os << ' ' << vars[s.members[r]].name << ':' << (r + 1);
      os << '\n';
    }
  }
  os << "End\n";
  return os.str();
}

}  // namespace esspm
