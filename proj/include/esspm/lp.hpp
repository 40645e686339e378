#pragma once

// Dense bounded-variable primal simplex.
//
// Every structural variable carries finite bounds and sits at one of them
// while nonbasic. Phase 1 minimizes the sum of artificial variables; an
// optional phase 2 minimizes a linear cost over the feasible region. Pricing
// is Dantzig's largest reduced cost until a run of degenerate pivots, then
// Bland's smallest-index rule until the objective moves again.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "esspm/model.hpp"

namespace esspm::lp {

struct Row {
  std::vector<LinearTerm> terms;
  Relation rel;
  double rhs;
};

enum class Status { Optimal, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  std::size_t iterations = 0;
  double objective = 0.0;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  double feas_tol = 1e-9;     // phase-1 residual accepted as feasible
  double pivot_tol = 1e-9;    // smallest usable pivot element
  double cost_tol = 1e-9;     // reduced-cost optimality threshold
  double verify_tol = 1e-7;   // row residual accepted after refinement
  double perturbation = 1e-9; // rhs shift used on the retry after a breakdown
  std::size_t max_iterations = 200000;
  std::size_t degenerate_switch = 10;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Simplex {
 public:
  Simplex(std::span<const Row> rows, std::span<const double> lb, std::span<const double> ub,
          std::span<const double> rhs, const Options& opt)
      : opt_(opt), nrows_(rows.size()), nstruct_(lb.size()) {
    std::size_t nslack = 0;
    for (const auto& r : rows)
      if (r.rel != Relation::Eq) ++nslack;
    ncols_ = nstruct_ + nslack;

    lo_.assign(lb.begin(), lb.end());
    hi_.assign(ub.begin(), ub.end());
    lo_.resize(ncols_, 0.0);
    hi_.resize(ncols_, kInf);
    at_upper_.assign(ncols_, false);
    value_.assign(lo_.begin(), lo_.end());

    a_.assign(nrows_ * ncols_, 0.0);
    rhs_.assign(rhs.begin(), rhs.end());
    std::size_t s = nstruct_;
    for (std::size_t i = 0; i < nrows_; ++i) {
      for (const auto& t : rows[i].terms) a_[i * ncols_ + t.var] += t.coef;
      if (rows[i].rel == Relation::Le) a_[i * ncols_ + s++] = 1.0;
      if (rows[i].rel == Relation::Ge) a_[i * ncols_ + s++] = -1.0;
    }

    // Crash basis: a slack whose sign matches the residual starts basic;
    // everything else gets an artificial.
    tab_ = a_;
    basis_.assign(nrows_, 0);
    beta_.assign(nrows_, 0.0);
    art_sign_.assign(nrows_, 1.0);
    s = nstruct_;
    for (std::size_t i = 0; i < nrows_; ++i) {
      double r = rhs_[i];
      for (std::size_t j = 0; j < nstruct_; ++j) r -= a_[i * ncols_ + j] * value_[j];
      std::size_t slack = ncols_;
      if (rows[i].rel != Relation::Eq) slack = s++;
      double* row = &tab_[i * ncols_];
      if (slack < ncols_ && row[slack] * r >= 0.0) {
        const double piv = row[slack];
        for (std::size_t j = 0; j < ncols_; ++j) row[j] /= piv;
        basis_[i] = slack;
        beta_[i] = r / piv;
      } else {
        const double sign = r >= 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < ncols_; ++j) row[j] *= sign;
        basis_[i] = artificial(i);
        beta_[i] = std::abs(r);
        art_sign_[i] = sign;
      }
    }
    is_basic_.assign(ncols_, false);
    for (auto b : basis_)
      if (b < ncols_) is_basic_[b] = true;
  }

  /// Phase 1; false when no feasible point exists.
  bool phase_one() {
    phase_one_ = true;
    cost_.assign(ncols_, 0.0);
    run();
    double w = 0.0;
    for (std::size_t i = 0; i < nrows_; ++i)
      if (basis_[i] >= ncols_) w += std::max(0.0, beta_[i]);
    phase_one_ = false;
    return w <= opt_.feas_tol;
  }

  void phase_two(std::span<const double> cost) {
    cost_.assign(ncols_, 0.0);
    std::copy(cost.begin(), cost.end(), cost_.begin());
    run();
  }

  /// Recompute basic values from the original columns; returns max row residual.
  double refine() {
    const std::size_t n = nrows_;
    std::vector<double> b(n * n, 0.0), r(rhs_);
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (is_basic_[j] || value_[j] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) r[i] -= a_[i * ncols_ + j] * value_[j];
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t col = basis_[k];
      for (std::size_t i = 0; i < n; ++i)
        b[i * n + k] = col < ncols_ ? a_[i * ncols_ + col] : (i == col - ncols_ ? art_sign_[i] : 0.0);
    }
    // Gaussian elimination with partial pivoting on B beta = r.
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(b[i * n + k]) > std::abs(b[best * n + k])) best = i;
      if (std::abs(b[best * n + k]) < 1e-12) throw LpError("singular basis during refinement");
      if (best != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(b[k * n + j], b[best * n + j]);
        std::swap(r[k], r[best]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = b[i * n + k] / b[k * n + k];
        if (f == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) b[i * n + j] -= f * b[k * n + j];
        r[i] -= f * r[k];
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      double s = r[k];
      for (std::size_t j = k + 1; j < n; ++j) s -= b[k * n + j] * r[j];
      r[k] = s / b[k * n + k];
    }
    beta_ = r;
    for (std::size_t i = 0; i < n; ++i)
      if (basis_[i] < ncols_) value_[basis_[i]] = beta_[i];

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (basis_[i] >= ncols_) worst = std::max(worst, std::abs(beta_[i]));
      else worst = std::max({worst, lo_[basis_[i]] - beta_[i], beta_[i] - hi_[basis_[i]]});
    }
    return worst;
  }

  std::vector<double> structural() const {
    std::vector<double> x(nstruct_);
    for (std::size_t j = 0; j < nstruct_; ++j) x[j] = std::clamp(value_[j], lo_[j], hi_[j]);
    return x;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t artificial(std::size_t row) const { return ncols_ + row; }

  double basic_cost(std::size_t i) const {
    const std::size_t b = basis_[i];
    if (b >= ncols_) return phase_one_ ? 1.0 : 0.0;
    return cost_[b];
  }

  double basic_lo(std::size_t i) const { return basis_[i] >= ncols_ ? 0.0 : lo_[basis_[i]]; }
  double basic_hi(std::size_t i) const {
    if (basis_[i] >= ncols_) return phase_one_ ? kInf : 0.0;
    return hi_[basis_[i]];
  }

  void run() {
    std::vector<double> cb(nrows_), d(ncols_);
    std::size_t degenerate_run = 0;
    for (;;) {
      if (++iterations_ > opt_.max_iterations) throw LpError("simplex iteration limit");
      for (std::size_t i = 0; i < nrows_; ++i) cb[i] = basic_cost(i);
      std::fill(d.begin(), d.end(), 0.0);
      for (std::size_t j = 0; j < ncols_; ++j) d[j] = phase_one_ ? 0.0 : cost_[j];
      for (std::size_t i = 0; i < nrows_; ++i) {
        if (cb[i] == 0.0) continue;
        const double* row = &tab_[i * ncols_];
        for (std::size_t j = 0; j < ncols_; ++j) d[j] -= cb[i] * row[j];
      }

      const bool bland = degenerate_run >= opt_.degenerate_switch;
      std::size_t enter = ncols_;
      double best = 0.0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (is_basic_[j] || lo_[j] == hi_[j]) continue;
        double gain = 0.0;
        if (!at_upper_[j] && d[j] < -opt_.cost_tol) gain = -d[j];
        if (at_upper_[j] && d[j] > opt_.cost_tol) gain = d[j];
        if (gain == 0.0) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
      if (enter == ncols_) return;

      const double dir = at_upper_[enter] ? -1.0 : 1.0;
      double theta = hi_[enter] - lo_[enter];
      std::size_t leave = nrows_;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < nrows_; ++i) {
        const double alpha = tab_[i * ncols_ + enter] * dir;
        double limit = kInf;
        if (alpha > opt_.pivot_tol)
          limit = (beta_[i] - basic_lo(i)) / alpha;
        else if (alpha < -opt_.pivot_tol && basic_hi(i) < kInf)
          limit = (basic_hi(i) - beta_[i]) / -alpha;
        else
          continue;
        limit = std::max(limit, 0.0);
        bool take = false;
        if (limit < theta - 1e-12) {
          take = true;
        } else if (limit <= theta + 1e-12 && leave < nrows_) {
          take = bland ? basis_[i] < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_alpha = alpha;
        }
      }
      if (theta == kInf) throw LpError("unbounded direction in bounded problem");

      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

      for (std::size_t i = 0; i < nrows_; ++i) beta_[i] -= tab_[i * ncols_ + enter] * dir * theta;
      value_[enter] += dir * theta;

      if (leave == nrows_) {
        at_upper_[enter] = !at_upper_[enter];
        value_[enter] = at_upper_[enter] ? hi_[enter] : lo_[enter];
        continue;
      }

      const std::size_t out = basis_[leave];
      if (out < ncols_) {
        is_basic_[out] = false;
        // leaving variable lands on the bound it hit
        at_upper_[out] = leave_alpha < 0.0;
        value_[out] = at_upper_[out] ? hi_[out] : lo_[out];
      }
      basis_[leave] = enter;
      is_basic_[enter] = true;
      beta_[leave] = value_[enter];
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &tab_[r * ncols_];
    const double piv = prow[c];
    for (std::size_t j = 0; j < ncols_; ++j) prow[j] /= piv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < nrows_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * ncols_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
  }

  Options opt_;
  std::size_t nrows_, nstruct_, ncols_ = 0;
  std::vector<double> a_, tab_, rhs_, lo_, hi_, value_, beta_, cost_, art_sign_;
  std::vector<std::size_t> basis_;
  std::vector<bool> at_upper_, is_basic_;
  std::size_t iterations_ = 0;
  bool phase_one_ = true;
};

inline Result solve_once(std::span<const Row> rows, std::span<const double> lb,
                         std::span<const double> ub, std::span<const double> cost,
                         std::span<const double> rhs, const Options& opt) {
  Simplex sx(rows, lb, ub, rhs, opt);
  Result res;
  if (!sx.phase_one()) {
    res.status = Status::Infeasible;
    res.iterations = sx.iterations();
    return res;
  }
  if (!cost.empty()) sx.phase_two(cost);
  if (sx.refine() > opt.verify_tol) throw LpError("basic solution drifted off its bounds");
  res.status = Status::Optimal;
  res.x = sx.structural();
  res.iterations = sx.iterations();
  for (std::size_t j = 0; j < cost.size(); ++j) res.objective += cost[j] * res.x[j];
  return res;
}

}  // namespace detail

/// Largest violation of rows and bounds at x.
inline double max_violation(std::span<const Row> rows, std::span<const double> lb,
                            std::span<const double> ub, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) worst = std::max({worst, lb[j] - x[j], x[j] - ub[j]});
  for (const auto& r : rows) {
    double lhs = 0.0;
    for (const auto& t : r.terms) lhs += t.coef * x[t.var];
    const double v = r.rel == Relation::Le   ? lhs - r.rhs
                     : r.rel == Relation::Ge ? r.rhs - lhs
                                             : std::abs(lhs - r.rhs);
    worst = std::max(worst, v);
  }
  return worst;
}

/// Minimizes cost.x subject to rows and lb <= x <= ub; an empty cost makes it
/// a pure feasibility solve. Bounds must be finite.
inline Result solve(std::span<const Row> rows, std::span<const double> lb,
                    std::span<const double> ub, std::span<const double> cost = {},
                    const Options& opt = {}) {
  if (lb.size() != ub.size()) throw std::invalid_argument("bound vectors differ in length");
  if (!cost.empty() && cost.size() != lb.size())
    throw std::invalid_argument("cost vector has wrong length");
  for (std::size_t j = 0; j < lb.size(); ++j) {
    if (!std::isfinite(lb[j]) || !std::isfinite(ub[j]))
      throw std::invalid_argument("LP variables need finite bounds");
    if (lb[j] > ub[j]) return {Status::Infeasible, {}, 0, 0.0};
  }
  for (const auto& r : rows)
    for (const auto& t : r.terms)
      if (t.var >= lb.size()) throw std::invalid_argument("row references unknown variable");

  std::vector<double> rhs(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rhs[i] = rows[i].rhs;
  try {
    return detail::solve_once(rows, lb, ub, cost, rhs, opt);
  } catch (const LpError&) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      rhs[i] += opt.perturbation * (static_cast<double>(i % 7) - 3.0) / 3.0;
    try {
      return detail::solve_once(rows, lb, ub, cost, rhs, opt);
    } catch (const LpError& e) {
      throw LpError(std::string("LP breakdown after perturbed retry: ") + e.what());
    }
  }
}

/// Any feasible point, or Infeasible.
inline Result lp_relax(std::span<const Row> rows, std::span<const double> lb,
                       std::span<const double> ub, const Options& opt = {}) {
  return solve(rows, lb, ub, {}, opt);
}

}  // namespace esspm::lp
