#pragma once

// Brute-force support enumeration: for every candidate support solve the
// indifference system, then certify the candidate against every pure mutation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "esspm/analysis.hpp"
#include "esspm/game.hpp"

namespace esspm {

struct EsspmCertificate {
  MixedStrategy strategy;
  Support support;
  std::vector<ConditionOutcome> per_mutation;  // indexed by pure j; self entry skipped for pure x*

  /// Smallest margin over all mutations.
  double margin() const {
    double m = INFINITY;
    for (const auto& o : per_mutation) m = std::min(m, o.slack);
    return m;
  }
};

struct EnumOptions {
  std::size_t max_m = 20;
  bool largest_first = false;
};

struct EnumStats {
  std::size_t supports_visited = 0;
  std::size_t singular_skipped = 0;
};

namespace detail {

/// Solves M v = rhs in place by Gaussian elimination with partial pivoting;
/// false on a (numerically) singular matrix.
inline bool solve_dense(std::vector<double>& mat, std::vector<double>& rhs, std::size_t n) {
  double scale = 0.0;
  for (double v : mat) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-12 * std::max(scale, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(mat[i * n + k]) > std::abs(mat[p * n + k])) p = i;
    if (std::abs(mat[p * n + k]) <= tiny) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(mat[k * n + j], mat[p * n + j]);
      std::swap(rhs[k], rhs[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = mat[i * n + k] / mat[k * n + k];
      for (std::size_t j = k; j < n; ++j) mat[i * n + j] -= f * mat[k * n + j];
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= mat[k * n + j] * rhs[j];
    rhs[k] = s / mat[k * n + k];
  }
  return true;
}

enum class SupportSolve { Ok, Singular, Negative };

inline SupportSolve solve_support_impl(const GameMatrix& game, const Support& s,
                                       std::optional<MixedStrategy>& out) {
  const std::size_t m = game.size();
  const std::size_t n = s.size();
  const auto idx = s.indices();
  // unknowns: x_{idx[0..n)} and the common payoff v
  const std::size_t dim = n + 1;
  std::vector<double> mat(dim * dim, 0.0), rhs(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) mat[r * dim + c] = game(idx[r], idx[c]);
    mat[r * dim + n] = -1.0;
  }
  for (std::size_t c = 0; c < n; ++c) mat[n * dim + c] = 1.0;
  rhs[n] = 1.0;
  if (!solve_dense(mat, rhs, dim)) return SupportSolve::Singular;

  std::vector<double> p(m, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (!std::isfinite(rhs[c])) return SupportSolve::Singular;
    if (rhs[c] < -kSimplexTol) return SupportSolve::Negative;
    p[idx[c]] = rhs[c];
  }
  out = MixedStrategy::clamped(std::move(p));
  return SupportSolve::Ok;
}

}  // namespace detail

/// Equalizes the payoffs of the pure strategies in S against x, with x zero
/// off S. Empty on singular systems or when a weight comes out negative.
inline std::optional<MixedStrategy> solve_support(const GameMatrix& game, const Support& s,
                                                  const Tolerances& = {}) {
  std::optional<MixedStrategy> out;
  detail::solve_support_impl(game, s, out);
  return out;
}

/// Every ESSPM found by enumerating supports smallest-first (lexicographic
/// within a size), or largest-first when requested.
inline std::vector<EsspmCertificate> enumerate_esspm(const GameMatrix& game,
                                                     const Tolerances& tol = {},
                                                     const EnumOptions& opt = {},
                                                     EnumStats* stats = nullptr) {
  const std::size_t m = game.size();
  if (m > opt.max_m) throw std::invalid_argument("game too large for support enumeration");
  EnumStats local;
  std::vector<EsspmCertificate> found;

  auto visit = [&](const std::vector<std::size_t>& idx) {
    ++local.supports_visited;
    Support s(idx, m);
    if (idx.size() == 1) {
      const std::size_t i = idx.front();
      if (!is_pure_esspm(game, i, tol)) return;
      auto x = MixedStrategy::pure(m, i);
      std::vector<ConditionOutcome> per;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) per.push_back(check_conditions(game, x, j, tol));
      found.push_back({std::move(x), std::move(s), std::move(per)});
      return;
    }
    std::optional<MixedStrategy> x;
    auto status = detail::solve_support_impl(game, s, x);
    if (status == detail::SupportSolve::Singular) ++local.singular_skipped;
    if (!x) return;
    // a zero weight means the point belongs to a smaller support
    if (!(Support::of(*x) == s)) return;
    std::vector<ConditionOutcome> per;
    for (std::size_t j = 0; j < m; ++j) {
      per.push_back(check_conditions(game, *x, j, tol));
      if (per.back().tag == Condition::Fails) return;
    }
    found.push_back({std::move(*x), std::move(s), std::move(per)});
  };

  std::vector<std::size_t> sizes(m);
  for (std::size_t k = 0; k < m; ++k) sizes[k] = opt.largest_first ? m - k : k + 1;
  for (std::size_t size : sizes) {
    // lexicographic combinations of {0..m-1} choose size
    std::vector<std::size_t> idx(size);
    for (std::size_t k = 0; k < size; ++k) idx[k] = k;
    for (;;) {
      visit(idx);
      std::size_t k = size;
      while (k > 0 && idx[k - 1] == m - size + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t t = k; t < size; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  if (stats) *stats = local;
  return found;
}

}  // namespace esspm
