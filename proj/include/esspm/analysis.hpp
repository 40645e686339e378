#pragma once

// Stability conditions against pure mutations, the pure-strategy
// preprocessing pass, invasion tests and solution-quality metrics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "esspm/game.hpp"

namespace esspm {

struct Tolerances {
  double delta = 1e-7;  // equality detection
  double eps = 1e-5;    // strict-inequality margin used by the MILP
};

enum class Condition { FirstStrict, SecondEqualityBranch, Fails };

/// Tag plus the margin by which the governing inequality holds (negative on Fails).
struct ConditionOutcome {
  Condition tag;
  double slack;
};

namespace detail {

// Classify a mutant with incumbent payoff vs_incumbent = u1(x, x*), own payoff
// vs_self = u1(x, x), against resident values u1(x*, x*) and u1(x*, x).
inline ConditionOutcome classify(double vs_incumbent, double resident, double vs_self,
                                 double resident_vs_mutant, double delta) {
  const double diff = vs_incumbent - resident;
  if (diff < -delta) return {Condition::FirstStrict, -diff};
  if (std::abs(diff) <= delta) {
    const double second = resident_vs_mutant - vs_self;
    if (second > 0.0) return {Condition::SecondEqualityBranch, second};
    return {Condition::Fails, second};
  }
  return {Condition::Fails, -diff};
}

}  // namespace detail

/// Classify pure mutation j against resident xstar.
inline ConditionOutcome check_conditions(const GameMatrix& game, const MixedStrategy& xstar,
                                         std::size_t j, const Tolerances& tol = {}) {
  if (j >= game.size()) throw std::out_of_range("mutation index out of range");
  const auto x = xstar.probs();
  return detail::classify(row_payoff(game, j, x), utility(game, x, x), game(j, j),
                          column_payoff(game, x, j), tol.delta);
}

/// True when pure strategy i satisfies the conditions against every other
/// pure mutation. The self-comparison j == i is skipped.
inline bool is_pure_esspm(const GameMatrix& game, std::size_t i, const Tolerances& tol = {}) {
  for (std::size_t j = 0; j < game.size(); ++j) {
    if (j == i) continue;
    auto out = detail::classify(game(j, i), game(i, i), game(j, j), game(i, j), tol.delta);
    if (out.tag == Condition::Fails) return false;
  }
  return true;
}

/// Lowest-index pure ESSPM, if any.
inline std::optional<std::size_t> find_pure_esspm(const GameMatrix& game,
                                                  const Tolerances& tol = {}) {
  for (std::size_t i = 0; i < game.size(); ++i)
    if (is_pure_esspm(game, i, tol)) return i;
  return std::nullopt;
}

/// Exhaustive variant: every pure ESSPM in increasing index order.
inline std::vector<std::size_t> find_all_pure_esspm(const GameMatrix& game,
                                                    const Tolerances& tol = {}) {
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < game.size(); ++i)
    if (is_pure_esspm(game, i, tol)) found.push_back(i);
  return found;
}

enum class InvasionResult { Resisted, Invades };

/// Stability of xstar against an arbitrary, possibly mixed, mutant.
inline InvasionResult invasion_test(const GameMatrix& game, const MixedStrategy& xstar,
                                    const MixedStrategy& mutant, const Tolerances& tol = {}) {
  if (mutant.size() != game.size() || xstar.size() != game.size())
    throw std::invalid_argument("dimension mismatch");
  if (mutant.linf_distance(xstar) <= tol.delta)
    throw std::invalid_argument("mutant coincides with the resident strategy");
  const auto x = xstar.probs();
  const auto y = mutant.probs();
  auto out = detail::classify(utility(game, y, x), utility(game, x, x), utility(game, y, y),
                              utility(game, x, y), tol.delta);
  return out.tag == Condition::Fails ? InvasionResult::Invades : InvasionResult::Resisted;
}

/// Largest violation of the stability conditions over pure mutations.
/// Expects a game normalized to [0,1] so the value is in normalized units.
inline double approximation_error(const GameMatrix& game, const MixedStrategy& xstar,
                                  const Tolerances& tol = {}) {
  const auto x = xstar.probs();
  const double resident = utility(game, x, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < game.size(); ++i) {
    const double diff = row_payoff(game, i, x) - resident;
    double theta = 0.0;
    if (diff > tol.delta)
      theta = diff;
    else if (diff > -tol.delta)
      // An unmet second condition is the only violation counted here.
      theta = std::max(0.0, game(i, i) - column_payoff(game, x, i));
    worst = std::max(worst, theta);
  }
  return worst;
}

/// Best gain from a unilateral pure deviation when both players use xstar.
inline double nash_epsilon(const GameMatrix& game, const MixedStrategy& xstar) {
  const auto x = xstar.probs();
  const double resident = utility(game, x, x);
  double best = 0.0;
  for (std::size_t j = 0; j < game.size(); ++j)
    best = std::max(best, row_payoff(game, j, x) - resident);
  return best;
}

}  // namespace esspm
