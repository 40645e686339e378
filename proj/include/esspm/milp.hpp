#pragma once

// Depth-first branch-and-bound for ModelIR feasibility problems.
//
// Node relaxations drop integrality and SOS2 adjacency and are solved by the
// simplex in lp.hpp. A node whose relaxation is infeasible is pruned. Otherwise
// the most fractional binary is branched first (y = 0 child explored before
// y = 1); once every binary is integral, the SOS2 set with the largest
// adjacency violation is split at an interior breakpoint. The first leaf that
// passes independent verification is returned.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "esspm/game.hpp"
#include "esspm/lp.hpp"
#include "esspm/model.hpp"

namespace esspm {

inline constexpr double kRowTol = 1e-7;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kSosNonzeroTol = 1e-7;

enum class SolveStatus { Feasible, Infeasible, LimitReached };

struct SolveLimits {
  std::size_t max_nodes = 200000;
  std::int64_t max_time_ms = 60000;
};

struct SolveStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  std::size_t rejected_leaves = 0;  // leaves that failed re-verification
  double wall_ms = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<std::vector<double>> assignment;
  SolveStats stats;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Verification {
  double max_violation = 0.0;  // rows and bounds
  double max_fractionality = 0.0;
  bool sos2_ok = true;

  bool ok() const {
    return max_violation <= kRowTol && max_fractionality <= kIntegralityTol && sos2_ok;
  }
};

namespace detail {

inline std::vector<lp::Row> to_rows(const ModelIR& model) {
  std::vector<lp::Row> rows;
  rows.reserve(model.constraints().size());
  for (const auto& c : model.constraints()) rows.push_back({c.terms, c.rel, c.rhs});
  return rows;
}

/// Positions of members above the nonzero threshold.
inline std::vector<std::size_t> sos_nonzeros(const Sos2Set& set, std::span<const double> x) {
  std::vector<std::size_t> nz;
  for (std::size_t r = 0; r < set.members.size(); ++r)
    if (std::abs(x[set.members[r]]) > kSosNonzeroTol) nz.push_back(r);
  return nz;
}

inline bool sos_adjacent(const std::vector<std::size_t>& nz) {
  return nz.size() <= 1 || (nz.size() == 2 && nz[1] == nz[0] + 1);
}

}  // namespace detail

/// Checks an assignment against the model directly: rows, bounds, binaries and
/// SOS2 adjacency. Shares no state with the simplex.
inline Verification verify_assignment(const ModelIR& model, std::span<const double> x) {
  const auto& vars = model.variables();
  if (x.size() != vars.size()) throw std::invalid_argument("assignment has wrong length");
  Verification v;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    v.max_violation = std::max({v.max_violation, vars[j].lb - x[j], x[j] - vars[j].ub});
    if (vars[j].binary)
      v.max_fractionality = std::max(v.max_fractionality, std::abs(x[j] - std::round(x[j])));
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    const double viol = c.rel == Relation::Le   ? lhs - c.rhs
                        : c.rel == Relation::Ge ? c.rhs - lhs
                                                : std::abs(lhs - c.rhs);
    v.max_violation = std::max(v.max_violation, viol);
  }
  for (const auto& s : model.sos2_sets())
    if (!detail::sos_adjacent(detail::sos_nonzeros(s, x))) v.sos2_ok = false;
  return v;
}

namespace detail {

struct Node {
  std::vector<double> lb, ub;
};

class BranchAndBound {
 public:
  BranchAndBound(const ModelIR& model, const SolveLimits& limits)
      : model_(model), limits_(limits), rows_(to_rows(model)) {
    const auto& meta = model.meta();
    if (!meta.correction_vars.empty()) {
      polish_cost_.assign(model.variables().size(), 0.0);
      for (auto v : meta.correction_vars) polish_cost_[v] = 1.0;
    }
  }

  SolveResult run() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    std::vector<Node> stack;
    {
      Node root;
      for (const auto& v : model_.variables()) {
        root.lb.push_back(v.lb);
        root.ub.push_back(v.ub);
      }
      stack.push_back(std::move(root));
    }
    auto elapsed_ms = [&] {
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
    };

    res.status = SolveStatus::Infeasible;
    while (!stack.empty()) {
      if (res.stats.nodes >= limits_.max_nodes ||
          elapsed_ms() >= static_cast<double>(limits_.max_time_ms)) {
        res.status = SolveStatus::LimitReached;
        break;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      ++res.stats.nodes;

      lp::Result lpres;
      try {
        lpres = lp::lp_relax(rows_, node.lb, node.ub);
      } catch (const lp::LpError& e) {
        throw SolverError(e.what());
      }
      res.stats.lp_iterations += lpres.iterations;
      if (lpres.status == lp::Status::Infeasible) continue;
      const auto& x = lpres.x;

      if (auto b = most_fractional_binary(x, node)) {
        Node one = node;
        one.lb[*b] = 1.0;
        node.ub[*b] = 0.0;
        stack.push_back(std::move(one));
        stack.push_back(std::move(node));
        continue;
      }
      if (branch_sos(x, node, stack)) continue;

      auto leaf = finish_leaf(x, node, res.stats);
      if (leaf) {
        res.status = SolveStatus::Feasible;
        res.assignment = std::move(leaf);
        break;
      }
      ++res.stats.rejected_leaves;
    }
    res.stats.wall_ms = elapsed_ms();
    return res;
  }

 private:
  std::optional<std::size_t> most_fractional_binary(const std::vector<double>& x,
                                                    const Node& node) const {
    std::optional<std::size_t> pick;
    double best = kIntegralityTol;
    const auto& vars = model_.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (!vars[j].binary || node.lb[j] == node.ub[j]) continue;
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > best) {
        best = frac;
        pick = j;
      }
    }
    return pick;
  }

  // Splits the most violated SOS2 set; false when all sets are adjacent.
  bool branch_sos(const std::vector<double>& x, Node& node, std::vector<Node>& stack) const {
    const auto& sets = model_.sos2_sets();
    std::size_t pick = sets.size();
    double worst = 0.0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto nz = sos_nonzeros(sets[s], x);
      if (sos_adjacent(nz)) continue;
      double total = 0.0, pair = 0.0;
      const auto& mem = sets[s].members;
      for (std::size_t r = 0; r < mem.size(); ++r) {
        total += x[mem[r]];
        if (r + 1 < mem.size()) pair = std::max(pair, x[mem[r]] + x[mem[r + 1]]);
      }
      const double viol = total - pair;
      if (pick == sets.size() || viol > worst) {
        worst = viol;
        pick = s;
      }
    }
    if (pick == sets.size()) return false;

    const auto& mem = sets[pick].members;
    const auto nz = sos_nonzeros(sets[pick], x);
    const std::size_t first = nz.front();
    const std::size_t last = nz.back();
    double wsum = 0.0, wpos = 0.0;
    for (auto r : nz) {
      wsum += x[mem[r]];
      wpos += x[mem[r]] * static_cast<double>(r);
    }
    auto split = static_cast<std::size_t>(std::lround(wpos / wsum));
    split = std::clamp(split, first + 1, last - 1);

    // left keeps members 0..split, right keeps split..end
    Node left = node;
    for (std::size_t r = split + 1; r < mem.size(); ++r) left.ub[mem[r]] = 0.0;
    for (std::size_t r = 0; r < split; ++r) node.ub[mem[r]] = 0.0;
    double left_mass = 0.0, right_mass = 0.0;
    for (std::size_t r = 0; r < mem.size(); ++r) {
      if (r < split) left_mass += x[mem[r]];
      if (r > split) right_mass += x[mem[r]];
    }
    // heavier side is explored first
    if (left_mass >= right_mass) {
      stack.push_back(std::move(node));
      stack.push_back(std::move(left));
    } else {
      stack.push_back(std::move(left));
      stack.push_back(std::move(node));
    }
    return true;
  }

  // Pins the leaf's binaries and SOS2 segments, minimizes the correction
  // variables inside that cell, and re-verifies the result.
  std::optional<std::vector<double>> finish_leaf(const std::vector<double>& x, const Node& node,
                                                 SolveStats& stats) const {
    std::vector<double> best = x;
    if (!polish_cost_.empty()) {
      Node cell = node;
      const auto& vars = model_.variables();
      for (std::size_t j = 0; j < vars.size(); ++j)
        if (vars[j].binary) cell.lb[j] = cell.ub[j] = std::round(x[j]);
      for (const auto& set : model_.sos2_sets()) {
        const auto nz = sos_nonzeros(set, x);
        std::size_t a = nz.empty() ? 0 : nz.front();
        if (nz.size() <= 1 && a + 1 == set.members.size()) --a;
        for (std::size_t r = 0; r < set.members.size(); ++r)
          if (r != a && r != a + 1) cell.ub[set.members[r]] = cell.lb[set.members[r]] = 0.0;
      }
      try {
        auto polished = lp::solve(rows_, cell.lb, cell.ub, polish_cost_);
        stats.lp_iterations += polished.iterations;
        if (polished.status == lp::Status::Optimal &&
            verify_assignment(model_, polished.x).ok())
          best = std::move(polished.x);
      } catch (const lp::LpError&) {
        // keep the unpolished point
      }
    }
    if (!verify_assignment(model_, best).ok()) return std::nullopt;
    return best;
  }

  const ModelIR& model_;
  SolveLimits limits_;
  std::vector<lp::Row> rows_;
  std::vector<double> polish_cost_;
};

}  // namespace detail

/// Searches for any assignment satisfying the model.
inline SolveResult solve(const ModelIR& model, const SolveLimits& limits = {}) {
  model.validate();
  if (limits.max_nodes == 0 || limits.max_time_ms <= 0)
    throw std::invalid_argument("solve limits must be positive");
  return detail::BranchAndBound(model, limits).run();
}

/// Reads x_0..x_{m-1} (the first m model variables) as a mixed strategy.
inline MixedStrategy extract_strategy(const SolveResult& result, std::size_t m) {
  if (result.status != SolveStatus::Feasible || !result.assignment)
    throw std::invalid_argument("no feasible assignment to extract from");
  const auto& a = *result.assignment;
  if (a.size() < m) throw std::invalid_argument("assignment shorter than strategy count");
  std::vector<double> p(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m));
  for (double v : p)
    if (v < -1e-6) throw std::invalid_argument("strategy component below -1e-6");
  return MixedStrategy::clamped(std::move(p), 1e-6);
}

}  // namespace esspm
