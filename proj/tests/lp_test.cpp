#include <gtest/gtest.h>

#include <random>

#include "esspm/generators.hpp"
#include "esspm/lp.hpp"
#include "esspm/milp.hpp"

using namespace esspm;
using lp::Row;

TEST(Lp, SimpleFeasible) {
  std::vector<Row> rows{{{{0, 1}, {1, 1}}, Relation::Eq, 1}};
  std::vector<double> lb{0, 0}, ub{1, 1};
  auto r = lp::lp_relax(rows, lb, ub);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_LE(lp::max_violation(rows, lb, ub, r.x), 1e-9);
}

TEST(Lp, SimpleInfeasible) {
  std::vector<Row> rows{{{{0, 1}, {1, 1}}, Relation::Eq, 1}};
  std::vector<double> lb{0.6, 0.6}, ub{1, 1};
  EXPECT_EQ(lp::lp_relax(rows, lb, ub).status, lp::Status::Infeasible);
  std::vector<double> lb2{0, 0}, ub2{-1, 1};
  EXPECT_EQ(lp::lp_relax(rows, lb2, ub2).status, lp::Status::Infeasible);
}

TEST(Lp, GreaterEqualRows) {
  // x + 2y >= 3, x - y >= 0 on [0,2]^2
  std::vector<Row> rows{{{{0, 1}, {1, 2}}, Relation::Ge, 3}, {{{0, 1}, {1, -1}}, Relation::Ge, 0}};
  std::vector<double> lb{0, 0}, ub{2, 2};
  auto r = lp::lp_relax(rows, lb, ub);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_LE(lp::max_violation(rows, lb, ub, r.x), 1e-9);
}

TEST(Lp, RejectsInfiniteBounds) {
  std::vector<Row> rows;
  std::vector<double> lb{0}, ub{INFINITY};
  EXPECT_THROW(lp::lp_relax(rows, lb, ub), std::invalid_argument);
}

namespace {

// Minimum of c.x over {A x <= b, lb <= x <= ub} in two variables by
// enumerating every pairwise intersection of the boundary lines.
std::optional<double> brute_force_2d(const std::vector<std::array<double, 3>>& halfplanes,
                                     const std::array<double, 2>& c) {
  std::optional<double> best;
  for (std::size_t i = 0; i < halfplanes.size(); ++i)
    for (std::size_t j = i + 1; j < halfplanes.size(); ++j) {
      const auto& p = halfplanes[i];
      const auto& q = halfplanes[j];
      const double det = p[0] * q[1] - p[1] * q[0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (p[2] * q[1] - p[1] * q[2]) / det;
      const double y = (p[0] * q[2] - p[2] * q[0]) / det;
      bool ok = true;
      for (const auto& h : halfplanes) ok = ok && h[0] * x + h[1] * y <= h[2] + 1e-9;
      if (!ok) continue;
      const double v = c[0] * x + c[1] * y;
      if (!best || v < *best) best = v;
    }
  return best;
}

}  // namespace

TEST(Lp, MatchesVertexEnumerationIn2d) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    std::vector<std::array<double, 3>> hp{{1, 0, 1}, {-1, 0, 1}, {0, 1, 1}, {0, -1, 1}};
    std::vector<Row> rows;
    const int n = 1 + t % 5;
    for (int i = 0; i < n; ++i) {
      const double a = u(rng), b = u(rng), r = 0.6 * u(rng);
      hp.push_back({a, b, r});
      rows.push_back({{{0, a}, {1, b}}, Relation::Le, r});
    }
    std::array<double, 2> c{u(rng), u(rng)};
    std::vector<double> lb{-1, -1}, ub{1, 1}, cost{c[0], c[1]};
    auto expect = brute_force_2d(hp, c);
    auto got = lp::solve(rows, lb, ub, cost);
    if (!expect) {
      ++infeasible;
      EXPECT_EQ(got.status, lp::Status::Infeasible) << t;
      continue;
    }
    ++feasible;
    ASSERT_EQ(got.status, lp::Status::Optimal) << t;
    EXPECT_LE(lp::max_violation(rows, lb, ub, got.x), 1e-8);
    EXPECT_NEAR(c[0] * got.x[0] + c[1] * got.x[1], *expect, 1e-7) << t;
  }
  EXPECT_GT(feasible, 100);
  EXPECT_GT(infeasible, 10);
}

TEST(Lp, RandomFeasibleSystemsWithPlantedPoint) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1), u01(0, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + t % 8, m = 2 + t % 7;
    std::vector<double> x0(n), lb(n, 0.0), ub(n, 1.0);
    for (double& v : x0) v = u01(rng);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < m; ++i) {
      Row r;
      double lhs = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (u01(rng) < 0.6) {
          const double a = u(rng);
          r.terms.push_back({j, a});
          lhs += a * x0[j];
        }
      const int kind = static_cast<int>(i % 3);
      r.rel = kind == 0 ? Relation::Eq : kind == 1 ? Relation::Le : Relation::Ge;
      r.rhs = kind == 0 ? lhs : kind == 1 ? lhs + 0.1 * u01(rng) : lhs - 0.1 * u01(rng);
      rows.push_back(std::move(r));
    }
    auto res = lp::lp_relax(rows, lb, ub);
    ASSERT_EQ(res.status, lp::Status::Optimal) << t;
    EXPECT_LE(lp::max_violation(rows, lb, ub, res.x), 1e-7) << t;
  }
}

TEST(Lp, DegenerateCyclingExample) {
  // Beale's classic cycling LP, bounded by a box; Bland fallback must finish.
  std::vector<Row> rows{
      {{{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, Relation::Le, 0},
      {{{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, Relation::Le, 0},
      {{{2, 1}}, Relation::Le, 1},
  };
  std::vector<double> lb(4, 0.0), ub(4, 100.0), cost{-0.75, 150, -0.02, 6};
  auto r = lp::solve(rows, lb, ub, cost);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, -0.05, 1e-9);
}

TEST(Lp, MutationPopulationRootRelaxation) {
  auto model = build_model(normalize(mutation_population()), {.k = 20});
  std::vector<Row> rows;
  for (const auto& c : model.constraints()) rows.push_back({c.terms, c.rel, c.rhs});
  std::vector<double> lb, ub;
  for (const auto& v : model.variables()) {
    lb.push_back(v.lb);
    ub.push_back(v.ub);
  }
  auto r = lp::lp_relax(rows, lb, ub);
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_LE(lp::max_violation(rows, lb, ub, r.x), 1e-7);
}
