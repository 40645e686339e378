#pragma once

// Fixed textbook games and seeded random game classes.
//
// Randomness comes from std::mt19937_64 seeded directly with the 64-bit seed;
// a draw in [0,1) takes the top 53 bits of one engine output. Both steps are
// fully specified, so a seed reproduces the same game on any platform.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "esspm/game.hpp"

namespace esspm {

using RngSeed = std::uint64_t;

class UnitRng {
 public:
  explicit UnitRng(RngSeed seed) : engine_(seed) {}
  /// Uniform on [0,1).
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Hawk/Dove style game; strategy 0 is Dove, 1 is Hawk.
inline GameMatrix mutation_population() { return {{4, 2}, {8, 1}}; }

/// Strategy A (index 0) resists B and C individually but not their even mix.
inline GameMatrix counterexample_game() { return {{2, 1, 1}, {2, 0, 4}, {2, 4, 0}}; }

/// Rock, Paper, Scissors with win 1, loss 0, tie 2/3.
inline GameMatrix rock_paper_scissors() {
  constexpr double t = 2.0 / 3.0;
  return {{t, 0, 1}, {1, t, 0}, {0, 1, t}};
}

inline GameMatrix uniform_random(std::size_t m, RngSeed seed) {
  if (m < 2) throw std::invalid_argument("uniform_random needs m >= 2");
  UnitRng rng(seed);
  std::vector<double> a(m * m);
  for (double& v : a) v = rng.next();
  return {m, std::move(a)};
}

/// 2x2 game with a21 > a11 > a12 > a22, built from four sorted uniform draws.
inline GameMatrix chicken(RngSeed seed) {
  UnitRng rng(seed);
  std::array<double, 4> d{};
  for (;;) {
    for (double& v : d) v = rng.next();
    std::sort(d.begin(), d.end(), std::greater<>());
    if (d[0] > d[1] && d[1] > d[2] && d[2] > d[3]) break;
  }
  return {{d[1], d[2]}, {d[0], d[3]}};
}

struct CancerParams {
  double a = 0;  // cost of producing angiogenesis factors
  double b = 0;  // cost of producing cytotoxin
  double c = 0;  // cost of interaction with cytotoxin
  double d = 0;  // resource benefit when interacting with A+
  double e = 0;  // exploitation benefit for C when cytotoxin damages others
  double f = 0;  // synergistic benefit when two A+ cells interact
  double g = 0;  // reproductive advantage of P

  void validate() const {
    for (double v : {a, b, c, d, e, f, g})
      if (!(v >= 0.0)) throw std::invalid_argument("cancer parameters must be nonnegative");
    if (c > 1.0) throw std::invalid_argument("cancer parameter c must be at most 1");
  }

  friend bool operator==(const CancerParams&, const CancerParams&) = default;
};

/// Four phenotypes in order A-, A+, P, C.
inline GameMatrix cancer_game(const CancerParams& p) {
  p.validate();
  const auto& [a, b, c, d, e, f, g] = p;
  return {
      {1, 1 + d, 1, 1 - c},
      {1 - a + d, 1 - a + d + f, 1 - a + d, 1 - c - a + d},
      {1 + g, 1 + d + g, 1 + g, (1 + g) * (1 - c)},
      {1 - b + c, 1 - b + d + e, 1 - b + e, 1 - b},
  };
}

/// Seven independent draws on [0, 0.5], in the order a..g.
inline CancerParams random_cancer_params(RngSeed seed) {
  UnitRng rng(seed);
  CancerParams p;
  for (double* v : {&p.a, &p.b, &p.c, &p.d, &p.e, &p.f, &p.g}) *v = 0.5 * rng.next();
  return p;
}

}  // namespace esspm
