#pragma once

// Single-game solve pipeline and batch experiment harness with CSV output.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "esspm/analysis.hpp"
#include "esspm/game.hpp"
#include "esspm/generators.hpp"
#include "esspm/milp.hpp"
#include "esspm/model.hpp"
#include "esspm/support_enum.hpp"

namespace esspm {

enum class GameClass { Uniform, Chicken, Cancer, Mp, Rps, Counterexample, File };
enum class SolverKind { Milp, Enum, Both };

inline std::string to_string(GameClass c) {
  switch (c) {
    case GameClass::Uniform: return "uniform";
    case GameClass::Chicken: return "chicken";
    case GameClass::Cancer: return "cancer";
    case GameClass::Mp: return "mp";
    case GameClass::Rps: return "rps";
    case GameClass::Counterexample: return "counterexample";
    case GameClass::File: return "file";
  }
  return "?";
}

inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Milp: return "milp";
    case SolverKind::Enum: return "enum";
    case SolverKind::Both: return "both";
  }
  return "?";
}

struct BatchConfig {
  GameClass game_class = GameClass::Uniform;
  std::size_t m = 2;
  std::size_t n_games = 1;
  RngSeed seed = 0;
  std::size_t k = 20;
  double eps = 1e-5;
  double delta = 1e-7;
  SolverKind solver = SolverKind::Milp;
  SolveLimits limits;
  std::string out_path;
  std::string game_file;
  ZCoupling coupling = ZCoupling::Enclosure;
  bool link_support = true;

  void validate() const {
    if (n_games < 1) throw std::invalid_argument("n_games must be at least 1");
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (!(eps > 0.0) || !(delta > 0.0)) throw std::invalid_argument("eps and delta must be > 0");
    if (limits.max_nodes == 0 || limits.max_time_ms <= 0)
      throw std::invalid_argument("solver limits must be positive");
    if (game_class == GameClass::Uniform && m < 2) throw std::invalid_argument("m must be >= 2");
    if (game_class == GameClass::File && game_file.empty())
      throw std::invalid_argument("class 'file' needs a game file");
  }

  Tolerances tolerances() const { return {delta, eps}; }

  BuildParams build_params() const {
    BuildParams p;
    p.k = k;
    p.eps = eps;
    p.coupling = coupling;
    p.link_support = link_support;
    return p;
  }
};

/// Game number `index` of the configured class; seeded with seed + index.
inline GameMatrix make_game(const BatchConfig& cfg, std::size_t index = 0) {
  const RngSeed s = cfg.seed + index;
  switch (cfg.game_class) {
    case GameClass::Uniform: return uniform_random(cfg.m, s);
    case GameClass::Chicken: return chicken(s);
    case GameClass::Cancer: return cancer_game(random_cancer_params(s));
    case GameClass::Mp: return mutation_population();
    case GameClass::Rps: return rock_paper_scissors();
    case GameClass::Counterexample: return counterexample_game();
    case GameClass::File: {
      std::ifstream in(cfg.game_file);
      if (!in) throw std::runtime_error("cannot open game file " + cfg.game_file);
      std::stringstream ss;
      ss << in.rdbuf();
      return read_game(ss.str());
    }
  }
  throw std::invalid_argument("unknown game class");
}

struct PureEsspm {
  std::size_t index;
};
struct MixedEsspm {
  MixedStrategy strategy;
  double error;
};
struct Infeasible {};
struct LimitReached {};

using EsspmOutcome = std::variant<PureEsspm, MixedEsspm, Infeasible, LimitReached>;

inline std::string status_name(const EsspmOutcome& o) {
  static constexpr const char* names[] = {"PURE", "OPTIMAL", "INFEASIBLE", "LIMIT"};
  return names[o.index()];
}

struct SolveReport {
  EsspmOutcome outcome = Infeasible{};
  std::string method;
  std::optional<MixedStrategy> strategy;  // resolved strategy for PURE and OPTIMAL
  double error = 0.0;                     // on the normalized game
  double nash_eps = 0.0;                  // on the normalized game
  double runtime_ms = 0.0;
  bool disagreement = false;
  std::optional<std::size_t> enum_count;  // certificates found by the oracle, if run
  std::optional<SolveResult> milp;        // raw branch-and-bound result, if run
};

/// Normalize, try the pure preprocessing pass, then the configured solver(s).
inline SolveReport solve_one(const GameMatrix& game, const BatchConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto tol = cfg.tolerances();
  const GameMatrix g = normalize(game);
  SolveReport rep;

  auto finish = [&] {
    if (rep.strategy) {
      rep.nash_eps = nash_epsilon(g, *rep.strategy);
      rep.error = approximation_error(g, *rep.strategy, tol);
    }
    rep.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return rep;
  };

  if (auto pure = find_pure_esspm(g, tol)) {
    rep.outcome = PureEsspm{*pure};
    rep.method = "pure";
    rep.strategy = MixedStrategy::pure(g.size(), *pure);
    return finish();
  }

  std::vector<EsspmCertificate> certs;
  if (cfg.solver != SolverKind::Milp) certs = enumerate_esspm(g, tol);

  if (cfg.solver == SolverKind::Enum) {
    rep.method = "enum";
    rep.enum_count = certs.size();
    if (certs.empty()) {
      rep.outcome = Infeasible{};
    } else {
      rep.strategy = certs.front().strategy;
      rep.outcome = MixedEsspm{certs.front().strategy, approximation_error(g, *rep.strategy, tol)};
    }
    return finish();
  }

  const ModelIR model = build_model(g, cfg.build_params());
  SolveResult res = solve(model, cfg.limits);
  rep.method = cfg.solver == SolverKind::Both ? "milp+enum" : "milp";
  switch (res.status) {
    case SolveStatus::Feasible: {
      rep.strategy = extract_strategy(res, g.size());
      rep.outcome = MixedEsspm{*rep.strategy, approximation_error(g, *rep.strategy, tol)};
      break;
    }
    case SolveStatus::Infeasible: rep.outcome = Infeasible{}; break;
    case SolveStatus::LimitReached: rep.outcome = LimitReached{}; break;
  }

  if (cfg.solver == SolverKind::Both) {
    rep.enum_count = certs.size();
    // An oracle certificate the model resolves reliably: margins clear eps plus
    // the worst-case linearization error.
    const double resolvable = cfg.eps + linearization_bound(model);
    bool robust = false;
    for (const auto& c : certs) robust = robust || c.margin() > resolvable;
    if (res.status == SolveStatus::Infeasible && robust) rep.disagreement = true;
    if (res.status == SolveStatus::Feasible && certs.empty()) rep.disagreement = true;
  }
  rep.milp = std::move(res);
  return finish();
}

// ---------------------------------------------------------------------------
// Batch harness

struct BatchStats {
  std::size_t n_pure = 0;
  std::size_t n_optimal = 0;
  std::size_t n_infeasible = 0;
  std::size_t n_limit = 0;
  std::size_t n_disagreement = 0;
  double mean_runtime_optimal_ms = 0.0;
  double mean_runtime_infeasible_ms = 0.0;
  double mean_error_optimal = 0.0;

  std::size_t total() const { return n_pure + n_optimal + n_infeasible + n_limit; }
};

struct CsvRow {
  std::size_t game_id;
  std::string game_class;
  std::size_t m;
  std::size_t k;
  double eps;
  double delta;
  std::string method;
  std::string status;
  std::size_t support_size;
  std::string strategy;
  double error;
  double nash_eps;
  double runtime_ms;
  bool disagreement;
};

inline constexpr const char* kCsvHeader =
    "game_id,class,m,k,eps,delta,method,status,support_size,strategy,error,nash_eps,"
    "runtime_ms,disagreement";

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

/// Semicolon-joined probabilities with 9 significant digits.
inline std::string format_strategy(const MixedStrategy& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ';';
    out += detail::fmt("%.9g", x[i]);
  }
  return out;
}

inline std::string to_csv_line(const CsvRow& r) {
  std::ostringstream os;
  os << r.game_id << ',' << r.game_class << ',' << r.m << ',' << r.k << ','
     << detail::fmt("%g", r.eps) << ',' << detail::fmt("%g", r.delta) << ',' << r.method << ','
     << r.status << ',' << r.support_size << ',' << r.strategy << ','
     << detail::fmt("%.9g", r.error) << ',' << detail::fmt("%.9g", r.nash_eps) << ','
     << detail::fmt("%.3f", r.runtime_ms) << ',' << (r.disagreement ? 1 : 0);
  return os.str();
}

inline CsvRow make_row(std::size_t id, const GameMatrix& game, const BatchConfig& cfg,
                       const SolveReport& rep) {
  CsvRow row{id,
             to_string(cfg.game_class),
             game.size(),
             cfg.k,
             cfg.eps,
             cfg.delta,
             rep.method,
             status_name(rep.outcome),
             rep.strategy ? Support::of(*rep.strategy).size() : 0,
             rep.strategy ? format_strategy(*rep.strategy) : std::string(),
             rep.error,
             rep.nash_eps,
             rep.runtime_ms,
             rep.disagreement};
  return row;
}

struct BatchResult {
  BatchStats stats;
  std::vector<CsvRow> rows;
};

inline BatchStats summarize(const std::vector<CsvRow>& rows) {
  BatchStats s;
  double t_opt = 0, t_inf = 0, e_opt = 0;
  for (const auto& r : rows) {
    if (r.status == "PURE") ++s.n_pure;
    if (r.status == "OPTIMAL") {
      ++s.n_optimal;
      t_opt += r.runtime_ms;
      e_opt += r.error;
    }
    if (r.status == "INFEASIBLE") {
      ++s.n_infeasible;
      t_inf += r.runtime_ms;
    }
    if (r.status == "LIMIT") ++s.n_limit;
    if (r.disagreement) ++s.n_disagreement;
  }
  if (s.n_optimal) {
    s.mean_runtime_optimal_ms = t_opt / static_cast<double>(s.n_optimal);
    s.mean_error_optimal = e_opt / static_cast<double>(s.n_optimal);
  }
  if (s.n_infeasible) s.mean_runtime_infeasible_ms = t_inf / static_cast<double>(s.n_infeasible);
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

/// Solves games seed+0 .. seed+n-1 in index order; writes the CSV to
/// cfg.out_path when it is set.
inline BatchResult run_batch(const BatchConfig& cfg) {
  cfg.validate();
  std::ofstream out;
  if (!cfg.out_path.empty()) {
    out.open(cfg.out_path);
    if (!out) throw std::runtime_error("cannot write " + cfg.out_path);
  }
  BatchResult result;
  result.rows.reserve(cfg.n_games);
  for (std::size_t i = 0; i < cfg.n_games; ++i) {
    const GameMatrix game = make_game(cfg, i);
    result.rows.push_back(make_row(i, game, cfg, solve_one(game, cfg)));
  }
  result.stats = summarize(result.rows);
  if (out.is_open()) {
    write_csv(out, result.rows);
    if (!out) throw std::runtime_error("failed writing " + cfg.out_path);
  }
  return result;
}

inline std::string format_summary(const BatchStats& s) {
  std::ostringstream os;
  os << "games=" << s.total() << " pure=" << s.n_pure << " optimal=" << s.n_optimal
     << " infeasible=" << s.n_infeasible << " limit=" << s.n_limit
     << " disagreement=" << s.n_disagreement << '\n'
     << "optimal_avg_ms=" << detail::fmt("%.3f", s.mean_runtime_optimal_ms)
     << " infeasible_avg_ms=" << detail::fmt("%.3f", s.mean_runtime_infeasible_ms)
     << " optimal_avg_error=" << detail::fmt("%.3g", s.mean_error_optimal) << '\n';
  return os.str();
}

}  // namespace esspm
