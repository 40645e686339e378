#pragma once

// Command-line front end: gen, solve, batch and export-lp subcommands.
// Exit codes: 0 success, 1 solver or I/O failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "esspm/pipeline.hpp"

namespace esspm {

namespace detail {

struct CliOptions {
  BatchConfig cfg;
  std::string out;
};

inline void add_game_flags(CLI::App* cmd, CliOptions& o) {
  static const std::map<std::string, GameClass> classes{
      {"uniform", GameClass::Uniform}, {"chicken", GameClass::Chicken},
      {"cancer", GameClass::Cancer},   {"mp", GameClass::Mp},
      {"rps", GameClass::Rps},         {"counterexample", GameClass::Counterexample},
      {"file", GameClass::File}};
  cmd->add_option("--class", o.cfg.game_class, "game class")
      ->transform(CLI::CheckedTransformer(classes, CLI::ignore_case));
  cmd->add_option("--m", o.cfg.m, "pure strategies (uniform class)")->check(CLI::Range(2, 64));
  cmd->add_option("--n", o.cfg.n_games, "number of games")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.cfg.seed, "base seed; game i uses seed + i");
  cmd->add_option("--game-file", o.cfg.game_file, "game in text format (implies --class file)");
}

inline void add_solver_flags(CLI::App* cmd, CliOptions& o) {
  static const std::map<std::string, SolverKind> solvers{
      {"milp", SolverKind::Milp}, {"enum", SolverKind::Enum}, {"both", SolverKind::Both}};
  static const std::map<std::string, ZCoupling> couplings{
      {"enclosure", ZCoupling::Enclosure}, {"interpolant", ZCoupling::Interpolant}};
  cmd->add_option("--k", o.cfg.k, "breakpoint segments per square")->check(CLI::Range(2, 1000));
  cmd->add_option("--eps", o.cfg.eps, "strict-inequality margin")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", o.cfg.delta, "equality precision")->check(CLI::PositiveNumber);
  cmd->add_option("--solver", o.cfg.solver, "milp | enum | both")
      ->transform(CLI::CheckedTransformer(solvers, CLI::ignore_case));
  cmd->add_option("--max-nodes", o.cfg.limits.max_nodes, "branch-and-bound node budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-time-ms", o.cfg.limits.max_time_ms, "per-game time budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--z-coupling", o.cfg.coupling, "enclosure | interpolant")
      ->transform(CLI::CheckedTransformer(couplings, CLI::ignore_case));
  cmd->add_flag("!--no-support-link", o.cfg.link_support, "drop the x_j <= y_j rows");
}

inline std::ostream& open_out(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

inline void print_report(std::ostream& os, const SolveReport& rep) {
  os << "status: " << status_name(rep.outcome) << '\n' << "method: " << rep.method << '\n';
  if (rep.strategy) {
    os << "strategy: (";
    for (std::size_t i = 0; i < rep.strategy->size(); ++i)
      os << (i ? ", " : "") << detail::fmt("%.6f", (*rep.strategy)[i]);
    os << ")\n";
    os << "error: " << detail::fmt("%.3g", rep.error) << '\n';
    os << "nash_eps: " << detail::fmt("%.3g", rep.nash_eps) << '\n';
  }
  if (rep.enum_count) os << "enum_certificates: " << *rep.enum_count << '\n';
  if (rep.milp)
    os << "nodes: " << rep.milp->stats.nodes << " lp_iterations: " << rep.milp->stats.lp_iterations
       << '\n';
  if (rep.disagreement) os << "disagreement: 1\n";
  os << "runtime_ms: " << detail::fmt("%.3f", rep.runtime_ms) << '\n';
}

}  // namespace detail

inline int cli_main(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Evolutionarily stable strategies against pure mutations"};
  app.require_subcommand(1);
  detail::CliOptions o;

  auto* gen = app.add_subcommand("gen", "write generated games in text format");
  detail::add_game_flags(gen, o);
  gen->add_option("--out", o.out, "output file (n = 1) or directory (n > 1); default stdout");

  auto* solve_cmd = app.add_subcommand("solve", "solve one game");
  detail::add_game_flags(solve_cmd, o);
  detail::add_solver_flags(solve_cmd, o);

  auto* batch = app.add_subcommand("batch", "solve a generated batch and write per-game CSV");
  detail::add_game_flags(batch, o);
  detail::add_solver_flags(batch, o);
  batch->add_option("--out", o.out, "CSV output path");

  auto* lp_cmd = app.add_subcommand("export-lp", "write the feasibility model in LP format");
  detail::add_game_flags(lp_cmd, o);
  detail::add_solver_flags(lp_cmd, o);
  lp_cmd->add_option("--out", o.out, "LP output path; default stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (!o.cfg.game_file.empty()) o.cfg.game_class = GameClass::File;
    o.cfg.validate();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      if (o.cfg.n_games == 1) {
        std::ofstream f;
        detail::open_out(o.out, f, out) << write_game(make_game(o.cfg, 0));
        return 0;
      }
      if (o.out.empty()) {
        err << "error: gen with --n > 1 needs --out <directory>\n";
        return 2;
      }
      std::filesystem::create_directories(o.out);
      for (std::size_t i = 0; i < o.cfg.n_games; ++i) {
        const auto path = std::filesystem::path(o.out) / ("game_" + std::to_string(i) + ".txt");
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << write_game(make_game(o.cfg, i));
      }
      return 0;
    }
    if (solve_cmd->parsed()) {
      detail::print_report(out, solve_one(make_game(o.cfg, 0), o.cfg));
      return 0;
    }
    if (batch->parsed()) {
      o.cfg.out_path = o.out;
      auto res = run_batch(o.cfg);
      if (o.out.empty()) write_csv(out, res.rows);
      out << format_summary(res.stats);
      return 0;
    }
    if (lp_cmd->parsed()) {
      const auto model = build_model(normalize(make_game(o.cfg, 0)), o.cfg.build_params());
      std::ofstream f;
      detail::open_out(o.out, f, out) << export_lp(model);
      return 0;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(std::move(args));
}

}  // namespace esspm
