#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "report.hpp"
#include "servicerule/servicerule.hpp"

namespace servicerule::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kBadInput = 2,
  kUndefinedResult = 3,
};

/// Every flag of every subcommand; each command reads the ones it needs.
struct RunConfig {
  std::string command;
  std::string rule = "sr";
  int points_to_win = 2;
  int win_by = 1;
  std::string p;
  std::string q;
  std::string mode = "rational";
  std::string engine = "exact";
  std::string first_server = "A";
  std::uint64_t trials = 0;  // 0 = command default
  std::uint64_t seed = 1;
  int length_cap = 10'000;
  std::string grid;
  int k = 0;  // 0 = suite default
  int r = 8;
  std::string suite;
  std::string which = "all";
  std::string output_format;
  std::string output_path;
  std::string out_dir;
};

/// Input that fails validation after parsing; maps to exit code 2.
class BadInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Rational probability_flag(const std::string& name, const std::string& text) {
  if (text.empty()) throw BadInput("--" + name + " is required");
  Rational v;
  try {
    v = parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw BadInput("--" + name + ": " + e.what());
  }
  if (v < 0 || v > 1) throw BadInput("--" + name + " must lie in [0, 1]");
  return v;
}

inline Player player_flag(const std::string& text) {
  if (text == "A" || text == "a") return Player::A;
  if (text == "B" || text == "b") return Player::B;
  throw BadInput("--first-server must be A or B");
}

/// "--grid 0.05" (step) or "--grid 20" (divisions) -> number of divisions.
inline int grid_divisions(const std::string& text, int fallback) {
  if (text.empty()) return fallback;
  Rational v;
  try {
    v = parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw BadInput(std::string("--grid: ") + e.what());
  }
  if (v <= 0) throw BadInput("--grid must be positive");
  const Rational divisions = v < 1 ? Rational(1 / v) : v;
  if (divisions.get_den() != 1 || divisions < 2) {
    throw BadInput("--grid must be a step 1/N or a division count N, with N >= 2");
  }
  return static_cast<int>(divisions.get_num().get_si());
}

inline void emit(const Report& report, const std::string& format, std::ostream& out) {
  if (format == "json") {
    write_json(out, report);
  } else if (format == "csv") {
    write_csv(out, report);
  } else {
    write_text(out, report);
  }
}

/// Writes to `path` when given, else to `out`.
inline void emit_to(const Report& report, const std::string& format, const std::string& path,
                    std::ostream& out) {
  if (path.empty()) {
    emit(report, format, out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  emit(report, format, file);
}

inline std::string fraction(const Rational& v) { return v.get_str(); }

template <class T>
Cell value_cell(const T& v, int places = 3) {
  return Cell::number(v, places);
}

template <class T>
Row analyze_exact(const RuleKind& rule, const MatchFormat& format, const T& p, const T& q,
                  Player first_server) {
  const ServeModel<T> model(p, q);
  Row row{{"rule", Cell::text(rule.name())},
          {"points_to_win", Cell::integer(format.points_to_win)},
          {"win_by", Cell::integer(format.win_by)},
          {"p", value_cell(p)},
          {"q", value_cell(q)}};
  if (format.win_by == 1) {
    const auto a = analyze_win_by_one(rule, format, model, first_server);
    row.insert(row.end(), {{"pr_a", value_cell(a.pr_a_wins)},
                           {"pr_b", value_cell(a.pr_b_wins)},
                           {"expected_length", value_cell(a.expected_length)},
                           {"pr_tie", value_cell(a.pr_reach_tie_kk)}});
    return row;
  }
  if (rule.kind != RuleKind::Kind::kStandard && rule.kind != RuleKind::Kind::kCatchUp) {
    throw BadInput("exact Win-by-Two analysis covers SR and CR; use --engine montecarlo for " +
                   rule.name());
  }
  const auto a = analyze_win_by_two(rule, format, model, first_server);
  row.insert(row.end(), {{"pr_a_wb1", value_cell(a.win_by_one.pr_a_wins)},
                         {"pr_b_wb1", value_cell(a.win_by_one.pr_b_wins)},
                         {"qr_a", value_cell(a.qr_a)},
                         {"qr_b", value_cell(a.qr_b)},
                         {"pr_tie", value_cell(a.pr_tie)},
                         {"el_wb1", value_cell(a.el_wb1)},
                         {"el_wb2", value_cell(a.el_wb2)}});
  return row;
}

inline Report table1() {
  Report report{"tables", {}};
  const std::vector<std::pair<Rational, Rational>> samples = {
      {Rational(2, 3), Rational(2, 3)}, {Rational(3, 4), Rational(3, 4)}, {Rational(3, 5), Rational(1, 2)}};
  const MatchFormat best_of_3{2, 1};
  for (const RuleKind& rule : {RuleKind::standard(), RuleKind::catch_up(), RuleKind::trailing_ahead(),
                               RuleKind::trailing_behind()}) {
    const auto symbolic = analyze_symbolic(rule, best_of_3);
    for (const auto& [p, q] : samples) {
      const auto numeric = analyze_win_by_one(rule, best_of_3, ServeModel<Rational>(p, q));
      report.rows.push_back({{"rule", Cell::text(rule.name())},
                             {"pr_a_polynomial", Cell::text(symbolic.pr_a_wins.to_string())},
                             {"el_polynomial", Cell::text(symbolic.expected_length.to_string())},
                             {"p", Cell::text(fraction(p))},
                             {"q", Cell::text(fraction(q))},
                             {"pr_a", Cell::number(numeric.pr_a_wins)},
                             {"expected_length", Cell::number(numeric.expected_length)}});
    }
  }
  return report;
}

inline Cell deuce_win_cell(const RuleKind& rule, const Rational& p) {
  try {
    return Cell::number(solve_deuce(rule, p, p).first_server_wins(), 2);
  } catch (const UndefinedQuantity&) {
    return Cell::text("undefined");
  }
}

inline Cell deuce_length_cell(const RuleKind& rule, const Rational& p) {
  try {
    return Cell::number(deuce_expected_length(rule, p, p), 2);
  } catch (const DivergentQuantity&) {
    return Cell::text("inf");
  }
}

inline Report table2() {
  Report report{"tables", {}};
  for (const Rational& p : {Rational(0), Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3),
                            Rational(3, 4), Rational(1)}) {
    report.rows.push_back({{"p", Cell::text(fraction(p))},
                           {"pr_sr", deuce_win_cell(RuleKind::standard(), p)},
                           {"pr_cr", deuce_win_cell(RuleKind::catch_up(), p)},
                           {"el_sr", deuce_length_cell(RuleKind::standard(), p)},
                           {"el_cr", deuce_length_cell(RuleKind::catch_up(), p)}});
  }
  return report;
}

inline Report table3() {
  Report report{"tables", {}};
  for (const Rational& p : {Rational(2, 3), Rational(3, 4)}) {
    for (const RuleKind& rule : {RuleKind::standard(), RuleKind::catch_up()}) {
      for (int m : {3, 11, 21}) {
        const auto a = analyze_win_by_two(rule, MatchFormat::best_of(m, 2), ServeModel<Rational>(p, p));
        report.rows.push_back({{"p", Cell::text(fraction(p))},
                               {"rule", Cell::text(rule.name())},
                               {"m", Cell::integer(m)},
                               {"pr_a", Cell::number(a.win_by_one.pr_a_wins)},
                               {"pr_b", Cell::number(a.win_by_one.pr_b_wins)},
                               {"qr_a", Cell::number(a.qr_a)},
                               {"qr_b", Cell::number(a.qr_b)},
                               {"pr_tie", Cell::number(a.pr_tie)},
                               {"el_wb1", Cell::number(a.el_wb1)},
                               {"el_wb2", Cell::number(a.el_wb2)}});
      }
    }
  }
  return report;
}

/// p = 0.01 .. 0.99 plus 1/3 and 2/3.
inline std::vector<Rational> figure_points() {
  std::set<Rational> points;
  for (int i = 1; i <= 99; ++i) {
    Rational v(i, 100);
    v.canonicalize();
    points.insert(v);
  }
  points.insert(Rational(1, 3));
  points.insert(Rational(2, 3));
  return {points.begin(), points.end()};
}

inline Report figure1() {
  Report report{"figures", {}};
  for (const auto& p : figure_points()) {
    report.rows.push_back({{"p", Cell::number(p, 6)},
                           {"pr_sr", Cell::number(solve_deuce(RuleKind::standard(), p, p).first_server_wins(), 6)},
                           {"pr_cr", Cell::number(solve_deuce(RuleKind::catch_up(), p, p).first_server_wins(), 6)}});
  }
  return report;
}

inline Report figure2() {
  Report report{"figures", {}};
  for (const auto& p : figure_points()) {
    report.rows.push_back({{"p", Cell::number(p, 6)},
                           {"el_sr", Cell::number(deuce_expected_length(RuleKind::standard(), p, p), 6)},
                           {"el_cr", Cell::number(deuce_expected_length(RuleKind::catch_up(), p, p), 6)}});
  }
  return report;
}

inline std::string format_or(const std::string& format, const std::string& fallback) {
  const std::string f = format.empty() ? fallback : format;
  if (f != "text" && f != "csv" && f != "json") throw BadInput("--format must be text, csv or json");
  return f;
}

inline void write_files(const std::vector<std::pair<std::string, Report>>& reports, const RunConfig& config,
                        std::ostream& out) {
  const std::string format = format_or(config.output_format, "csv");
  if (format == "text") throw BadInput("tables and figures are written as csv or json");
  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);
  for (const auto& [stem, report] : reports) {
    if (config.out_dir.empty()) {
      out << "# " << stem << '\n';
      emit(report, format, out);
      continue;
    }
    const auto path = std::filesystem::path(config.out_dir) / (stem + "." + format);
    emit_to(report, format, path.string(), out);
    out << "wrote " << path.string() << '\n';
  }
}

}  // namespace detail

inline int cmd_analyze(const RunConfig& config, std::ostream& out) {
  const RuleKind rule = parse_rule(config.rule);
  const MatchFormat format = MatchFormat{config.points_to_win, config.win_by}.validated();
  const Rational p = detail::probability_flag("p", config.p);
  const Rational q = detail::probability_flag("q", config.q);
  const Player first = detail::player_flag(config.first_server);
  const std::string output = detail::format_or(config.output_format, "text");
  if (first != Player::A && !rule.is_variable()) throw BadInput("--first-server applies to SR, CR, TRa, TRb");

  Report report{"analyze", {}};
  if (config.engine == "montecarlo") {
    const std::uint64_t trials = config.trials == 0 ? 1'000'000 : config.trials;
    const auto sim = simulate(rule, format, ServeModel<double>(p.get_d(), q.get_d()), trials, config.seed,
                              SimOptions{config.length_cap, worker_count(), first});
    report.rows.push_back({{"rule", Cell::text(rule.name())},
                           {"points_to_win", Cell::integer(format.points_to_win)},
                           {"win_by", Cell::integer(format.win_by)},
                           {"p", Cell::number(p)},
                           {"q", Cell::number(q)},
                           {"trials", Cell::integer(static_cast<long long>(sim.trials))},
                           {"seed", Cell::integer(static_cast<long long>(sim.seed))},
                           {"pr_a", Cell::number(sim.pr_a.value, 6)},
                           {"pr_a_se", Cell::number(sim.pr_a.standard_error, 6)},
                           {"mean_length", Cell::number(sim.mean_length.value, 6)},
                           {"mean_length_se", Cell::number(sim.mean_length.standard_error, 6)},
                           {"tie_rate", Cell::number(sim.tie_rate.value, 6)},
                           {"tie_rate_se", Cell::number(sim.tie_rate.standard_error, 6)},
                           {"cap_hits", Cell::integer(static_cast<long long>(sim.cap_hits))}});
  } else if (config.engine == "exact") {
    if (config.mode == "rational") {
      report.rows.push_back(detail::analyze_exact<Rational>(rule, format, p, q, first));
    } else if (config.mode == "float") {
      report.rows.push_back(detail::analyze_exact<double>(rule, format, p.get_d(), q.get_d(), first));
    } else {
      throw BadInput("--mode must be rational or float");
    }
  } else {
    throw BadInput("--engine must be exact or montecarlo");
  }
  detail::emit_to(report, output, config.output_path, out);
  return kOk;
}

inline int cmd_tables(const RunConfig& config, std::ostream& out) {
  std::vector<std::pair<std::string, Report>> reports;
  const std::string& w = config.which;
  if (w != "1" && w != "2" && w != "3" && w != "all") throw BadInput("--which must be 1, 2, 3 or all");
  if (w == "1" || w == "all") reports.emplace_back("table1", detail::table1());
  if (w == "2" || w == "all") reports.emplace_back("table2", detail::table2());
  if (w == "3" || w == "all") reports.emplace_back("table3", detail::table3());
  detail::write_files(reports, config, out);
  return kOk;
}

inline int cmd_figures(const RunConfig& config, std::ostream& out) {
  detail::write_files({{"figure1", detail::figure1()}, {"figure2", detail::figure2()}}, config, out);
  return kOk;
}

inline int cmd_scan(const RunConfig& config, std::ostream& out) {
  const RuleKind rule = parse_rule(config.rule);
  const int k = config.k == 0 ? 1 : config.k;
  const int divisions = detail::grid_divisions(config.grid, 20);
  Report report{"scan", {}};
  for (const auto& cell : vulnerability_region_scan(rule, k, divisions)) {
    report.rows.push_back({{"p", Cell::number(cell.p)},
                           {"q", Cell::number(cell.q)},
                           {"vulnerable_a", Cell::integer(cell.vulnerable_for_a ? 1 : 0)},
                           {"vulnerable_b", Cell::integer(cell.vulnerable_for_b ? 1 : 0)}});
  }
  detail::emit_to(report, detail::format_or(config.output_format, "csv"), config.output_path, out);
  return kOk;
}

inline int cmd_verify(const RunConfig& config, std::ostream& out) {
  verify::SuiteResult result;
  const std::string& s = config.suite;
  if (s == "theorem1") {
    result = verify::theorem1(config.k == 0 ? 8 : config.k);
  } else if (s == "theorem2") {
    result = verify::theorem2(config.k == 0 ? 5 : config.k, detail::grid_divisions(config.grid, 20));
  } else if (s == "theorem3") {
    result = verify::theorem3(parse_rule(config.rule.empty() ? "trb" : config.rule),
                              config.k == 0 ? 1 : config.k, detail::grid_divisions(config.grid, 20));
  } else if (s == "schedules") {
    result = verify::schedules(config.k == 0 ? 4 : config.k, detail::grid_divisions(config.grid, 10));
  } else if (s == "lemma1") {
    result = verify::lemma1(config.r);
  } else if (s == "mc") {
    result = verify::montecarlo(config.trials == 0 ? 100'000 : config.trials, config.seed);
  } else {
    throw BadInput("unknown suite '" + s + "' (theorem1, theorem2, theorem3, schedules, lemma1, mc)");
  }

  const std::string format = detail::format_or(config.output_format, "text");
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["command"] = "verify";
    doc["suite"] = result.name;
    doc["passed"] = result.passed;
    doc["checks"] = result.checks;
    doc["notes"] = result.notes;
    doc["failures"] = result.failures;
    out << doc.dump(2) << '\n';
  } else {
    out << (result.passed ? "PASS " : "FAIL ") << result.name << " (" << result.checks << " checks)\n";
    for (const auto& note : result.notes) out << "  " << note << '\n';
    for (const auto& failure : result.failures) out << "  counterexample: " << failure << '\n';
  }
  return result.passed ? kOk : kVerificationFailed;
}

/// Parses `args` (args[0] is the program name) and runs the chosen command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact analysis of serving rules in two-player service sports"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_output = [&](CLI::App* sub, const std::string& formats) {
    sub->add_option("--format", config.output_format, "Output format: " + formats);
    sub->add_option("--output", config.output_path, "Write to this file instead of stdout");
  };
  auto add_game = [&](CLI::App* sub) {
    sub->add_option("--rule", config.rule, "sr, cr, tra, trb, ar or fixed:<pattern>");
    sub->add_option("--points-to-win", config.points_to_win, "Points needed to win (k+1)");
    sub->add_option("--win-by", config.win_by, "Required margin: 1 or 2");
    sub->add_option("--p", config.p, "A's serve win probability (a/b or decimal)");
    sub->add_option("--q", config.q, "B's serve win probability (a/b or decimal)");
  };

  auto* analyze = app.add_subcommand("analyze", "Win probabilities and expected length of one game");
  add_game(analyze);
  analyze->add_option("--mode", config.mode, "rational (exact) or float");
  analyze->add_option("--engine", config.engine, "exact or montecarlo");
  analyze->add_option("--first-server", config.first_server, "A or B");
  analyze->add_option("--trials", config.trials, "Monte Carlo trials");
  analyze->add_option("--seed", config.seed, "Monte Carlo seed");
  analyze->add_option("--cap", config.length_cap, "Monte Carlo length cap per game");
  add_output(analyze, "text, csv, json");

  auto* tables = app.add_subcommand("tables", "Reproduce the Best-of-3, deuce and Win-by-Two tables");
  tables->add_option("--which", config.which, "1, 2, 3 or all");
  tables->add_option("--out-dir", config.out_dir, "Directory for tableN.csv / tableN.json");
  tables->add_option("--format", config.output_format, "csv or json");

  auto* figures = app.add_subcommand("figures", "Deuce win probability and length curves");
  figures->add_option("--out-dir", config.out_dir, "Directory for figure1/figure2 files");
  figures->add_option("--format", config.output_format, "csv or json");

  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", config.suite, "theorem1, theorem2, theorem3, schedules, lemma1, mc")
      ->required();
  verify_cmd->add_option("--k", config.k, "k (Best-of-(2k+1)); upper bound for range suites");
  verify_cmd->add_option("--grid", config.grid, "Grid step (0.05) or division count (20)");
  verify_cmd->add_option("--rule", config.rule, "Rule for theorem3");
  verify_cmd->add_option("--r", config.r, "Largest dot count for lemma1");
  verify_cmd->add_option("--trials", config.trials, "Trials per configuration for mc");
  verify_cmd->add_option("--seed", config.seed, "Seed for mc");
  verify_cmd->add_option("--format", config.output_format, "text or json");

  auto* scan = app.add_subcommand("scan", "Strategy-proofness verdicts over a (p, q) grid");
  scan->add_option("--rule", config.rule, "sr, cr, tra or trb");
  scan->add_option("--k", config.k, "k (Best-of-(2k+1))");
  scan->add_option("--grid", config.grid, "Grid step (0.05) or division count (20)");
  add_output(scan, "csv, json");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(config, out);
    if (tables->parsed()) return cmd_tables(config, out);
    if (figures->parsed()) return cmd_figures(config, out);
    if (verify_cmd->parsed()) return cmd_verify(config, out);
    if (scan->parsed()) return cmd_scan(config, out);
  } catch (const UndefinedQuantity& e) {
    err << "undefined: " << e.what()
        << " (degenerate tiebreak corner: SR at p = q = 0, CR at p = q = 1)\n";
    return kUndefinedResult;
  } catch (const DivergentQuantity& e) {
    err << "divergent: " << e.what() << '\n';
    return kUndefinedResult;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace servicerule::cli
