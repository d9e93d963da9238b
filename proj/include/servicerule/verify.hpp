#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "servicerule/core.hpp"
#include "servicerule/engine.hpp"
#include "servicerule/montecarlo.hpp"
#include "servicerule/schedules.hpp"
#include "servicerule/strategy.hpp"
#include "servicerule/tiebreak.hpp"

// Verification suites: each runs one module's oracles over a parameter range
// and reports pass/fail with the failing cases spelled out.

namespace servicerule::verify {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  std::vector<std::string> notes;     // informational lines
  std::vector<std::string> failures;  // counterexample dump

  void fail(std::string what) {
    passed = false;
    failures.push_back(std::move(what));
  }
};

/// Interior grid values 1/N .. (N-1)/N.
inline std::vector<Rational> grid_values(int divisions) {
  std::vector<Rational> out;
  for (int i = 1; i < divisions; ++i) {
    Rational v(i, divisions);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

inline SuiteResult theorem1(int k) {
  SuiteResult r{"theorem1", true, 0, {}, {}};
  const auto report = theorem1_oracle(k);
  r.checks = report.schedules_checked;
  r.notes.push_back(std::to_string(report.schedules_checked) + " schedules checked for k = " +
                    std::to_string(k));
  for (const auto& c : report.counterexamples) {
    r.fail("schedule " + c.schedule.to_string() + ": AR " + to_char(c.ar_winner) + ", SR " +
           to_char(c.sr_winner) + ", CR " + to_char(c.cr_winner));
  }
  if (report.mismatches > 0 && r.failures.empty()) r.fail("mismatching schedules found");
  return r;
}

/// sign(EL_CR - EL_SR) = sign(p + q - 1) for every k in 1..max_k on the grid.
inline SuiteResult theorem2(int max_k, int divisions) {
  SuiteResult r{"theorem2", true, 0, {}, {}};
  const auto values = grid_values(divisions);
  for (int k = 1; k <= max_k; ++k) {
    const MatchFormat format{k + 1, 1};
    for (const auto& p : values) {
      for (const auto& q : values) {
        const ServeModel<Rational> model(p, q);
        const Rational sr = analyze_win_by_one(RuleKind::standard(), format, model).expected_length;
        const Rational cr = analyze_win_by_one(RuleKind::catch_up(), format, model).expected_length;
        ++r.checks;
        if (sgn(cr - sr) != sgn(p + q - 1)) {
          r.fail("k=" + std::to_string(k) + " p=" + p.get_str() + " q=" + q.get_str() +
                 ": EL_CR - EL_SR = " + Rational(cr - sr).get_str());
        }
      }
    }
  }
  r.notes.push_back(std::to_string(r.checks) + " (k, p, q) points checked");
  return r;
}

/// Strategy verdicts on the grid. Expectations: SR and CR never vulnerable;
/// TRa not vulnerable where p + q > 1; TRb at k = 1 vulnerable exactly where
/// p^2 + q^2 > 1. Other TRb/TRa cells are reported without assertion.
inline SuiteResult theorem3(const RuleKind& rule, int k, int divisions) {
  SuiteResult r{"theorem3", true, 0, {}, {}};
  const auto cells = vulnerability_region_scan(rule, k, divisions);
  std::uint64_t vulnerable = 0;
  for (const auto& cell : cells) {
    ++r.checks;
    vulnerable += cell.vulnerable() ? 1 : 0;
    const std::string where = "p=" + cell.p.get_str() + " q=" + cell.q.get_str();
    switch (rule.kind) {
      case RuleKind::Kind::kStandard:
      case RuleKind::Kind::kCatchUp:
        if (cell.vulnerable()) r.fail(where + ": profitable deviation found");
        break;
      case RuleKind::Kind::kTrailingAhead:
        if (cell.p + cell.q > 1 && cell.vulnerable()) r.fail(where + ": profitable deviation with p+q>1");
        break;
      case RuleKind::Kind::kTrailingBehind:
        if (k == 1) {
          const bool outside = cell.p * cell.p + cell.q * cell.q > 1;
          if (outside != cell.vulnerable()) {
            r.fail(where + (outside ? ": expected vulnerable" : ": unexpected vulnerability"));
          }
        }
        break;
      default:
        break;
    }
  }
  r.notes.push_back(rule.name() + " k=" + std::to_string(k) + ": " + std::to_string(vulnerable) +
                    " of " + std::to_string(cells.size()) + " grid cells vulnerable");
  return r;
}

/// Schedule machinery against the exact engine for k in 1..max_k.
inline SuiteResult schedules(int max_k, int divisions) {
  SuiteResult r{"schedules", true, 0, {}, {}};
  const auto values = grid_values(divisions);
  for (int k = 1; k <= max_k; ++k) {
    for (const RuleKind& rule : {RuleKind::standard(), RuleKind::catch_up()}) {
      for (int n = 0; n <= k + 1; ++n) {
        for (int m = 0; m <= k; ++m) {
          ++r.checks;
          const Rational formula = schedule_expected_length(rule, k, {n, m});
          const Rational oracle = average_playout_length(rule, k, {n, m});
          if (formula != oracle) {
            r.fail(rule.name() + " k=" + std::to_string(k) + " n=" + std::to_string(n) + " m=" +
                   std::to_string(m) + ": formula " + formula.get_str() + " vs playouts " +
                   oracle.get_str());
          }
        }
      }
    }
    const MatchFormat format{k + 1, 1};
    for (const auto& p : values) {
      for (const auto& q : values) {
        const ServeModel<Rational> model(p, q);
        const auto sr = analyze_win_by_one(RuleKind::standard(), format, model);
        const auto cr = analyze_win_by_one(RuleKind::catch_up(), format, model);
        r.checks += 3;
        const std::string where =
            "k=" + std::to_string(k) + " p=" + p.get_str() + " q=" + q.get_str();
        if (corollary1_probability(k, p, q) != sr.pr_a_wins) r.fail(where + ": binomial sum != engine");
        if (expected_length_via_schedules(RuleKind::standard(), k, p, q) != sr.expected_length) {
          r.fail(where + ": SR schedule-sum length != engine");
        }
        if (expected_length_via_schedules(RuleKind::catch_up(), k, p, q) != cr.expected_length) {
          r.fail(where + ": CR schedule-sum length != engine");
        }
      }
    }
  }
  r.notes.push_back(std::to_string(r.checks) + " checks for k <= " + std::to_string(max_k));
  return r;
}

/// Expected-position formula against the mean over all C(r, s) subsets, r <= max_r.
inline SuiteResult lemma1(int max_r) {
  SuiteResult r{"lemma1", true, 0, {}, {}};
  for (int dots = 1; dots <= max_r; ++dots) {
    for (int s = 1; s <= dots; ++s) {
      for (int t = 1; t <= s; ++t) {
        long position_sum = 0;
        long subsets = 0;
        for (std::uint32_t mask = 0; mask < (1u << dots); ++mask) {
          if (__builtin_popcount(mask) != s) continue;
          int seen = 0;
          for (int i = 0; i < dots; ++i) {
            if (((mask >> i) & 1u) != 0 && ++seen == t) {
              position_sum += i + 1;
              break;
            }
          }
          ++subsets;
        }
        Rational mean(position_sum, subsets);
        mean.canonicalize();
        ++r.checks;
        if (mean != lemma1_expected_position(dots, s, t)) {
          r.fail("r=" + std::to_string(dots) + " s=" + std::to_string(s) + " t=" + std::to_string(t));
        }
      }
    }
  }
  r.notes.push_back(std::to_string(r.checks) + " (r, s, t) triples checked");
  return r;
}

/// One simulation configuration with its exact reference values.
struct McCase {
  RuleKind rule;
  MatchFormat format;
  Rational p;
  Rational q;
};

inline std::vector<McCase> default_mc_cases() {
  using R = Rational;
  return {
      {RuleKind::standard(), {2, 1}, R(2, 3), R(2, 3)},
      {RuleKind::catch_up(), {6, 1}, R(2, 3), R(2, 3)},
      {RuleKind::trailing_ahead(), {3, 1}, R(7, 10), R(3, 5)},
      {RuleKind::trailing_behind(), {2, 1}, R(4, 5), R(4, 5)},
      {RuleKind::trailing_behind(), {4, 1}, R(3, 5), R(11, 20)},
      {RuleKind::trailing_ahead(), {5, 1}, R(3, 4), R(3, 4)},
      {RuleKind::standard(), {11, 1}, R(3, 5), R(7, 10)},
      {RuleKind::catch_up(), {3, 1}, R(2, 5), R(1, 2)},
      {RuleKind::standard(), {2, 2}, R(3, 4), R(3, 4)},
      {RuleKind::catch_up(), {6, 2}, R(2, 3), R(2, 3)},
      {RuleKind::standard(), {11, 2}, R(2, 3), R(2, 3)},
      {RuleKind::catch_up(), {3, 2}, R(7, 10), R(3, 5)},
  };
}

struct ExactReference {
  Rational pr_a;
  Rational length;
  Rational tie;
};

inline ExactReference exact_reference(const McCase& c) {
  const ServeModel<Rational> model(c.p, c.q);
  if (c.format.win_by == 1) {
    const auto a = analyze_win_by_one(c.rule, c.format, model);
    return {a.pr_a_wins, a.expected_length, a.pr_reach_tie_kk};
  }
  const auto a = analyze_win_by_two(c.rule, c.format, model);
  return {a.qr_a, a.el_wb2, a.pr_tie};
}

inline bool within(const Estimate& est, const Rational& exact, double sigmas) {
  const double diff = std::abs(est.value - exact.get_d());
  if (est.standard_error == 0.0) return diff < 1e-12;
  return diff <= sigmas * est.standard_error;
}

inline std::string describe(const McCase& c) {
  return c.rule.name() + " to " + std::to_string(c.format.points_to_win) + " win-by-" +
         std::to_string(c.format.win_by) + " p=" + c.p.get_str() + " q=" + c.q.get_str();
}

/// Every default case simulated and compared with its exact value at 4 SE;
/// also re-runs the first case to confirm seed determinism.
inline SuiteResult montecarlo(std::uint64_t trials, std::uint64_t seed) {
  SuiteResult r{"mc", true, 0, {}, {}};
  const auto cases = default_mc_cases();
  for (const auto& c : cases) {
    const auto exact = exact_reference(c);
    const auto sim = simulate(c.rule, c.format, ServeModel<double>(c.p.get_d(), c.q.get_d()), trials, seed);
    r.checks += 3;
    std::ostringstream line;
    line << describe(c) << ": pr_a " << sim.pr_a.value << " (exact " << exact.pr_a.get_d()
         << ", se " << sim.pr_a.standard_error << ")";
    r.notes.push_back(line.str());
    if (!within(sim.pr_a, exact.pr_a, 4)) r.fail(describe(c) + ": pr_a outside 4 SE");
    if (!within(sim.mean_length, exact.length, 4)) r.fail(describe(c) + ": mean length outside 4 SE");
    if (!within(sim.tie_rate, exact.tie, 4)) r.fail(describe(c) + ": tie rate outside 4 SE");
    if (sim.cap_exceeded()) r.fail(describe(c) + ": length cap hit");
  }
  const auto& first = cases.front();
  const ServeModel<double> model(first.p.get_d(), first.q.get_d());
  const auto run1 = simulate(first.rule, first.format, model, trials, seed);
  const auto run2 = simulate(first.rule, first.format, model, trials, seed, {10'000, 1});
  ++r.checks;
  if (run1.pr_a.value != run2.pr_a.value || run1.mean_length.value != run2.mean_length.value) {
    r.fail("same seed gave different results for serial and parallel runs");
  }
  return r;
}

}  // namespace servicerule::verify
