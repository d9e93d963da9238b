#include <gtest/gtest.h>

#include "oracles.hpp"
#include "servicerule/tiebreak.hpp"

namespace sr = servicerule;
using sr::MatchFormat;
using sr::Player;
using sr::Rational;
using sr::RuleKind;

namespace {

// Deuce as a Markov chain on (server, lead of A in {-1, 0, 1}), summed
// point by point up to `depth`.
struct Truncated {
  double a_wins = 0;
  double length = 0;
};

Truncated truncated_deuce(bool standard, double p, double q, int depth) {
  double mass[2][3] = {{0, 1, 0}, {0, 0, 0}};  // [server][lead + 1], A serves first
  Truncated out;
  for (int n = 1; n <= depth; ++n) {
    double next[2][3] = {};
    for (int server = 0; server < 2; ++server) {
      for (int lead = -1; lead <= 1; ++lead) {
        const double m = mass[server][lead + 1];
        if (m == 0) continue;
        const double win = server == 0 ? p : q;
        for (int winner : {server, 1 - server}) {
          const double w = m * (winner == server ? win : 1 - win);
          const int nl = lead + (winner == 0 ? 1 : -1);
          if (nl == 2 || nl == -2) {
            if (nl == 2) out.a_wins += w;
            out.length += w * n;
            continue;
          }
          next[standard ? winner : 1 - winner][nl + 1] += w;
        }
      }
    }
    std::copy(&next[0][0], &next[0][0] + 6, &mass[0][0]);
  }
  return out;
}

}  // namespace

TEST(Deuce, MatchesTruncatedMarkovSum) {
  for (bool standard : {true, false}) {
    for (const auto& [p, q] : std::vector<std::pair<Rational, Rational>>{
             {Rational(2, 3), Rational(1, 2)}, {Rational(1, 3), Rational(3, 4)}, {Rational(9, 10), Rational(1, 5)}}) {
      const RuleKind rule = standard ? RuleKind::standard() : RuleKind::catch_up();
      const auto exact = sr::solve_deuce(rule, p, q);
      const auto approx = truncated_deuce(standard, p.get_d(), q.get_d(), 400);
      EXPECT_NEAR(exact.first_server_wins().get_d(), approx.a_wins, 1e-12) << rule.name();
      EXPECT_NEAR(exact.expected_length().get_d(), approx.length, 1e-10) << rule.name();
    }
  }
}

TEST(Deuce, EqualServeClosedForms) {
  for (int i = 1; i < 20; ++i) {
    Rational p(i, 20);
    p.canonicalize();
    // SR: a two-point round ends with probability p; CR: with 1 - p.
    EXPECT_EQ(sr::solve_deuce(RuleKind::standard(), p, p).first_server_wins(), 1 / (3 - 2 * p));
    EXPECT_EQ(sr::solve_deuce(RuleKind::catch_up(), p, p).first_server_wins(), 2 * p / (1 + 2 * p));
    EXPECT_EQ(sr::deuce_expected_length(RuleKind::standard(), p, p), 2 / p);
    EXPECT_EQ(sr::deuce_expected_length(RuleKind::catch_up(), p, p), 2 / (1 - p));
    const auto d = sr::solve_deuce(RuleKind::standard(), p, p);
    EXPECT_EQ(d.first_server_wins_when_receiving(), 1 - d.first_server_wins());
  }
}

TEST(Deuce, DegenerateCornersAreFlagged) {
  EXPECT_THROW(sr::solve_deuce(RuleKind::standard(), Rational(0), Rational(0)), sr::UndefinedQuantity);
  EXPECT_THROW(sr::deuce_expected_length(RuleKind::standard(), Rational(0), Rational(0)), sr::DivergentQuantity);
  EXPECT_THROW(sr::solve_deuce(RuleKind::catch_up(), Rational(1), Rational(1)), sr::UndefinedQuantity);
  EXPECT_THROW(sr::deuce_expected_length(RuleKind::catch_up(), 1.0, 1.0), sr::DivergentQuantity);
  // The opposite corners are well defined.
  EXPECT_EQ(sr::solve_deuce(RuleKind::standard(), Rational(1), Rational(1)).first_server_wins(), 1);
  EXPECT_EQ(sr::deuce_expected_length(RuleKind::standard(), Rational(1), Rational(1)), 2);
  EXPECT_EQ(sr::solve_deuce(RuleKind::catch_up(), Rational(0), Rational(0)).first_server_wins(), 0);
  EXPECT_EQ(sr::deuce_expected_length(RuleKind::catch_up(), Rational(0), Rational(0)), 2);
}

TEST(Deuce, OnlySwitchingRules) {
  EXPECT_THROW(sr::solve_deuce(RuleKind::trailing_ahead(), Rational(1, 2), Rational(1, 2)), std::invalid_argument);
}

TEST(WinByTwo, MatchesDirectPropagation) {
  for (const auto& [rule, ref] : std::vector<std::pair<RuleKind, oracle::Rule>>{
           {RuleKind::standard(), oracle::Rule::SR}, {RuleKind::catch_up(), oracle::Rule::CR}}) {
    for (int target : {1, 2, 4, 6, 11}) {
      for (const auto& [p, q] : std::vector<std::pair<Rational, Rational>>{
               {Rational(2, 3), Rational(2, 3)}, {Rational(3, 5), Rational(1, 2)}, {Rational(1, 4), Rational(4, 5)}}) {
        const auto exact = sr::analyze_win_by_two(rule, MatchFormat{target, 2}, sr::ServeModel<Rational>(p, q));
        const auto approx = oracle::propagate_win_by_two(ref, target, p.get_d(), q.get_d(), 600);
        SCOPED_TRACE(rule.name() + " target " + std::to_string(target));
        ASSERT_LT(approx.unresolved, 1e-13);
        EXPECT_NEAR(exact.qr_a.get_d(), approx.pr_a, 1e-10);
        EXPECT_NEAR(exact.el_wb2.get_d(), approx.length, 1e-8);
        EXPECT_NEAR(exact.pr_tie.get_d(), approx.pr_tie, 1e-12);
        EXPECT_EQ(exact.qr_a + exact.qr_b, 1);
      }
    }
  }
}

TEST(WinByTwo, PublishedTableRows) {
  struct Row {
    RuleKind rule;
    int m;
    Rational p;
    double pr_a, qr_a, pr_tie, el_wb1, el_wb2;
  };
  const std::vector<Row> rows = {
      {RuleKind::standard(), 3, Rational(2, 3), 0.593, 0.600, 0.333, 2.333, 3.000},
      {RuleKind::catch_up(), 11, Rational(2, 3), 0.544, 0.542, 0.346, 9.825, 11.553},
      {RuleKind::standard(), 21, Rational(3, 4), 0.551, 0.552, 0.101, 16.540, 16.708},
      {RuleKind::catch_up(), 21, Rational(3, 4), 0.551, 0.550, 0.303, 19.513, 21.631},
  };
  for (const auto& r : rows) {
    const auto a = sr::analyze_win_by_two(r.rule, MatchFormat::best_of(r.m, 2), sr::ServeModel<Rational>(r.p, r.p));
    SCOPED_TRACE(r.rule.name() + " m=" + std::to_string(r.m));
    EXPECT_NEAR(a.win_by_one.pr_a_wins.get_d(), r.pr_a, 1e-3);
    EXPECT_NEAR(a.qr_a.get_d(), r.qr_a, 1e-3);
    EXPECT_NEAR(a.pr_tie.get_d(), r.pr_tie, 1e-3);
    EXPECT_NEAR(a.el_wb1.get_d(), r.el_wb1, 1e-3);
    EXPECT_NEAR(a.el_wb2.get_d(), r.el_wb2, 1e-3);
  }
}

TEST(WinByTwo, NoTieMeansNoDeuceSolve) {
  // SR at p = q = 0 reaches the tie with certainty and its deuce never ends.
  EXPECT_THROW(sr::analyze_win_by_two(RuleKind::standard(), MatchFormat{3, 2},
                                      sr::ServeModel<Rational>(Rational(0), Rational(0))),
               sr::UndefinedQuantity);
  // Servers always hold: under SR, A serves every point and the tie never happens.
  const auto a = sr::analyze_win_by_two(RuleKind::standard(), MatchFormat{3, 2},
                                        sr::ServeModel<Rational>(Rational(1), Rational(1)));
  EXPECT_EQ(a.pr_tie, 0);
  EXPECT_EQ(a.qr_a, 1);
}

TEST(WinByTwo, RejectsUnsupportedInputs) {
  const sr::ServeModel<Rational> m(Rational(1, 2), Rational(1, 2));
  EXPECT_THROW(sr::analyze_win_by_two(RuleKind::trailing_behind(), MatchFormat{3, 2}, m), std::invalid_argument);
  EXPECT_THROW(sr::analyze_win_by_two(RuleKind::standard(), MatchFormat{3, 1}, m), std::invalid_argument);
}
