#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"
#include "servicerule/strategy.hpp"

namespace sr = servicerule;
using sr::GameState;
using sr::MatchFormat;
using sr::Player;
using sr::Rational;
using sr::RuleKind;

namespace {

// Recursive optimum for A when A may throw any point, with serving decided
// by the test-side rule logic. Returns {honest, optimal}.
std::pair<Rational, Rational> recursive_values(oracle::Rule rule, int target, const Rational& p, const Rational& q,
                                               int server, int a, int b) {
  if (a == target) return {1, 1};
  if (b == target) return {0, 0};
  const int k = target - 1;
  const Rational win = server == 0 ? p : q;
  auto after = [&](int winner) {
    const int sa = a + (winner == 0 ? 1 : 0);
    const int sb = b + (winner == 1 ? 1 : 0);
    return recursive_values(rule, target, p, q, oracle::serve_next(rule, winner, sa, sb, sa + sb, k), sa, sb);
  };
  const auto [honest_s, best_s] = after(server);
  const auto [honest_r, best_r] = after(1 - server);
  const Rational honest = win * honest_s + (1 - win) * honest_r;
  const Rational play = win * best_s + (1 - win) * best_r;
  const Rational tank = server == 0 ? best_r : best_s;  // A loses the point on purpose
  return {honest, std::max(play, tank)};
}

oracle::Rule reference(const RuleKind& rule) {
  switch (rule.kind) {
    case RuleKind::Kind::kStandard: return oracle::Rule::SR;
    case RuleKind::Kind::kCatchUp: return oracle::Rule::CR;
    case RuleKind::Kind::kTrailingAhead: return oracle::Rule::TRa;
    default: return oracle::Rule::TRb;
  }
}

std::vector<RuleKind> variable_rules() {
  return {RuleKind::standard(), RuleKind::catch_up(), RuleKind::trailing_ahead(), RuleKind::trailing_behind()};
}

}  // namespace

TEST(Deviation, OptimalValueMatchesRecursiveOracle) {
  for (const auto& rule : variable_rules()) {
    for (int target = 2; target <= 4; ++target) {
      for (const auto& [p, q] : std::vector<std::pair<Rational, Rational>>{
               {Rational(4, 5), Rational(4, 5)}, {Rational(1, 3), Rational(1, 2)}, {Rational(9, 10), Rational(3, 5)}}) {
        const auto [honest, best] = recursive_values(reference(rule), target, p, q, 0, 0, 0);
        const sr::ServeModel<Rational> m(p, q);
        const MatchFormat f{target, 1};
        EXPECT_EQ(sr::honest_value(rule, f, m, GameState{Player::A, 0, 0}, Player::A), honest) << rule.name();
        EXPECT_EQ(sr::optimal_deviation_value(rule, f, m, Player::A), best) << rule.name();
      }
    }
  }
}

TEST(Deviation, TankingFirstPointUnderTrailingBehind) {
  const sr::ServeModel<Rational> m(Rational(4, 5), Rational(4, 5));
  const MatchFormat f{2, 1};
  const GameState open{Player::A, 0, 0};
  EXPECT_EQ(sr::honest_value(RuleKind::trailing_behind(), f, m, open, Player::A), Rational(52, 125));  // 0.416
  EXPECT_EQ(sr::optimal_deviation_value(RuleKind::trailing_behind(), f, m, Player::A), Rational(16, 25));  // 0.64
  const sr::WinTable<Rational> table(RuleKind::trailing_behind(), f, m);
  const sr::DeviationTable<Rational> dev(table, Player::A);
  EXPECT_EQ(dev.tank_value(open), Rational(16, 25));
  // At the 1-1 tie with A serving, A simply needs the next serve.
  EXPECT_EQ(table.a_wins(GameState{Player::A, 1, 1}), Rational(4, 5));

  const auto verdict = sr::is_strategy_proof(RuleKind::trailing_behind(), f, m, Player::A);
  EXPECT_FALSE(verdict.strategy_proof);
  ASSERT_TRUE(verdict.witness.has_value());
  EXPECT_EQ(verdict.witness->state, open);
  EXPECT_EQ(verdict.witness->tanking_value, Rational(16, 25));
}

TEST(Deviation, CatchUpBestOfFiveHasNoGain) {
  const sr::ServeModel<Rational> m(Rational(2, 3), Rational(2, 3));
  const auto f = MatchFormat::best_of(5);
  const Rational honest = sr::honest_value(RuleKind::catch_up(), f, m, GameState{Player::A, 0, 0}, Player::A);
  EXPECT_NEAR(honest.get_d(), 0.568, 5e-4);
  EXPECT_EQ(sr::optimal_deviation_value(RuleKind::catch_up(), f, m, Player::A), honest);
}

TEST(Deviation, SwitchingRulesAreStrategyProof) {
  for (const auto& rule : {RuleKind::standard(), RuleKind::catch_up()}) {
    for (int k = 1; k <= 3; ++k) {
      for (const auto& cell : sr::vulnerability_region_scan(rule, k, 6)) {
        EXPECT_FALSE(cell.vulnerable()) << rule.name() << " k=" << k << " p=" << cell.p << " q=" << cell.q;
      }
    }
  }
}

TEST(Deviation, TrailingBehindBestOfThreeRegion) {
  for (const auto& cell : sr::vulnerability_region_scan(RuleKind::trailing_behind(), 1, 10)) {
    EXPECT_EQ(cell.vulnerable(), cell.p * cell.p + cell.q * cell.q > 1) << "p=" << cell.p << " q=" << cell.q;
  }
}

TEST(Monotonicity, ServingAfterWinningBeatsServingAfterLosing) {
  // Strategy-proofness for A reduces to: SR, W(B, x, y+1) <= W(A, x+1, y);
  // CR, W(A, x, y+1) <= W(B, x+1, y).
  for (const auto& rule : {RuleKind::standard(), RuleKind::catch_up()}) {
    const bool standard = rule.kind == RuleKind::Kind::kStandard;
    for (int i = 1; i < 8; ++i) {
      for (int j = 1; j < 8; ++j) {
        Rational p(i, 8), q(j, 8);
        p.canonicalize();
        q.canonicalize();
        const sr::WinTable<Rational> t(rule, MatchFormat{5, 1}, sr::ServeModel<Rational>(p, q));
        for (int x = 0; x < 5; ++x) {
          for (int y = 0; y < 5; ++y) {
            const Rational after_loss = t.a_wins(GameState{standard ? Player::B : Player::A, x, y + 1});
            const Rational after_win = t.a_wins(GameState{standard ? Player::A : Player::B, x + 1, y});
            EXPECT_LE(after_loss, after_win) << rule.name() << " x=" << x << " y=" << y;
          }
        }
      }
    }
  }
}

TEST(Monotonicity, TieDifferenceFactorsThroughPPlusQMinusOne) {
  for (const auto& rule : {RuleKind::trailing_ahead(), RuleKind::trailing_behind()}) {
    for (const auto& [p, q] : std::vector<std::pair<Rational, Rational>>{
             {Rational(2, 3), Rational(3, 5)}, {Rational(1, 4), Rational(1, 3)}, {Rational(1, 2), Rational(1, 2)}}) {
      const int k = 4;
      const sr::WinTable<Rational> t(rule, MatchFormat{k + 1, 1}, sr::ServeModel<Rational>(p, q));
      for (int x = 0; x < k + 1; ++x) {
        const Rational lhs = t.a_wins(GameState{Player::A, x, x}) - t.a_wins(GameState{Player::B, x, x});
        const Rational rhs =
            (p + q - 1) * (t.a_wins(GameState{Player::B, x + 1, x}) - t.a_wins(GameState{Player::A, x, x + 1}));
        EXPECT_EQ(lhs, rhs) << rule.name() << " x=" << x;
      }
    }
  }
}

TEST(Monotonicity, TrailingAheadSiblingsWhenServersAreStrong) {
  // Moving one point from A to B never helps A: W(C, x, y) >= W(C', x-1, y+1).
  const int k = 4;
  for (int i = 1; i < 10; ++i) {
    for (int j = 1; j < 10; ++j) {
      if (i + j <= 10) continue;
      Rational p(i, 10), q(j, 10);
      p.canonicalize();
      q.canonicalize();
      const sr::ServeModel<Rational> m(p, q);
      const sr::WinTable<Rational> t(RuleKind::trailing_ahead(), MatchFormat{k + 1, 1}, m);
      const auto states = sr::reachable_states(t);
      for (const auto& s : states) {
        if (t.terminal(s) || s.score_a == 0) continue;
        for (const auto& sibling : states) {
          if (sibling.score_a == s.score_a - 1 && sibling.score_b == s.score_b + 1) {
            EXPECT_GE(t.a_wins(s), t.a_wins(sibling));
          }
        }
      }
    }
  }
}

TEST(Reachability, TrailingRulesPutTrailerOnServe) {
  const sr::WinTable<Rational> t(RuleKind::trailing_ahead(), MatchFormat{4, 1},
                                 sr::ServeModel<Rational>(Rational(1, 2), Rational(1, 2)));
  for (const auto& s : sr::reachable_states(t)) {
    if (t.terminal(s) || s.score_a == s.score_b) continue;
    EXPECT_EQ(s.server, s.score_a < s.score_b ? Player::A : Player::B);
  }
  EXPECT_THROW(sr::honest_value(RuleKind::trailing_ahead(), MatchFormat{4, 1},
                                sr::ServeModel<Rational>(Rational(1, 2), Rational(1, 2)), GameState{Player::A, 2, 1},
                                Player::A),
               std::invalid_argument);
  EXPECT_THROW(sr::optimal_deviation_value(RuleKind::auxiliary(), MatchFormat{4, 1},
                                           sr::ServeModel<Rational>(Rational(1, 2), Rational(1, 2)), Player::A),
               std::invalid_argument);
}
