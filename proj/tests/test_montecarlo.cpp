#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "servicerule/montecarlo.hpp"
#include "servicerule/tiebreak.hpp"

namespace sr = servicerule;
using sr::MatchFormat;
using sr::Rational;
using sr::RuleKind;

TEST(SplitMix64, ReferenceOutputs) {
  // First outputs of SplitMix64 seeded with 0 (published reference values).
  sr::SplitMix64 g(0);
  EXPECT_EQ(g(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(g(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(g(), 0x06C45D188009454Full);
}

TEST(SplitMix64, TrialStreamsDiffer) {
  auto a = sr::SplitMix64::for_trial(7, 0);
  auto b = sr::SplitMix64::for_trial(7, 1);
  auto c = sr::SplitMix64::for_trial(8, 0);
  const auto first = a();
  EXPECT_NE(first, b());
  EXPECT_NE(first, c());
  EXPECT_EQ(first, sr::SplitMix64::for_trial(7, 0)());
}

TEST(SplitMix64, UniformIsInUnitIntervalAndEvenlySpread) {
  sr::SplitMix64 g(12345);
  std::array<int, 20> bins{};
  const int draws = 200'000;
  for (int i = 0; i < draws; ++i) {
    const double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++bins[static_cast<std::size_t>(u * 20)];
  }
  double chi2 = 0;
  const double expected = draws / 20.0;
  for (int n : bins) chi2 += (n - expected) * (n - expected) / expected;
  EXPECT_LT(chi2, 43.8);  // 99.9th percentile of chi-square with 19 degrees of freedom
}

namespace {

struct Case {
  RuleKind rule;
  MatchFormat format;
  Rational p, q;
};

void expect_close(const sr::Estimate& est, double exact, const std::string& what) {
  ASSERT_GT(est.standard_error, 0.0) << what;
  EXPECT_LE(std::abs(est.value - exact), 4 * est.standard_error) << what << " estimate " << est.value;
}

}  // namespace

TEST(Simulation, AgreesWithExactValues) {
  const std::vector<Case> cases = {
      {RuleKind::standard(), {3, 1}, Rational(3, 5), Rational(1, 2)},
      {RuleKind::trailing_behind(), {3, 1}, Rational(4, 5), Rational(7, 10)},
      {RuleKind::catch_up(), {4, 2}, Rational(2, 3), Rational(3, 5)},
  };
  for (const auto& c : cases) {
    const auto sim = sr::simulate(c.rule, c.format, sr::ServeModel<double>(c.p.get_d(), c.q.get_d()), 200'000, 99);
    double pr_a = 0;
    double length = 0;
    double tie = 0;
    if (c.format.win_by == 1) {
      const auto e = sr::analyze_win_by_one(c.rule, c.format, sr::ServeModel<Rational>(c.p, c.q));
      pr_a = e.pr_a_wins.get_d();
      length = e.expected_length.get_d();
      tie = e.pr_reach_tie_kk.get_d();
    } else {
      const auto e = sr::analyze_win_by_two(c.rule, c.format, sr::ServeModel<Rational>(c.p, c.q));
      pr_a = e.qr_a.get_d();
      length = e.el_wb2.get_d();
      tie = e.pr_tie.get_d();
    }
    expect_close(sim.pr_a, pr_a, c.rule.name() + " pr_a");
    expect_close(sim.mean_length, length, c.rule.name() + " length");
    expect_close(sim.tie_rate, tie, c.rule.name() + " tie");
    EXPECT_FALSE(sim.cap_exceeded());
  }
}

TEST(Simulation, SeedDeterminesTheResultRegardlessOfThreads) {
  const sr::ServeModel<double> m(0.62, 0.55);
  const MatchFormat f{6, 2};
  const auto one = sr::simulate(RuleKind::standard(), f, m, 50'000, 4242, {10'000, 1});
  const auto many = sr::simulate(RuleKind::standard(), f, m, 50'000, 4242, {10'000, 7});
  EXPECT_EQ(one.pr_a.value, many.pr_a.value);
  EXPECT_EQ(one.mean_length.value, many.mean_length.value);
  EXPECT_EQ(one.mean_length.standard_error, many.mean_length.standard_error);
  EXPECT_EQ(one.tie_rate.value, many.tie_rate.value);
  const auto other = sr::simulate(RuleKind::standard(), f, m, 50'000, 4243, {10'000, 1});
  EXPECT_NE(one.mean_length.value, other.mean_length.value);
}

TEST(Simulation, StandardErrorOfAProportion) {
  const auto sim = sr::simulate(RuleKind::catch_up(), MatchFormat{2, 1}, sr::ServeModel<double>(0.5, 0.5), 10'000, 3);
  const double x = sim.pr_a.value;
  EXPECT_NEAR(sim.pr_a.standard_error, std::sqrt(x * (1 - x) / (10'000 - 1)), 1e-12);
}

TEST(Simulation, DegenerateProbabilitiesHaveZeroError) {
  const auto sim = sr::simulate(RuleKind::standard(), MatchFormat{3, 1}, sr::ServeModel<double>(1.0, 0.0), 1'000, 1);
  EXPECT_EQ(sim.pr_a.value, 1.0);
  EXPECT_EQ(sim.pr_a.standard_error, 0.0);
  EXPECT_EQ(sim.mean_length.value, 3.0);
}

TEST(Simulation, LengthCapStopsEndlessGames) {
  // CR with p = q = 1 alternates the lead forever in a win-by-two game.
  const auto sim = sr::simulate(RuleKind::catch_up(), MatchFormat{2, 2}, sr::ServeModel<double>(1.0, 1.0), 500, 5,
                                {64, 2});
  EXPECT_EQ(sim.cap_hits, 500u);
  EXPECT_TRUE(sim.cap_exceeded());
  EXPECT_EQ(sim.pr_a.value, 0.0);
  EXPECT_EQ(sim.mean_length.value, 64.0);
}

TEST(Simulation, RejectsInvalidInput) {
  const sr::ServeModel<double> m(0.5, 0.5);
  EXPECT_THROW(sr::simulate(RuleKind::auxiliary(), MatchFormat{3, 2}, m, 10, 1), std::invalid_argument);
  EXPECT_THROW(sr::simulate(RuleKind::standard(), MatchFormat{3, 1}, m, 0, 1), std::invalid_argument);
  EXPECT_THROW(sr::simulate(RuleKind::standard(), MatchFormat{3, 1}, sr::ServeModel<double>(1.5, 0.5), 10, 1),
               std::invalid_argument);
}

TEST(Simulation, HonoursFirstServer) {
  const Rational p(7, 10), q(2, 5);
  const auto exact = sr::analyze_win_by_one(RuleKind::trailing_ahead(), MatchFormat{4, 1},
                                            sr::ServeModel<Rational>(p, q), sr::Player::B);
  sr::SimOptions options;
  options.first_server = sr::Player::B;
  const auto sim = sr::simulate(RuleKind::trailing_ahead(), MatchFormat{4, 1}, sr::ServeModel<double>(0.7, 0.4),
                                200'000, 17, options);
  expect_close(sim.pr_a, exact.pr_a_wins.get_d(), "pr_a with B serving first");
  expect_close(sim.mean_length, exact.expected_length.get_d(), "length with B serving first");
}
