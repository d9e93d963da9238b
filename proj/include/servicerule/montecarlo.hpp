#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "servicerule/core.hpp"
#include "servicerule/parallel.hpp"

namespace servicerule {

/// SplitMix64 generator. Each trial gets its own stream derived from
/// (seed, trial index), so sharded runs reproduce the serial run exactly.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial) {
    SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ull * (trial + 1)));
    return SplitMix64(mixer());
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Estimate pr_a;
  Estimate mean_length;
  Estimate tie_rate;  // fraction of games that reached (k, k)
  std::uint64_t cap_hits = 0;

  bool cap_exceeded() const { return cap_hits > 0; }
};

struct SimOptions {
  int length_cap = 10'000;
  unsigned workers = worker_count();
  Player first_server = Player::A;  // ignored by AR and fixed sequences
};

/// Outcome of one simulated game.
struct SimulatedGame {
  bool a_won = false;
  bool capped = false;
  bool reached_tie = false;
  int length = 0;
};

inline SimulatedGame simulate_game(const RuleKind& rule, const MatchFormat& format,
                                   const ServeModel<double>& model, SplitMix64& rng, int length_cap,
                                   Player first_server = Player::A) {
  const int k = format.k();
  SimulatedGame game;
  GameState state{initial_server(rule, first_server), 0, 0};
  int serves_a = 0;
  int serves_b = 0;
  game.reached_tie = k == 0;
  while (!is_terminal(format, state.score_a, state.score_b)) {
    if (game.length >= length_cap) {
      game.capped = true;
      return game;
    }
    int& serves = state.server == Player::A ? serves_a : serves_b;
    const double win = model.serve_win(state.server, ++serves);
    const Player winner = rng.uniform() < win ? state.server : other(state.server);
    GameState next = state;
    (winner == Player::A ? next.score_a : next.score_b) += 1;
    ++game.length;
    if (next.score_a == k && next.score_b == k) game.reached_tie = true;
    if (!is_terminal(format, next.score_a, next.score_b)) {
      next.server = next_server(rule, format, state, winner);
    }
    state = next;
  }
  game.a_won = state.score_a > state.score_b;
  return game;
}

/// Seeded simulation of `trials` games. Capped games count as neither
/// player's win; their length is the cap.
inline SimReport simulate(const RuleKind& rule, const MatchFormat& format, const ServeModel<double>& model,
                          std::uint64_t trials, std::uint64_t seed, const SimOptions& options = {}) {
  format.validated();
  model.validated();
  if (trials < 1) throw std::invalid_argument("simulate needs at least one trial");
  if (options.length_cap < 1) throw std::invalid_argument("length cap must be positive");
  if (rule.kind == RuleKind::Kind::kAuxiliary && format.win_by != 1) {
    throw std::invalid_argument("AR is defined only for Win-by-One games");
  }

  struct Tally {
    std::uint64_t a_wins = 0;
    std::uint64_t ties = 0;
    std::uint64_t capped = 0;
    std::uint64_t length_sum = 0;
    std::uint64_t length_sq_sum = 0;
  };
  const auto parts = parallel_chunks(
      trials,
      [&](std::uint64_t begin, std::uint64_t end) {
        Tally t;
        for (std::uint64_t i = begin; i < end; ++i) {
          auto rng = SplitMix64::for_trial(seed, i);
          const auto game = simulate_game(rule, format, model, rng, options.length_cap, options.first_server);
          t.a_wins += game.a_won ? 1 : 0;
          t.ties += game.reached_tie ? 1 : 0;
          t.capped += game.capped ? 1 : 0;
          const auto len = static_cast<std::uint64_t>(game.length);
          t.length_sum += len;
          t.length_sq_sum += len * len;
        }
        return t;
      },
      options.workers);

  Tally total;
  for (const auto& t : parts) {
    total.a_wins += t.a_wins;
    total.ties += t.ties;
    total.capped += t.capped;
    total.length_sum += t.length_sum;
    total.length_sq_sum += t.length_sq_sum;
  }

  const double n = static_cast<double>(trials);
  // Standard error from the unbiased sample variance.
  auto estimate = [&](double sum, double sum_sq) {
    const double mean = sum / n;
    double variance = 0.0;
    if (trials > 1) variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return Estimate{mean, std::sqrt(variance / n)};
  };

  SimReport report;
  report.trials = trials;
  report.seed = seed;
  report.pr_a = estimate(static_cast<double>(total.a_wins), static_cast<double>(total.a_wins));
  report.tie_rate = estimate(static_cast<double>(total.ties), static_cast<double>(total.ties));
  report.mean_length =
      estimate(static_cast<double>(total.length_sum), static_cast<double>(total.length_sq_sum));
  report.cap_hits = total.capped;
  return report;
}

}  // namespace servicerule
