#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "servicerule/core.hpp"
#include "servicerule/parallel.hpp"
#include "servicerule/scalar.hpp"

namespace servicerule {

/// Predetermined results of A's k+1 serves and B's k serves
/// (true = the server wins that serve).
struct ServingSchedule {
  std::vector<bool> a_results;
  std::vector<bool> b_results;

  /// Bit i < k+1 is A's (i+1)-th serve, bit k+1+j is B's (j+1)-th serve.
  static ServingSchedule from_mask(int k, std::uint64_t mask) {
    ServingSchedule s;
    for (int i = 0; i <= k; ++i) s.a_results.push_back(((mask >> i) & 1u) != 0);
    for (int j = 0; j < k; ++j) s.b_results.push_back(((mask >> (k + 1 + j)) & 1u) != 0);
    return s;
  }

  /// Parses "WL|L" (A's results, a bar, then B's results).
  static ServingSchedule parse(const std::string& text) {
    const auto bar = text.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("schedule needs a '|' between A's and B's serves");
    auto read = [](const std::string& part) {
      std::vector<bool> out;
      for (char c : part) {
        if (c == 'W') {
          out.push_back(true);
        } else if (c == 'L') {
          out.push_back(false);
        } else if (c != ' ' && c != ',') {
          throw std::invalid_argument("schedule entries must be W or L");
        }
      }
      return out;
    };
    ServingSchedule s{read(text.substr(0, bar)), read(text.substr(bar + 1))};
    s.k();
    return s;
  }

  int k() const {
    const int k = static_cast<int>(b_results.size());
    if (static_cast<int>(a_results.size()) != k + 1 || k < 1) {
      throw std::invalid_argument("a schedule holds k+1 results for A and k for B, k >= 1");
    }
    return k;
  }

  /// A's server losses (a) and B's server losses (b).
  int a_losses() const { return count(a_results, false); }
  int b_losses() const { return count(b_results, false); }

  std::string to_string() const {
    std::string out;
    for (bool w : a_results) out += w ? 'W' : 'L';
    out += '|';
    for (bool w : b_results) out += w ? 'W' : 'L';
    return out;
  }

 private:
  static int count(const std::vector<bool>& v, bool value) {
    int n = 0;
    for (bool b : v) n += b == value ? 1 : 0;
    return n;
  }
};

/// Number of server wins in a schedule: n for A (0..k+1), m for B (0..k).
struct ScheduleParams {
  int n = 0;
  int m = 0;
};

/// Plays a Win-by-One game on the schedule under AR, SR or CR.
inline PlayoutRecord playout(const RuleKind& rule, const ServingSchedule& schedule, int points_to_win) {
  using K = RuleKind::Kind;
  if (rule.kind != K::kAuxiliary && rule.kind != K::kStandard && rule.kind != K::kCatchUp) {
    throw std::invalid_argument("schedule playouts support AR, SR and CR");
  }
  const int k = schedule.k();
  if (points_to_win != k + 1) throw std::invalid_argument("schedule size does not match points_to_win");
  const MatchFormat format{points_to_win, 1};

  PlayoutRecord rec;
  GameState state{initial_server(rule), 0, 0};
  while (!is_terminal(format, state.score_a, state.score_b)) {
    const bool a_serving = state.server == Player::A;
    const auto& results = a_serving ? schedule.a_results : schedule.b_results;
    const int used = a_serving ? rec.serves_a : rec.serves_b;
    if (used >= static_cast<int>(results.size())) {
      throw ScheduleExhausted(rule.name() + " asked for serve " + std::to_string(used + 1) + " of " +
                              to_char(state.server) + " in schedule " + schedule.to_string());
    }
    const bool server_won = results[static_cast<std::size_t>(used)];
    (a_serving ? rec.serves_a : rec.serves_b) += 1;
    const Player winner = server_won ? state.server : other(state.server);
    rec.points.push_back({state.server, winner});

    GameState next = state;
    (winner == Player::A ? next.score_a : next.score_b) += 1;
    if (!is_terminal(format, next.score_a, next.score_b)) {
      next.server = next_server(rule, format, state, winner);
    }
    state = next;
  }
  rec.score_a = state.score_a;
  rec.score_b = state.score_b;
  rec.winner = state.score_a >= points_to_win ? Player::A : Player::B;
  if (rule.kind == K::kAuxiliary) {
    const int a = schedule.a_losses();
    const int b = schedule.b_losses();
    rec.full_schedule_score = {{k + 1 - a + b, k - b + a}};
  }
  return rec;
}

struct Theorem1Counterexample {
  ServingSchedule schedule;
  Player ar_winner;
  Player sr_winner;
  Player cr_winner;
};

struct Theorem1Report {
  int k = 0;
  std::uint64_t schedules_checked = 0;
  std::uint64_t mismatches = 0;  // AR/SR/CR disagree, or the b >= a criterion fails
  std::vector<Theorem1Counterexample> counterexamples;  // first few, in mask order
  bool all_equal() const { return mismatches == 0; }
};

/// Plays every one of the 2^(2k+1) schedules under AR, SR and CR and checks
/// that all three produce the same winner, and that the winner is A exactly
/// when b >= a.
inline Theorem1Report theorem1_oracle(int k, int k_cap = 10, std::size_t max_counterexamples = 16) {
  if (k < 1 || k > k_cap) {
    throw std::invalid_argument("theorem1 enumeration needs 1 <= k <= " + std::to_string(k_cap));
  }
  const std::uint64_t total = std::uint64_t{1} << (2 * k + 1);
  struct Partial {
    std::uint64_t mismatches = 0;
    std::vector<Theorem1Counterexample> found;
  };
  const auto parts = parallel_chunks(total, [&](std::uint64_t begin, std::uint64_t end) {
    Partial part;
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const auto schedule = ServingSchedule::from_mask(k, mask);
      const Player ar = playout(RuleKind::auxiliary(), schedule, k + 1).winner;
      const Player sr = playout(RuleKind::standard(), schedule, k + 1).winner;
      const Player cr = playout(RuleKind::catch_up(), schedule, k + 1).winner;
      const Player expected = schedule.b_losses() >= schedule.a_losses() ? Player::A : Player::B;
      if (ar != sr || sr != cr || ar != expected) {
        ++part.mismatches;
        if (part.found.size() < max_counterexamples) part.found.push_back({schedule, ar, sr, cr});
      }
    }
    return part;
  });

  Theorem1Report report;
  report.k = k;
  report.schedules_checked = total;
  for (const auto& part : parts) {
    report.mismatches += part.mismatches;
    for (const auto& c : part.found) {
      if (report.counterexamples.size() < max_counterexamples) report.counterexamples.push_back(c);
    }
  }
  return report;
}

/// Probability of one particular schedule with parameters (n, m), times the
/// number of such schedules.
template <class T>
T schedule_params_probability(int k, int n, int m, const T& p, const T& q) {
  const T one = scalar_from_int<T>(1);
  const Rational count = Rational(binomial(k + 1, n) * binomial(k, m));
  return scalar_from_rational<T>(count) * power(p, n) * power(T(one - p), k + 1 - n) *
         power(q, m) * power(T(one - q), k - m);
}

/// A's win probability under SR, CR or AR as a double binomial sum.
template <class T>
T corollary1_probability(int k, const T& p, const T& q) {
  if (k < 1) throw std::invalid_argument("corollary1_probability needs k >= 1");
  ServeModel<T>(p, q).validated();
  T total = scalar_from_int<T>(0);
  for (int n = 1; n <= k + 1; ++n) {
    for (int m = 0; m <= n - 1 && m <= k; ++m) total += schedule_params_probability(k, n, m, p, q);
  }
  return total;
}

/// Expected position of the t-th selected dot when s of r dots are chosen
/// uniformly: t(r+1)/(s+1).
inline Rational lemma1_expected_position(int r, int s, int t) {
  if (!(1 <= t && t <= s && s <= r)) throw std::invalid_argument("lemma1 requires 1 <= t <= s <= r");
  Rational out(t * (r + 1), s + 1);
  out.canonicalize();
  return out;
}

/// Mean game length over all schedules with parameters (n, m) under SR or CR.
inline Rational schedule_expected_length(const RuleKind& rule, int k, ScheduleParams params) {
  const int n = params.n;
  const int m = params.m;
  if (k < 1 || n < 0 || n > k + 1 || m < 0 || m > k) {
    throw std::invalid_argument("schedule parameters need 0 <= n <= k+1, 0 <= m <= k, k >= 1");
  }
  const Rational full(2 * (k + 1));
  auto frac = [](int num, int den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
  };
  switch (rule.kind) {
    case RuleKind::Kind::kStandard:
      if (n > m) return full - Rational(n - m) * (frac(m, k + 1 - m) + 1);
      return full - Rational(m - n + 1) * (frac(n, k + 2 - n) + 1);
    case RuleKind::Kind::kCatchUp:
      if (n > m) return full - Rational(n - m) * (frac(k + 1 - n, n + 1) + 1);
      return full - Rational(m - n + 1) * (frac(k - m, m + 1) + 1);
    default:
      throw std::invalid_argument("schedule expected lengths exist only for SR and CR");
  }
}

/// Mean playout length over every schedule with parameters (n, m), found by
/// enumerating all 2^(2k+1) schedules.
inline Rational average_playout_length(const RuleKind& rule, int k, ScheduleParams params) {
  const std::uint64_t total = std::uint64_t{1} << (2 * k + 1);
  long length_sum = 0;
  long matches = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const auto s = ServingSchedule::from_mask(k, mask);
    if (k + 1 - s.a_losses() != params.n || k - s.b_losses() != params.m) continue;
    length_sum += playout(rule, s, k + 1).length();
    ++matches;
  }
  if (matches == 0) throw std::invalid_argument("no schedule has these parameters");
  Rational out(length_sum, matches);
  out.canonicalize();
  return out;
}

/// Expected game length as the Pr(n, m)-weighted sum of per-parameter lengths.
template <class T>
T expected_length_via_schedules(const RuleKind& rule, int k, const T& p, const T& q) {
  if (k < 1) throw std::invalid_argument("expected_length_via_schedules needs k >= 1");
  ServeModel<T>(p, q).validated();
  T total = scalar_from_int<T>(0);
  for (int n = 0; n <= k + 1; ++n) {
    for (int m = 0; m <= k; ++m) {
      total += schedule_params_probability(k, n, m, p, q) *
               scalar_from_rational<T>(schedule_expected_length(rule, k, {n, m}));
    }
  }
  return total;
}

// Fixed serving sequences ---------------------------------------------------

/// Tennis tiebreak order A/BB/AA/BB/...
inline std::vector<Player> tennis_tiebreak_sequence() {
  return {Player::A, Player::B, Player::B, Player::A};
}

/// AB/AB/AB/...
inline std::vector<Player> strict_alternation_sequence() { return {Player::A, Player::B}; }

/// Balanced alternation (Prouhet-Thue-Morse): AB/BA/BA/AB/...; `length` is
/// rounded up to a power of two so the cycled pattern keeps AB/BA blocks.
inline std::vector<Player> balanced_alternation_sequence(std::size_t length) {
  std::size_t n = 2;
  while (n < length) n *= 2;
  std::vector<Player> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(__builtin_popcountll(i) % 2 == 0 ? Player::A : Player::B);
  }
  return out;
}

/// Serves taken by A and B during the first `points` points of a cycled pattern.
inline std::pair<int, int> serves_after(const std::vector<Player>& pattern, int points) {
  int a = 0;
  for (int i = 0; i < points; ++i) a += pattern[static_cast<std::size_t>(i) % pattern.size()] == Player::A ? 1 : 0;
  return {a, points - a};
}

struct FairnessViolation {
  int score_a;
  int score_b;
  int serves_a;
  int serves_b;
};

struct FairnessReport {
  int depth = 0;
  std::uint64_t playouts = 0;          // distinct finished point sequences within depth
  std::uint64_t terminal_states = 0;   // distinct final scores within depth
  std::uint64_t post_tie_wins = 0;     // final scores reached through the (k, k) tie
  std::uint64_t pre_tie_unequal = 0;   // final scores before any tie with unequal serves
  std::vector<FairnessViolation> violations;
  bool fair() const { return violations.empty(); }
};

/// Checks every playout of a Win-by-Two game of at most `depth` points under
/// a fixed serving order: whenever the winner emerges after a (k, k) tie,
/// both players must have served equally often.
///
/// The serve counts of a fixed order depend only on the number of points
/// played, so the playouts are grouped by final score; `playouts` counts the
/// underlying point sequences.
inline FairnessReport fixed_sequence_fairness(const std::vector<Player>& pattern, int points_to_win,
                                              int depth) {
  if (pattern.empty()) throw std::invalid_argument("fixed serving sequence must be nonempty");
  if (points_to_win < 1 || depth < 0 || depth > 62) {
    throw std::invalid_argument("fairness check needs points_to_win >= 1 and 0 <= depth <= 62");
  }
  const MatchFormat format{points_to_win, 2};
  const int k = format.k();
  FairnessReport report;
  report.depth = depth;

  // paths[a] = number of point sequences reaching the nonterminal score (a, played - a).
  std::vector<std::uint64_t> paths(1, 1);
  for (int played = 0; played < depth; ++played) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(played) + 2, 0);
    for (int a = 0; a <= played; ++a) {
      const std::uint64_t count = paths[static_cast<std::size_t>(a)];
      if (count == 0) continue;
      const int b = played - a;
      for (int winner = 0; winner < 2; ++winner) {
        const int na = a + (winner == 0 ? 1 : 0);
        const int nb = b + (winner == 1 ? 1 : 0);
        if (!is_terminal(format, na, nb)) {
          next[static_cast<std::size_t>(na)] += count;
          continue;
        }
        report.playouts += count;
        ++report.terminal_states;
        const auto [serves_a, serves_b] = serves_after(pattern, played + 1);
        if (std::min(na, nb) >= k) {
          ++report.post_tie_wins;
          if (serves_a != serves_b) report.violations.push_back({na, nb, serves_a, serves_b});
        } else if (serves_a != serves_b) {
          ++report.pre_tie_unequal;
        }
      }
    }
    paths = std::move(next);
  }
  return report;
}

}  // namespace servicerule
