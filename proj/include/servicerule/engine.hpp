#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "servicerule/core.hpp"
#include "servicerule/polynomial.hpp"
#include "servicerule/scalar.hpp"

namespace servicerule {

/// Outcome summary of a Win-by-One game.
template <class T>
struct GameAnalysis {
  T pr_a_wins{};
  T pr_b_wins{};
  T expected_length{};
  std::map<int, T> length_distribution;  // points played -> probability
  T pr_reach_tie_kk{};                   // probability the score is ever (k, k)
  T tie_with_a_serving{};                // ... and A serves the next point
  T tie_with_b_serving{};
};

namespace detail {

struct ForwardKey {
  Player server;
  int score_a;
  int score_b;
  int serves_a;  // collapsed to 0 when the model has no per-serve sequences

  friend auto operator<=>(const ForwardKey&, const ForwardKey&) = default;
};

/// Mass that left the pre-tie grid, grouped the way both the Win-by-One and
/// the Win-by-Two analyses need it.
template <class T>
struct Propagation {
  T a_wins{};
  T b_wins{};
  std::map<int, T> lengths;
  T tie_a_serving{};
  T tie_b_serving{};
};

template <class T>
void add_mass(std::map<int, T>& bucket, int key, const T& mass) {
  auto [it, inserted] = bucket.try_emplace(key, mass);
  if (!inserted) it->second += mass;
}

/// Pushes probability mass point by point from the opening state. With
/// `stop_at_tie` the mass arriving at (k, k) is parked in the tie buckets
/// instead of being played on.
template <class T>
Propagation<T> propagate(const RuleKind& rule, const MatchFormat& format, const ServeModel<T>& model,
                         Player first_server, bool stop_at_tie) {
  const MatchFormat wb1{format.points_to_win, 1};
  const int k = format.k();
  const bool track_serves = model.has_sequences();
  const T one = scalar_from_int<T>(1);

  Propagation<T> out;
  auto park_tie = [&](Player server, const T& mass) {
    (server == Player::A ? out.tie_a_serving : out.tie_b_serving) += mass;
  };

  std::map<ForwardKey, T> layer;
  const Player opener = initial_server(rule, first_server);
  if (k == 0) {
    park_tie(opener, one);
    if (stop_at_tie) return out;
  }
  layer.emplace(ForwardKey{opener, 0, 0, 0}, one);

  for (int played = 0; !layer.empty(); ++played) {
    std::map<ForwardKey, T> next;
    for (const auto& [key, mass] : layer) {
      const int serves_a = track_serves ? key.serves_a : 0;
      const int serve_number =
          key.server == Player::A ? serves_a + 1 : (played - serves_a) + 1;
      const T& win = model.serve_win(key.server, serve_number);
      const GameState before{key.server, key.score_a, key.score_b};

      for (Player winner : {key.server, other(key.server)}) {
        const T branch = winner == key.server ? T(mass * win) : T(mass * (one - win));
        const int a = key.score_a + (winner == Player::A ? 1 : 0);
        const int b = key.score_b + (winner == Player::B ? 1 : 0);
        if (is_terminal(wb1, a, b)) {
          (winner == Player::A ? out.a_wins : out.b_wins) += branch;
          add_mass(out.lengths, played + 1, branch);
          continue;
        }
        const Player server = next_server(rule, wb1, before, winner);
        if (a == k && b == k) {
          park_tie(server, branch);
          if (stop_at_tie) continue;
        }
        const int next_serves_a = track_serves ? serves_a + (key.server == Player::A ? 1 : 0) : 0;
        const ForwardKey to{server, a, b, next_serves_a};
        auto [it, inserted] = next.try_emplace(to, branch);
        if (!inserted) it->second += branch;
      }
    }
    layer = std::move(next);
  }
  return out;
}

template <class T>
T mean_of(const std::map<int, T>& distribution) {
  T total{};
  for (const auto& [length, mass] : distribution) total += scalar_from_int<T>(length) * mass;
  return total;
}

}  // namespace detail

/// Exact analysis of a Best-of-(2k+1) Win-by-One game under any rule.
///
/// Works for any scalar with ring operations: `Rational` for exact values,
/// `double` for sweeps, `Polynomial` for symbolic results in p and q.
template <class T>
GameAnalysis<T> analyze_win_by_one(const RuleKind& rule, const MatchFormat& format,
                                   const ServeModel<T>& model, Player first_server = Player::A) {
  format.validated();
  model.validated();
  if (format.win_by != 1) throw std::invalid_argument("analyze_win_by_one requires win_by = 1");

  auto flow = detail::propagate(rule, format, model, first_server, /*stop_at_tie=*/false);
  GameAnalysis<T> out;
  out.pr_a_wins = flow.a_wins;
  out.pr_b_wins = flow.b_wins;
  out.expected_length = detail::mean_of(flow.lengths);
  out.length_distribution = std::move(flow.lengths);
  out.tie_with_a_serving = flow.tie_a_serving;
  out.tie_with_b_serving = flow.tie_b_serving;
  out.pr_reach_tie_kk = flow.tie_a_serving + flow.tie_b_serving;
  return out;
}

/// A's win probability from every state of a Win-by-One game, computed by
/// backward induction. Terminal states hold 1 (A reached k+1) or 0.
template <class T>
class WinTable {
 public:
  WinTable(const RuleKind& rule, const MatchFormat& format, const ServeModel<T>& model)
      : rule_(rule), format_(format.validated()), model_(model) {
    model_.validated();
    if (format_.win_by != 1) throw std::invalid_argument("win tables require win_by = 1");
    if (model_.has_sequences()) {
      throw std::invalid_argument("win tables need constant serve probabilities");
    }
    const int n = format_.points_to_win + 1;
    values_.assign(static_cast<std::size_t>(2 * n * n), T{});
    const int target = format_.points_to_win;
    for (int total = 2 * target - 1; total >= 0; --total) {
      for (int a = std::min(total, target); a >= 0 && total - a <= target; --a) {
        const int b = total - a;
        for (Player server : {Player::A, Player::B}) {
          slot(server, a, b) = compute(server, a, b);
        }
      }
    }
  }

  const RuleKind& rule() const { return rule_; }
  const MatchFormat& format() const { return format_; }
  const ServeModel<T>& model() const { return model_; }

  /// A's win probability from `state`.
  const T& a_wins(const GameState& state) const {
    check(state);
    return values_[index(state.server, state.score_a, state.score_b)];
  }

  T wins(const GameState& state, Player perspective) const {
    return perspective == Player::A ? a_wins(state) : T(scalar_from_int<T>(1) - a_wins(state));
  }

  bool terminal(const GameState& state) const {
    return is_terminal(format_, state.score_a, state.score_b);
  }

  /// State reached from nonterminal `state` when `winner` takes the point.
  GameState successor(const GameState& state, Player winner) const {
    GameState next{state.server, state.score_a + (winner == Player::A ? 1 : 0),
                   state.score_b + (winner == Player::B ? 1 : 0)};
    next.server = is_terminal(format_, next.score_a, next.score_b)
                      ? state.server
                      : next_server(rule_, format_, state, winner);
    return next;
  }

  void check(const GameState& state) const {
    const int t = format_.points_to_win;
    if (state.score_a < 0 || state.score_b < 0 || state.score_a > t || state.score_b > t ||
        (state.score_a == t && state.score_b == t)) {
      throw std::invalid_argument("state outside the game grid");
    }
  }

 private:
  std::size_t index(Player server, int a, int b) const {
    const int n = format_.points_to_win + 1;
    return static_cast<std::size_t>(((server == Player::A ? 0 : 1) * n + a) * n + b);
  }
  T& slot(Player server, int a, int b) { return values_[index(server, a, b)]; }

  T compute(Player server, int a, int b) {
    const int target = format_.points_to_win;
    if (a == target) return scalar_from_int<T>(1);
    if (b == target) return scalar_from_int<T>(0);
    const GameState here{server, a, b};
    const T& win = model_.serve_win(server, 0);
    const GameState if_win = successor(here, server);
    const GameState if_loss = successor(here, other(server));
    return win * values_[index(if_win.server, if_win.score_a, if_win.score_b)] +
           (scalar_from_int<T>(1) - win) *
               values_[index(if_loss.server, if_loss.score_a, if_loss.score_b)];
  }

  RuleKind rule_;
  MatchFormat format_;
  ServeModel<T> model_;
  std::vector<T> values_;
};

/// Win probability and expected length of Best-of-3 as printed in the
/// classic four-rule comparison table (closed forms, not computed).
struct BestOfThreePolynomials {
  Polynomial win_probability;
  Polynomial expected_length;
};

inline BestOfThreePolynomials win_polynomials_best_of_3(const RuleKind& rule) {
  using P = Polynomial;
  const P p = P::p();
  const P q = P::q();
  // Shared by CR, TRa, TRb.
  const P catch_up_length = P(2) + p - p * p + p * q;
  switch (rule.kind) {
    case RuleKind::Kind::kStandard:
      return {P(2) * p - p * p - P(2) * p * q + P(2) * p * p * q, P(3) - q - p * p + p * q};
    case RuleKind::Kind::kCatchUp:
    case RuleKind::Kind::kTrailingAhead:
      return {P(2) * p - p * p - P(2) * p * q + P(2) * p * p * q, catch_up_length};
    case RuleKind::Kind::kTrailingBehind:
      return {p + p * p - p * p * p - p * q * q, catch_up_length};
    default:
      throw std::invalid_argument("Best-of-3 polynomials exist only for SR, CR, TRa, TRb");
  }
}

/// Symbolic Win-by-One analysis: every quantity as a polynomial in p and q.
inline GameAnalysis<Polynomial> analyze_symbolic(const RuleKind& rule, const MatchFormat& format,
                                                 Player first_server = Player::A) {
  return analyze_win_by_one(rule, format, ServeModel<Polynomial>(Polynomial::p(), Polynomial::q()),
                            first_server);
}

}  // namespace servicerule
