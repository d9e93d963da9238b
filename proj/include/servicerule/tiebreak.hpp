#pragma once

#include <array>
#include <sstream>
#include <stdexcept>
#include <string>

#include "servicerule/core.hpp"
#include "servicerule/engine.hpp"
#include "servicerule/scalar.hpp"

namespace servicerule {

/// Deuce (first to lead by two from a tie) under SR or CR.
///
/// Values are stored from A's point of view for both possible servers of the
/// first deuce point; the accessors re-express them for `first_server`.
template <class T>
struct DeuceSolution {
  Player first_server = Player::A;
  T a_wins_a_serving{};
  T a_wins_b_serving{};
  T length_a_serving{};
  T length_b_serving{};

  /// Probability that the player serving first in the deuce wins it.
  T first_server_wins() const {
    return first_server == Player::A ? a_wins_a_serving
                                     : T(scalar_from_int<T>(1) - a_wins_b_serving);
  }
  /// Probability that the same player wins when the opponent serves first.
  T first_server_wins_when_receiving() const {
    return first_server == Player::A ? a_wins_b_serving
                                     : T(scalar_from_int<T>(1) - a_wins_a_serving);
  }
  const T& expected_length() const {
    return first_server == Player::A ? length_a_serving : length_b_serving;
  }
};

namespace detail {

/// Two-point transition structure of a deuce: from a tie with a given
/// server, the deuce either ends (A or B leads by two) or returns to a tie
/// with some server. Index 0 = A serving, 1 = B serving.
template <class T>
struct DeuceTransitions {
  std::array<T, 2> a_wins{};
  std::array<std::array<T, 2>, 2> to_tie{};  // [from][to]
};

inline int slot(Player p) { return p == Player::A ? 0 : 1; }

template <class T>
DeuceTransitions<T> deuce_transitions(const RuleKind& rule, const T& p, const T& q) {
  // A tie at 0-0 needing a two-point lead has the same dynamics as any deuce.
  const MatchFormat deuce{1, 2};
  const T one = scalar_from_int<T>(1);
  auto win_prob = [&](Player server) -> const T& { return server == Player::A ? p : q; };

  DeuceTransitions<T> out;
  for (Player start : {Player::A, Player::B}) {
    const GameState tie{start, 0, 0};
    for (Player first : {Player::A, Player::B}) {
      const T first_mass = first == start ? win_prob(start) : T(one - win_prob(start));
      const GameState mid{next_server(rule, deuce, tie, first), first == Player::A ? 1 : 0,
                          first == Player::B ? 1 : 0};
      for (Player second : {Player::A, Player::B}) {
        const T second_mass =
            second == mid.server ? win_prob(mid.server) : T(one - win_prob(mid.server));
        const T mass = first_mass * second_mass;
        if (first == second) {
          if (first == Player::A) out.a_wins[slot(start)] += mass;
          continue;
        }
        const Player tie_server = next_server(rule, deuce, mid, second);
        out.to_tie[slot(start)][slot(tie_server)] += mass;
      }
    }
  }
  return out;
}

/// Solves x = rhs + M x for the two tie states; returns false when I - M is
/// singular (play from a tie never ends).
template <class T>
bool solve_tie_system(const DeuceTransitions<T>& tr, const std::array<T, 2>& rhs,
                      std::array<T, 2>& x) {
  const T one = scalar_from_int<T>(1);
  const T m00 = one - tr.to_tie[0][0];
  const T m01 = -tr.to_tie[0][1];
  const T m10 = -tr.to_tie[1][0];
  const T m11 = one - tr.to_tie[1][1];
  const T det = m00 * m11 - m01 * m10;
  if (ScalarTraits<T>::is_zero(det)) return false;
  x[0] = (rhs[0] * m11 - m01 * rhs[1]) / det;
  x[1] = (m00 * rhs[1] - m10 * rhs[0]) / det;
  return true;
}

inline void require_sr_or_cr(const RuleKind& rule) {
  if (rule.kind != RuleKind::Kind::kStandard && rule.kind != RuleKind::Kind::kCatchUp) {
    throw std::invalid_argument("deuce analysis supports only SR and CR");
  }
}

template <class T>
std::string degenerate_message(const RuleKind& rule, const T& p, const T& q) {
  std::ostringstream where;
  where << "p=" << to_double(p) << ", q=" << to_double(q);
  return rule.name() + " deuce with " + where.str() + " never ends: " +
         (rule.kind == RuleKind::Kind::kStandard ? "every server loses every point"
                                                 : "every server wins every point");
}

}  // namespace detail

/// Win probabilities and expected lengths of a deuce with arbitrary p and q.
/// Throws UndefinedQuantity when play from a tie never terminates
/// (SR with p = q = 0, CR with p = q = 1).
template <class T>
DeuceSolution<T> solve_deuce(const RuleKind& rule, const T& p, const T& q,
                             Player first_server = Player::A) {
  detail::require_sr_or_cr(rule);
  ServeModel<T>(p, q).validated();
  const auto tr = detail::deuce_transitions(rule, p, q);
  std::array<T, 2> wins{};
  if (!detail::solve_tie_system(tr, tr.a_wins, wins)) {
    throw UndefinedQuantity("win probability undefined: " + detail::degenerate_message(rule, p, q));
  }
  const T two = scalar_from_int<T>(2);
  std::array<T, 2> lengths{};
  detail::solve_tie_system(tr, {two, two}, lengths);

  DeuceSolution<T> out;
  out.first_server = first_server;
  out.a_wins_a_serving = wins[0];
  out.a_wins_b_serving = wins[1];
  out.length_a_serving = lengths[0];
  out.length_b_serving = lengths[1];
  return out;
}

/// Expected number of deuce points; throws DivergentQuantity where the deuce
/// never ends.
template <class T>
T deuce_expected_length(const RuleKind& rule, const T& p, const T& q,
                        Player first_server = Player::A) {
  try {
    return solve_deuce(rule, p, q, first_server).expected_length();
  } catch (const UndefinedQuantity&) {
    throw DivergentQuantity("expected length infinite: " + detail::degenerate_message(rule, p, q));
  }
}

/// Win-by-Two game: pre-tie play composed with the deuce.
template <class T>
struct WinByTwoAnalysis {
  T qr_a{};
  T qr_b{};
  T pr_tie{};
  T el_wb1{};
  T el_wb2{};
  GameAnalysis<T> win_by_one;  // same rule and probabilities without the tiebreak
};

template <class T>
WinByTwoAnalysis<T> analyze_win_by_two(const RuleKind& rule, const MatchFormat& format,
                                       const ServeModel<T>& model,
                                       Player first_server = Player::A) {
  detail::require_sr_or_cr(rule);
  format.validated();
  model.validated();
  if (format.win_by != 2) throw std::invalid_argument("analyze_win_by_two requires win_by = 2");
  if (model.has_sequences()) {
    throw std::invalid_argument("Win-by-Two analysis needs constant serve probabilities");
  }

  const MatchFormat wb1{format.points_to_win, 1};
  const auto flow = detail::propagate(rule, wb1, model, first_server, /*stop_at_tie=*/true);

  WinByTwoAnalysis<T> out;
  out.win_by_one = analyze_win_by_one(rule, wb1, model, first_server);
  out.el_wb1 = out.win_by_one.expected_length;
  out.pr_tie = flow.tie_a_serving + flow.tie_b_serving;
  out.qr_a = flow.a_wins;
  out.qr_b = flow.b_wins;
  out.el_wb2 = detail::mean_of(flow.lengths);

  if (!ScalarTraits<T>::is_zero(out.pr_tie)) {
    const auto deuce = solve_deuce(rule, model.p, model.q);
    const T one = scalar_from_int<T>(1);
    const T tie_points = scalar_from_int<T>(2 * format.k());
    out.qr_a += flow.tie_a_serving * deuce.a_wins_a_serving +
                flow.tie_b_serving * deuce.a_wins_b_serving;
    out.qr_b += flow.tie_a_serving * (one - deuce.a_wins_a_serving) +
                flow.tie_b_serving * (one - deuce.a_wins_b_serving);
    out.el_wb2 += flow.tie_a_serving * (tie_points + deuce.length_a_serving) +
                  flow.tie_b_serving * (tie_points + deuce.length_b_serving);
  }
  return out;
}

}  // namespace servicerule
