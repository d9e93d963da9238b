#pragma once

#include <cctype>
#include <compare>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "servicerule/scalar.hpp"

namespace servicerule {

enum class Player { A, B };

constexpr Player other(Player p) { return p == Player::A ? Player::B : Player::A; }
constexpr char to_char(Player p) { return p == Player::A ? 'A' : 'B'; }

/// A probability that does not exist because play never terminates
/// (e.g. a catch-up deuce in which both players always win on serve).
class UndefinedQuantity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An expected length that is infinite.
class DivergentQuantity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A serving rule asked for a serve that its schedule does not contain.
class ScheduleExhausted : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Which mechanism decides the server of the next point.
struct RuleKind {
  enum class Kind {
    kStandard,       // SR: winner of the last point serves
    kCatchUp,        // CR: loser of the last point serves
    kTrailingAhead,  // TRa: trailing player; at a tie, whoever was ahead before it
    kTrailingBehind, // TRb: trailing player; at a tie, whoever was behind before it
    kAuxiliary,      // AR: A serves k+1 times, then B serves k times
    kFixedSequence,  // fixed pattern, cycled
  };

  Kind kind = Kind::kStandard;
  std::vector<Player> pattern;  // only for kFixedSequence

  static RuleKind standard() { return {Kind::kStandard, {}}; }
  static RuleKind catch_up() { return {Kind::kCatchUp, {}}; }
  static RuleKind trailing_ahead() { return {Kind::kTrailingAhead, {}}; }
  static RuleKind trailing_behind() { return {Kind::kTrailingBehind, {}}; }
  static RuleKind auxiliary() { return {Kind::kAuxiliary, {}}; }
  static RuleKind fixed_sequence(std::vector<Player> pattern) {
    if (pattern.empty()) throw std::invalid_argument("fixed serving sequence must be nonempty");
    return {Kind::kFixedSequence, std::move(pattern)};
  }

  bool is_trailing() const {
    return kind == Kind::kTrailingAhead || kind == Kind::kTrailingBehind;
  }
  bool is_variable() const {
    return kind == Kind::kStandard || kind == Kind::kCatchUp || is_trailing();
  }

  std::string name() const {
    switch (kind) {
      case Kind::kStandard: return "SR";
      case Kind::kCatchUp: return "CR";
      case Kind::kTrailingAhead: return "TRa";
      case Kind::kTrailingBehind: return "TRb";
      case Kind::kAuxiliary: return "AR";
      case Kind::kFixedSequence: {
        std::string s = "FIXED:";
        for (Player p : pattern) s += to_char(p);
        return s;
      }
    }
    return "?";
  }

  friend bool operator==(const RuleKind&, const RuleKind&) = default;
};

/// Parses "sr", "cr", "tra", "trb", "ar" or "fixed:ABBA" (case-insensitive
/// rule names; pattern letters must be A or B).
inline RuleKind parse_rule(std::string_view text) {
  std::string s(text);
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "sr") return RuleKind::standard();
  if (lower == "cr") return RuleKind::catch_up();
  if (lower == "tra") return RuleKind::trailing_ahead();
  if (lower == "trb") return RuleKind::trailing_behind();
  if (lower == "ar") return RuleKind::auxiliary();
  if (lower.rfind("fixed:", 0) == 0) {
    std::vector<Player> pattern;
    for (char c : s.substr(6)) {
      if (c == 'A' || c == 'a') {
        pattern.push_back(Player::A);
      } else if (c == 'B' || c == 'b') {
        pattern.push_back(Player::B);
      } else {
        throw std::invalid_argument("fixed sequence may contain only A and B: '" + s + "'");
      }
    }
    return RuleKind::fixed_sequence(std::move(pattern));
  }
  throw std::invalid_argument("unknown rule '" + s + "' (expected sr, cr, tra, trb, ar, fixed:<AB...>)");
}

/// Points needed to win (k+1) and the required winning margin.
struct MatchFormat {
  int points_to_win = 2;
  int win_by = 1;

  static MatchFormat best_of(int m, int win_by = 1) {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("best-of length must be a positive odd number");
    return MatchFormat{(m + 1) / 2, win_by}.validated();
  }

  /// k in Best-of-(2k+1).
  int k() const { return points_to_win - 1; }

  MatchFormat validated() const {
    if (points_to_win < 1) throw std::invalid_argument("points_to_win must be at least 1");
    if (win_by != 1 && win_by != 2) throw std::invalid_argument("win_by must be 1 or 2");
    return *this;
  }

  friend bool operator==(const MatchFormat&, const MatchFormat&) = default;
};

/// (server, score of A, score of B).
struct GameState {
  Player server = Player::A;
  int score_a = 0;
  int score_b = 0;

  friend auto operator<=>(const GameState&, const GameState&) = default;
};

inline bool is_terminal(const MatchFormat& format, int score_a, int score_b) {
  if (format.win_by == 1) return score_a >= format.points_to_win || score_b >= format.points_to_win;
  return (score_a >= format.points_to_win || score_b >= format.points_to_win) &&
         std::abs(score_a - score_b) >= 2;
}

inline Player leader(int score_a, int score_b) {
  return score_a > score_b ? Player::A : Player::B;
}

/// Server win probabilities: p for A, q for B. Optional per-serve sequences
/// override the constants for a player's i-th serve (1-based); serves past
/// the end of a sequence fall back to the constant.
template <class T>
struct ServeModel {
  T p;
  T q;
  std::vector<T> p_sequence;
  std::vector<T> q_sequence;

  ServeModel(T p_value, T q_value) : p(std::move(p_value)), q(std::move(q_value)) {}

  bool has_sequences() const { return !p_sequence.empty() || !q_sequence.empty(); }

  const T& serve_win(Player server, int serve_number) const {
    const auto& seq = server == Player::A ? p_sequence : q_sequence;
    if (serve_number >= 1 && static_cast<std::size_t>(serve_number) <= seq.size()) {
      return seq[static_cast<std::size_t>(serve_number) - 1];
    }
    return server == Player::A ? p : q;
  }

  /// Swaps the roles of the two players.
  ServeModel swapped() const {
    ServeModel out(q, p);
    out.p_sequence = q_sequence;
    out.q_sequence = p_sequence;
    return out;
  }

  /// Throws std::invalid_argument unless every probability lies in [0, 1].
  const ServeModel& validated() const {
    if constexpr (requires(const T& a) { a < a; }) {
      auto check = [](const T& v) {
        if (v < T(0) || v > T(1)) throw std::invalid_argument("serve probabilities must lie in [0, 1]");
      };
      check(p);
      check(q);
      for (const auto& v : p_sequence) check(v);
      for (const auto& v : q_sequence) check(v);
    }
    return *this;
  }
};

/// One played point: who served and who won it.
struct PointRecord {
  Player server;
  Player winner;
  bool server_lost() const { return server != winner; }
};

/// Result of playing a game out on predetermined serve results.
struct PlayoutRecord {
  Player winner = Player::A;
  std::vector<PointRecord> points;
  int score_a = 0;
  int score_b = 0;
  int serves_a = 0;
  int serves_b = 0;
  /// Score had AR continued through all 2k+1 scheduled serves.
  std::optional<std::pair<int, int>> full_schedule_score;

  int length() const { return static_cast<int>(points.size()); }

  int server_losses() const {
    int n = 0;
    for (const auto& pt : points) n += pt.server_lost() ? 1 : 0;
    return n;
  }

  /// "A B~ A~": point winners, "~" marking a server loss.
  std::string outcome_string() const {
    std::string out;
    for (const auto& pt : points) {
      if (!out.empty()) out += ' ';
      out += to_char(pt.winner);
      if (pt.server_lost()) out += '~';
    }
    return out;
  }
};

/// Server of the first point.
inline Player initial_server(const RuleKind& rule, Player first_server = Player::A) {
  switch (rule.kind) {
    case RuleKind::Kind::kAuxiliary: return Player::A;
    case RuleKind::Kind::kFixedSequence: return rule.pattern.front();
    default: return first_server;
  }
}

/// Server for the point after `before`, given who won the point played in
/// `before`. Requires `before` to be nonterminal under `format`.
inline Player next_server(const RuleKind& rule, const MatchFormat& format, const GameState& before,
                          Player point_winner) {
  if (is_terminal(format, before.score_a, before.score_b)) {
    throw std::invalid_argument("next_server called on a terminal state");
  }
  const int after_a = before.score_a + (point_winner == Player::A ? 1 : 0);
  const int after_b = before.score_b + (point_winner == Player::B ? 1 : 0);
  const int next_index = after_a + after_b;  // 0-based index of the coming serve

  switch (rule.kind) {
    case RuleKind::Kind::kStandard:
      return point_winner;
    case RuleKind::Kind::kCatchUp:
      return other(point_winner);
    case RuleKind::Kind::kTrailingAhead:
    case RuleKind::Kind::kTrailingBehind:
      if (after_a != after_b) return after_a < after_b ? Player::A : Player::B;
      // New tie: the player ahead before it lost the point that created it.
      return rule.kind == RuleKind::Kind::kTrailingAhead ? other(point_winner) : point_winner;
    case RuleKind::Kind::kAuxiliary: {
      const int k = format.k();
      if (next_index < k + 1) return Player::A;
      if (next_index < 2 * k + 1) return Player::B;
      throw ScheduleExhausted("AR schedule has only 2k+1 serves");
    }
    case RuleKind::Kind::kFixedSequence:
      return rule.pattern[static_cast<std::size_t>(next_index) % rule.pattern.size()];
  }
  throw std::logic_error("unhandled rule kind");
}

}  // namespace servicerule
