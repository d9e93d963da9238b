#pragma once

#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "servicerule/core.hpp"
#include "servicerule/engine.hpp"
#include "servicerule/parallel.hpp"
#include "servicerule/scalar.hpp"

namespace servicerule {

namespace detail {

inline void require_reachable_shape(const RuleKind& rule, const GameState& state,
                                    const MatchFormat& format) {
  if (is_terminal(format, state.score_a, state.score_b)) return;
  if (rule.is_trailing() && state.score_a != state.score_b &&
      state.server != (state.score_a < state.score_b ? Player::A : Player::B)) {
    throw std::invalid_argument("under a trailing rule the trailing player must be serving");
  }
}

inline void require_strategy_rule(const RuleKind& rule) {
  if (!rule.is_variable()) {
    throw std::invalid_argument("strategy analysis supports SR, CR, TRa and TRb");
  }
}

}  // namespace detail

/// Win probability of `perspective` from `state` when both players play
/// every point honestly.
template <class T>
T honest_value(const RuleKind& rule, const MatchFormat& format, const ServeModel<T>& model,
               const GameState& state, Player perspective) {
  const WinTable<T> table(rule, format, model);
  table.check(state);
  detail::require_reachable_shape(rule, state, table.format());
  return table.wins(state, perspective);
}

/// Best win probability for `strategizer` when, on any point, they may
/// either play honestly or throw the point (as server or receiver); the
/// opponent always plays honestly.
template <class T>
class DeviationTable {
 public:
  DeviationTable(const WinTable<T>& honest, Player strategizer)
      : honest_(honest), strategizer_(strategizer) {
    const int target = honest_.format().points_to_win;
    const int n = target + 1;
    values_.assign(static_cast<std::size_t>(2 * n * n), T{});
    for (int total = 2 * target - 1; total >= 0; --total) {
      for (int a = std::min(total, target); a >= 0 && total - a <= target; --a) {
        for (Player server : {Player::A, Player::B}) {
          const GameState s{server, a, total - a};
          values_[index(s)] = compute(s);
        }
      }
    }
  }

  Player strategizer() const { return strategizer_; }

  const T& value(const GameState& state) const {
    honest_.check(state);
    return values_[index(state)];
  }

  /// Value of throwing the point at nonterminal `state`, then playing optimally.
  const T& tank_value(const GameState& state) const {
    return values_[index(honest_.successor(state, other(strategizer_)))];
  }

 private:
  std::size_t index(const GameState& s) const {
    const int n = honest_.format().points_to_win + 1;
    return static_cast<std::size_t>(((s.server == Player::A ? 0 : 1) * n + s.score_a) * n + s.score_b);
  }

  T compute(const GameState& s) const {
    if (honest_.terminal(s)) return honest_.wins(s, strategizer_);
    const T& win = honest_.model().serve_win(s.server, 0);
    const T& if_server_wins = values_[index(honest_.successor(s, s.server))];
    const T& if_server_loses = values_[index(honest_.successor(s, other(s.server)))];
    const T play = win * if_server_wins + (scalar_from_int<T>(1) - win) * if_server_loses;
    const T& tank = s.server == strategizer_ ? if_server_loses : if_server_wins;
    return ScalarTraits<T>::greater(tank, play) ? tank : play;
  }

  const WinTable<T>& honest_;
  Player strategizer_;
  std::vector<T> values_;
};

/// Optimal win probability for `strategizer` from the opening state when
/// deliberate point losses are allowed.
template <class T>
T optimal_deviation_value(const RuleKind& rule, const MatchFormat& format, const ServeModel<T>& model,
                          Player strategizer, Player first_server = Player::A) {
  detail::require_strategy_rule(rule);
  const WinTable<T> honest(rule, format, model);
  const DeviationTable<T> deviation(honest, strategizer);
  return deviation.value(GameState{initial_server(rule, first_server), 0, 0});
}

template <class T>
struct StrategyWitness {
  GameState state;
  T honest_value;
  T tanking_value;  // optimal value with deliberate losses allowed
};

template <class T>
struct StrategyVerdict {
  bool strategy_proof = true;
  Player strategizer = Player::A;
  std::optional<StrategyWitness<T>> witness;
};

/// Every state reachable from the opening state (both outcomes of each
/// point considered possible), in breadth-first order.
template <class T>
std::vector<GameState> reachable_states(const WinTable<T>& table, Player first_server = Player::A) {
  std::vector<GameState> order;
  std::set<GameState> seen;
  std::deque<GameState> frontier{GameState{initial_server(table.rule(), first_server), 0, 0}};
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    const GameState s = frontier.front();
    frontier.pop_front();
    order.push_back(s);
    if (table.terminal(s)) continue;
    for (Player winner : {s.server, other(s.server)}) {
      const GameState next = table.successor(s, winner);
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return order;
}

/// Strategy-proof iff deliberate losses never strictly raise the
/// strategizer's win probability at any reachable state. The witness is the
/// first improving state in breadth-first order.
template <class T>
StrategyVerdict<T> is_strategy_proof(const RuleKind& rule, const MatchFormat& format,
                                     const ServeModel<T>& model, Player strategizer,
                                     Player first_server = Player::A) {
  detail::require_strategy_rule(rule);
  const WinTable<T> honest(rule, format, model);
  const DeviationTable<T> deviation(honest, strategizer);
  StrategyVerdict<T> verdict;
  verdict.strategizer = strategizer;
  for (const GameState& s : reachable_states(honest, first_server)) {
    if (honest.terminal(s)) continue;
    const T fair = honest.wins(s, strategizer);
    const T& best = deviation.value(s);
    if (ScalarTraits<T>::greater(best, fair)) {
      verdict.strategy_proof = false;
      verdict.witness = StrategyWitness<T>{s, fair, best};
      break;
    }
  }
  return verdict;
}

struct ScanCell {
  Rational p;
  Rational q;
  bool vulnerable_for_a = false;
  bool vulnerable_for_b = false;
  bool vulnerable() const { return vulnerable_for_a || vulnerable_for_b; }
};

/// Strategy verdicts on the interior grid p, q in {1/N, ..., (N-1)/N} of a
/// Best-of-(2k+1) Win-by-One game, exact arithmetic, row-major in p.
inline std::vector<ScanCell> vulnerability_region_scan(const RuleKind& rule, int k, int divisions) {
  detail::require_strategy_rule(rule);
  if (divisions < 2) throw std::invalid_argument("grid needs at least 2 divisions");
  if (k < 1) throw std::invalid_argument("region scan needs k >= 1");
  const int side = divisions - 1;
  const MatchFormat format{k + 1, 1};
  const auto parts = parallel_chunks(static_cast<std::uint64_t>(side * side),
                                     [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<ScanCell> cells;
    for (std::uint64_t c = begin; c < end; ++c) {
      ScanCell cell;
      cell.p = Rational(static_cast<long>(c / side) + 1, divisions);
      cell.q = Rational(static_cast<long>(c % side) + 1, divisions);
      cell.p.canonicalize();
      cell.q.canonicalize();
      const ServeModel<Rational> model(cell.p, cell.q);
      cell.vulnerable_for_a = !is_strategy_proof(rule, format, model, Player::A).strategy_proof;
      cell.vulnerable_for_b = !is_strategy_proof(rule, format, model, Player::B).strategy_proof;
      cells.push_back(cell);
    }
    return cells;
  });
  std::vector<ScanCell> out;
  for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

}  // namespace servicerule
