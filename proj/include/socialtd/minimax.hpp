#pragma once

// Exact game-theoretic solver. Every reachable non-terminal state is solved
// once when the oracle is first used; afterwards the table is read-only and
// safe to share between threads.

#include <cstdint>
#include <vector>

#include "socialtd/game.hpp"

namespace socialtd {

struct MinimaxResult {
  // -1, 0 or +1 from the side-to-move's perspective under optimal play.
  int value = 0;
  // Every action achieving `value`, ascending.
  std::vector<Action> best_actions;
};

class MinimaxOracle {
 public:
  static const MinimaxOracle& instance();

  // Throws IllegalMoveError for terminal states, InvalidStateError for
  // boards that cannot arise in play.
  MinimaxResult solve(const GameState& state) const;

  // Value to the mover of playing `action` in `state`.
  int action_value(const GameState& state, Action action) const;

  bool is_best(const GameState& state, Action action) const;

  std::size_t solved_states() const { return solved_; }

 private:
  MinimaxOracle();
  int search(const GameState& state);
  void check(const GameState& state, StateKey key) const;

  static constexpr std::int8_t kUnsolved = 2;
  std::vector<std::int8_t> value_;
  std::vector<std::uint16_t> best_mask_;
  std::size_t solved_ = 0;
};

inline MinimaxResult minimax(const GameState& state) {
  return MinimaxOracle::instance().solve(state);
}

}  // namespace socialtd
