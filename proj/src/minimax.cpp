#include "socialtd/minimax.hpp"

namespace socialtd {

const MinimaxOracle& MinimaxOracle::instance() {
  static const MinimaxOracle oracle;
  return oracle;
}

MinimaxOracle::MinimaxOracle()
    : value_(kNumStateKeys, kUnsolved), best_mask_(kNumStateKeys, 0) {
  search(GameState::initial(Mark::Cross));
  search(GameState::initial(Mark::Nought));
}

int MinimaxOracle::search(const GameState& s) {
  const StateKey key = encode(s);
  if (value_[key.value] != kUnsolved) return value_[key.value];

  int best = -2;
  std::uint16_t mask = 0;
  for (int cell = 0; cell < kNumCells; ++cell) {
    if (s.cells[cell] != Mark::Empty) continue;
    const GameState next = apply(s, Action{cell});
    const Outcome o = outcome(next);
    const int v = o.is_terminal() ? static_cast<int>(reward(o, s.to_move)) : -search(next);
    if (v > best) {
      best = v;
      mask = 0;
    }
    if (v == best) mask |= static_cast<std::uint16_t>(1u << cell);
  }
  value_[key.value] = static_cast<std::int8_t>(best);
  best_mask_[key.value] = mask;
  ++solved_;
  return best;
}

void MinimaxOracle::check(const GameState& s, StateKey key) const {
  if (outcome(s).is_terminal()) {
    throw IllegalMoveError("minimax on terminal state " + s.board_string());
  }
  if (value_[key.value] == kUnsolved) {
    throw InvalidStateError("minimax on unreachable state " + s.board_string());
  }
}

MinimaxResult MinimaxOracle::solve(const GameState& s) const {
  const StateKey key = encode(s);
  check(s, key);
  MinimaxResult r;
  r.value = value_[key.value];
  for (int cell = 0; cell < kNumCells; ++cell) {
    if (best_mask_[key.value] & (1u << cell)) r.best_actions.push_back(Action{cell});
  }
  return r;
}

int MinimaxOracle::action_value(const GameState& s, Action a) const {
  check(s, encode(s));
  const GameState next = apply(s, a);
  const Outcome o = outcome(next);
  if (o.is_terminal()) return static_cast<int>(reward(o, s.to_move));
  return -value_[encode(next).value];
}

bool MinimaxOracle::is_best(const GameState& s, Action a) const {
  const StateKey key = encode(s);
  check(s, key);
  return a.cell >= 0 && a.cell < kNumCells && (best_mask_[key.value] & (1u << a.cell));
}

}  // namespace socialtd
