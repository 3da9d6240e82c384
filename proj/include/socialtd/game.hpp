#pragma once

// Tic-Tac-Toe rules, the ten-variable state encoding and terminal rewards.
//
// Cells are indexed row-major from the top-left corner:
//
//   0 | 1 | 2
//   3 | 4 | 5
//   6 | 7 | 8
//
// Cross is always the mark of whoever moved first in a given game; marks are
// roles, not agent identities.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace socialtd {

inline constexpr int kNumCells = 9;

enum class Mark : std::uint8_t { Empty = 0, Cross = 1, Nought = 2 };

constexpr Mark opponent(Mark m) {
  return m == Mark::Cross ? Mark::Nought : Mark::Cross;
}

char to_char(Mark m);

struct Action {
  int cell = 0;
  friend auto operator<=>(const Action&, const Action&) = default;
};

// Base-3 digits over the nine cells (cell i has weight 3^i) plus 3^9 when
// Nought is to move. The empty board with Cross to move is key 0.
struct StateKey {
  std::uint32_t value = 0;
  friend auto operator<=>(const StateKey&, const StateKey&) = default;
};

inline constexpr std::uint32_t kNumStateKeys = 2 * 19683;

class IllegalMoveError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Outcome {
 public:
  enum class Kind : std::uint8_t { Ongoing, Win, Draw };

  static constexpr Outcome ongoing() { return Outcome(Kind::Ongoing, Mark::Empty); }
  static constexpr Outcome draw() { return Outcome(Kind::Draw, Mark::Empty); }
  static constexpr Outcome win(Mark m) { return Outcome(Kind::Win, m); }

  constexpr Kind kind() const { return kind_; }
  // Empty unless kind() == Win.
  constexpr Mark winner() const { return winner_; }
  constexpr bool is_terminal() const { return kind_ != Kind::Ongoing; }

  friend constexpr bool operator==(const Outcome&, const Outcome&) = default;

 private:
  constexpr Outcome(Kind k, Mark w) : kind_(k), winner_(w) {}
  Kind kind_;
  Mark winner_;
};

std::string to_string(const Outcome& o);

struct GameState {
  std::array<Mark, kNumCells> cells{};
  Mark to_move = Mark::Cross;

  static GameState initial(Mark starter = Mark::Cross);

  // Parses nine characters from {'X','O','.'} (whitespace and '|' ignored).
  static GameState parse(std::string_view board, Mark to_move);

  int count(Mark m) const;
  bool full() const;

  // "XO.|.X.|..O" style rendering.
  std::string board_string() const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

// Structural validity: side-to-move never Empty, piece counts consistent with
// some starter, at most one winning mark, and any win completed by the last
// move.
bool is_valid(const GameState& state);

Outcome outcome(const GameState& state);

// Empty-cell indices in ascending order. Throws IllegalMoveError on terminal
// states.
std::vector<Action> legal_actions(const GameState& state);

// Throws IllegalMoveError if the cell is out of range, occupied, or the state
// is terminal.
GameState apply(const GameState& state, Action action);

// 1.0 for a win from `perspective`, -1.0 for a loss, 0.0 otherwise.
double reward(const Outcome& outcome, Mark perspective);

StateKey encode(const GameState& state);

// Throws InvalidStateError for out-of-range keys and keys of invalid boards.
GameState decode(StateKey key);

// Mark stored at `cell` in an encoded state, without a full decode.
Mark cell_of(StateKey key, int cell);

// All states reachable from the empty board under either starter (terminal
// states included), in ascending key order.
std::vector<GameState> enumerate_reachable_states();

// The eight board symmetries as cell permutations: result.cells[i] =
// state.cells[perm[i]].
const std::array<std::array<int, kNumCells>, 8>& board_symmetries();
GameState transform(const GameState& state, const std::array<int, kNumCells>& perm);

}  // namespace socialtd
