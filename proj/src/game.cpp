#include "socialtd/game.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace socialtd {
namespace {

constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
}};

constexpr std::array<std::uint32_t, 10> kPow3 = {1,   3,    9,    27,   81,
                                                 243, 729, 2187, 6561, 19683};

bool has_line(const GameState& s, Mark m) {
  for (const auto& line : kLines) {
    if (s.cells[line[0]] == m && s.cells[line[1]] == m && s.cells[line[2]] == m) {
      return true;
    }
  }
  return false;
}

}  // namespace

char to_char(Mark m) {
  switch (m) {
    case Mark::Cross:
      return 'X';
    case Mark::Nought:
      return 'O';
    case Mark::Empty:
      break;
  }
  return '.';
}

std::string to_string(const Outcome& o) {
  switch (o.kind()) {
    case Outcome::Kind::Ongoing:
      return "ongoing";
    case Outcome::Kind::Draw:
      return "draw";
    case Outcome::Kind::Win:
      break;
  }
  return std::string("win:") + to_char(o.winner());
}

GameState GameState::initial(Mark starter) {
  if (starter == Mark::Empty) throw InvalidStateError("starter must be Cross or Nought");
  GameState s;
  s.to_move = starter;
  return s;
}

GameState GameState::parse(std::string_view board, Mark to_move) {
  GameState s;
  s.to_move = to_move;
  int i = 0;
  for (char c : board) {
    if (c == ' ' || c == '|' || c == '\n' || c == '/') continue;
    if (i >= kNumCells) throw InvalidStateError("board string has more than 9 cells");
    switch (c) {
      case 'X':
      case 'x':
        s.cells[i] = Mark::Cross;
        break;
      case 'O':
      case 'o':
        s.cells[i] = Mark::Nought;
        break;
      case '.':
      case '-':
        s.cells[i] = Mark::Empty;
        break;
      default:
        throw InvalidStateError(std::string("bad board character '") + c + "'");
    }
    ++i;
  }
  if (i != kNumCells) throw InvalidStateError("board string must have 9 cells");
  if (to_move == Mark::Empty) throw InvalidStateError("to_move must not be Empty");
  return s;
}

int GameState::count(Mark m) const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), m));
}

bool GameState::full() const { return count(Mark::Empty) == 0; }

std::string GameState::board_string() const {
  std::string out;
  for (int i = 0; i < kNumCells; ++i) {
    if (i > 0 && i % 3 == 0) out.push_back('|');
    out.push_back(to_char(cells[i]));
  }
  return out;
}

bool is_valid(const GameState& s) {
  if (s.to_move == Mark::Empty) return false;
  const int diff = s.count(Mark::Cross) - s.count(Mark::Nought);
  if (diff > 1 || diff < -1) return false;
  if (diff == 1 && s.to_move != Mark::Nought) return false;
  if (diff == -1 && s.to_move != Mark::Cross) return false;

  const bool cross_line = has_line(s, Mark::Cross);
  const bool nought_line = has_line(s, Mark::Nought);
  if (cross_line && nought_line) return false;
  if (!cross_line && !nought_line) return true;

  const Mark winner = cross_line ? Mark::Cross : Mark::Nought;
  if (s.to_move == winner) return false;
  // Winner moved last, and that single move completed every line it owns.
  for (int i = 0; i < kNumCells; ++i) {
    if (s.cells[i] != winner) continue;
    GameState before = s;
    before.cells[i] = Mark::Empty;
    if (!has_line(before, winner)) return true;
  }
  return false;
}

Outcome outcome(const GameState& s) {
  if (has_line(s, Mark::Cross)) return Outcome::win(Mark::Cross);
  if (has_line(s, Mark::Nought)) return Outcome::win(Mark::Nought);
  if (s.full()) return Outcome::draw();
  return Outcome::ongoing();
}

std::vector<Action> legal_actions(const GameState& s) {
  if (outcome(s).is_terminal()) {
    throw IllegalMoveError("legal_actions on terminal state " + s.board_string());
  }
  std::vector<Action> actions;
  actions.reserve(kNumCells);
  for (int i = 0; i < kNumCells; ++i) {
    if (s.cells[i] == Mark::Empty) actions.push_back(Action{i});
  }
  return actions;
}

GameState apply(const GameState& s, Action a) {
  if (a.cell < 0 || a.cell >= kNumCells) {
    throw IllegalMoveError("cell " + std::to_string(a.cell) + " out of range");
  }
  if (s.cells[a.cell] != Mark::Empty) {
    throw IllegalMoveError("cell " + std::to_string(a.cell) + " is occupied in " +
                           s.board_string());
  }
  if (outcome(s).is_terminal()) {
    throw IllegalMoveError("move on terminal state " + s.board_string());
  }
  GameState next = s;
  next.cells[a.cell] = s.to_move;
  next.to_move = opponent(s.to_move);
  return next;
}

double reward(const Outcome& o, Mark perspective) {
  if (o.kind() != Outcome::Kind::Win) return 0.0;
  return o.winner() == perspective ? 1.0 : -1.0;
}

StateKey encode(const GameState& s) {
  std::uint32_t key = 0;
  for (int i = 0; i < kNumCells; ++i) {
    key += static_cast<std::uint32_t>(s.cells[i]) * kPow3[i];
  }
  if (s.to_move == Mark::Nought) key += kPow3[9];
  return StateKey{key};
}

GameState decode(StateKey key) {
  if (key.value >= kNumStateKeys) {
    throw InvalidStateError("state key " + std::to_string(key.value) + " out of range");
  }
  GameState s;
  std::uint32_t v = key.value;
  for (int i = 0; i < kNumCells; ++i) {
    s.cells[i] = static_cast<Mark>(v % 3);
    v /= 3;
  }
  s.to_move = v == 0 ? Mark::Cross : Mark::Nought;
  if (!is_valid(s)) {
    throw InvalidStateError("state key " + std::to_string(key.value) +
                            " encodes invalid board " + s.board_string());
  }
  return s;
}

Mark cell_of(StateKey key, int cell) {
  return static_cast<Mark>((key.value / kPow3[cell]) % 3);
}

std::vector<GameState> enumerate_reachable_states() {
  std::set<std::uint32_t> seen;
  std::queue<GameState> frontier;
  for (Mark starter : {Mark::Cross, Mark::Nought}) {
    GameState root = GameState::initial(starter);
    if (seen.insert(encode(root).value).second) frontier.push(root);
  }
  while (!frontier.empty()) {
    GameState s = frontier.front();
    frontier.pop();
    if (outcome(s).is_terminal()) continue;
    for (Action a : legal_actions(s)) {
      GameState next = apply(s, a);
      if (seen.insert(encode(next).value).second) frontier.push(next);
    }
  }
  std::vector<GameState> out;
  out.reserve(seen.size());
  for (std::uint32_t k : seen) out.push_back(decode(StateKey{k}));
  return out;
}

const std::array<std::array<int, kNumCells>, 8>& board_symmetries() {
  static const std::array<std::array<int, kNumCells>, 8> kSyms = {{
      {0, 1, 2, 3, 4, 5, 6, 7, 8},  // identity
      {6, 3, 0, 7, 4, 1, 8, 5, 2},  // rotate 90
      {8, 7, 6, 5, 4, 3, 2, 1, 0},  // rotate 180
      {2, 5, 8, 1, 4, 7, 0, 3, 6},  // rotate 270
      {2, 1, 0, 5, 4, 3, 8, 7, 6},  // mirror columns
      {6, 7, 8, 3, 4, 5, 0, 1, 2},  // mirror rows
      {0, 3, 6, 1, 4, 7, 2, 5, 8},  // main diagonal
      {8, 5, 2, 7, 4, 1, 6, 3, 0},  // anti-diagonal
  }};
  return kSyms;
}

GameState transform(const GameState& s, const std::array<int, kNumCells>& perm) {
  GameState out;
  out.to_move = s.to_move;
  for (int i = 0; i < kNumCells; ++i) out.cells[i] = s.cells[perm[i]];
  return out;
}

}  // namespace socialtd
