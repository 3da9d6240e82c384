#include "socialtd/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "socialtd/minimax.hpp"

namespace socialtd {

Action GreedyPolicy::choose(const GameState& state, std::span<const Action> legal,
                            Rng& rng) const {
  return greedy_action(*q_, encode(state), legal, rng);
}

Action OraclePolicy::choose(const GameState& state, std::span<const Action>, Rng& rng) const {
  const MinimaxResult r = minimax(state);
  return r.best_actions[rng.below(r.best_actions.size())];
}

Action RandomPolicy::choose(const GameState&, std::span<const Action> legal, Rng& rng) const {
  return legal[rng.below(legal.size())];
}

MatchResult play_match(const Policy& cross, const Policy& nought, Rng& rng) {
  GameState s = GameState::initial(Mark::Cross);
  MatchResult r;
  while (!r.outcome.is_terminal()) {
    const std::vector<Action> legal = legal_actions(s);
    const Policy& mover = s.to_move == Mark::Cross ? cross : nought;
    s = apply(s, mover.choose(s, legal, rng));
    ++r.plies;
    r.outcome = outcome(s);
  }
  return r;
}

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy:
      return "easy";
    case Difficulty::Intermediate:
      return "intermediate";
    case Difficulty::Hard:
      break;
  }
  return "hard";
}

Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "intermediate") return Difficulty::Intermediate;
  if (s == "hard") return Difficulty::Hard;
  throw std::invalid_argument("unknown difficulty '" + std::string(s) + "'");
}

std::string to_string(Level l) {
  switch (l) {
    case Level::Beginner:
      return "beginner";
    case Level::Intermediate:
      return "intermediate";
    case Level::Advanced:
      break;
  }
  return "advanced";
}

std::optional<Difficulty> classify_board(const GameState& state) {
  if (!is_valid(state) || outcome(state).is_terminal()) return std::nullopt;
  const MinimaxOracle& oracle = MinimaxOracle::instance();
  const MinimaxResult r = oracle.solve(state);
  if (r.best_actions.size() != 1) return std::nullopt;
  const Action best = r.best_actions.front();
  const bool wins_now = outcome(apply(state, best)) == Outcome::win(state.to_move);

  if (r.value == 1) return wins_now ? Difficulty::Easy : Difficulty::Hard;
  if (r.value == 0) {
    for (Action a : legal_actions(state)) {
      if (a != best && oracle.action_value(state, a) != -1) return std::nullopt;
    }
    // Defensive boards only: the opponent threatens to win on the correct cell.
    GameState threat = state;
    threat.cells[best.cell] = opponent(state.to_move);
    if (outcome(threat) != Outcome::win(opponent(state.to_move))) return std::nullopt;
    return Difficulty::Intermediate;
  }
  return std::nullopt;
}

namespace {

std::string describe(const GameState& s, Difficulty d, Action best) {
  std::string who(1, to_char(s.to_move));
  switch (d) {
    case Difficulty::Easy:
      return who + " to play, wins immediately at cell " + std::to_string(best.cell);
    case Difficulty::Intermediate:
      return who + " to play, must block at cell " + std::to_string(best.cell);
    case Difficulty::Hard:
      break;
  }
  return who + " to play, cell " + std::to_string(best.cell) + " forces a later win";
}

}  // namespace

std::vector<TestBoard> generate_test_boards() {
  std::array<std::vector<TestBoard>, 3> tiers;
  for (const GameState& s : enumerate_reachable_states()) {
    const std::optional<Difficulty> d = classify_board(s);
    if (!d) continue;
    auto& tier = tiers[static_cast<int>(*d)];
    if (static_cast<int>(tier.size()) >= kBoardsPerTier[static_cast<int>(*d)]) continue;
    const Action best = minimax(s).best_actions.front();
    tier.push_back(TestBoard{s, {best}, *d, describe(s, *d, best)});
  }
  std::vector<TestBoard> out;
  for (int t = 0; t < 3; ++t) {
    if (static_cast<int>(tiers[t].size()) < kBoardsPerTier[t]) {
      throw std::runtime_error("not enough qualifying " +
                               to_string(static_cast<Difficulty>(t)) + " boards");
    }
    out.insert(out.end(), tiers[t].begin(), tiers[t].end());
  }
  return out;
}

std::string format_fixture(std::span<const TestBoard> boards) {
  std::ostringstream out;
  out << "# socialtd board-test fixture v1\n";
  out << "# difficulty key board to_move correct description\n";
  for (const TestBoard& b : boards) {
    out << to_string(b.difficulty) << ' ' << encode(b.state).value << ' '
        << b.state.board_string() << ' ' << to_char(b.state.to_move) << ' ';
    for (std::size_t i = 0; i < b.correct_actions.size(); ++i) {
      if (i > 0) out << ',';
      out << b.correct_actions[i].cell;
    }
    out << ' ' << b.description << '\n';
  }
  return out.str();
}

std::vector<TestBoard> parse_fixture(std::string_view text) {
  std::vector<TestBoard> boards;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string difficulty, board, mover, correct;
    std::uint32_t key = 0;
    if (!(fields >> difficulty >> key >> board >> mover >> correct) || mover.size() != 1) {
      throw std::runtime_error("fixture line " + std::to_string(lineno) + " is malformed");
    }
    if (mover != "X" && mover != "O") {
      throw std::runtime_error("fixture line " + std::to_string(lineno) + ": bad side to move");
    }
    const auto fail = [&](const std::string& what) {
      throw std::runtime_error("fixture line " + std::to_string(lineno) + ": " + what);
    };
    TestBoard b;
    try {
      b.difficulty = parse_difficulty(difficulty);
      b.state = GameState::parse(board, mover == "X" ? Mark::Cross : Mark::Nought);
      std::istringstream cells(correct);
      std::string cell;
      while (std::getline(cells, cell, ',')) b.correct_actions.push_back(Action{std::stoi(cell)});
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (!is_valid(b.state) || outcome(b.state).is_terminal()) fail("board is not playable");
    if (encode(b.state).value != key) fail("key does not match board");
    std::sort(b.correct_actions.begin(), b.correct_actions.end());
    if (b.correct_actions != minimax(b.state).best_actions) {
      fail("correct cells disagree with perfect play");
    }
    std::getline(fields >> std::ws, b.description);
    boards.push_back(std::move(b));
  }
  return boards;
}

std::vector<TestBoard> load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixture(buf.str());
}

std::uint64_t fixture_hash(std::span<const TestBoard> boards) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_fixture(boards)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Level classify_level(int total, const LevelThresholds& t) {
  if (total < 0 || total > 10) {
    throw std::out_of_range("board score " + std::to_string(total) + " outside [0, 10]");
  }
  if (total <= t.beginner_max) return Level::Beginner;
  if (total <= t.intermediate_max) return Level::Intermediate;
  return Level::Advanced;
}

BoardTestReport run_board_test(const Policy& policy, std::span<const TestBoard> boards, Rng& rng,
                               int agent_id, const LevelThresholds& thresholds) {
  BoardTestReport report;
  report.agent_id = agent_id;
  for (const TestBoard& b : boards) {
    const std::vector<Action> legal = legal_actions(b.state);
    const Action a = policy.choose(b.state, legal, rng);
    report.chosen.push_back(a);
    if (std::find(b.correct_actions.begin(), b.correct_actions.end(), a) !=
        b.correct_actions.end()) {
      ++report.total_correct;
      ++report.correct_by_tier[static_cast<int>(b.difficulty)];
    }
  }
  report.level = classify_level(std::min(report.total_correct, 10), thresholds);
  return report;
}

double expected_random_score(std::span<const TestBoard> boards) {
  double e = 0.0;
  for (const TestBoard& b : boards) {
    e += static_cast<double>(b.correct_actions.size()) /
         static_cast<double>(legal_actions(b.state).size());
  }
  return e;
}

WinMatrix::WinMatrix(std::vector<int> ids, long gpp)
    : agents(std::move(ids)),
      wins(agents.size(), std::vector<long>(agents.size(), 0)),
      draws(agents.size(), std::vector<long>(agents.size(), 0)),
      starter_wins(agents.size(), 0),
      starter_games(agents.size(), 0),
      games_per_pair(gpp) {}

bool WinMatrix::accounting_holds() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (wins[i][i] != 0 || draws[i][i] != 0) return false;
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (draws[i][j] != draws[j][i]) return false;
      if (wins[i][j] + wins[j][i] + draws[i][j] != games_per_pair) return false;
    }
  }
  return true;
}

long WinMatrix::total_wins(std::size_t i) const {
  long t = 0;
  for (long w : wins[i]) t += w;
  return t;
}

WinMatrix run_league(std::span<const Policy* const> agents, std::span<const int> ids,
                     long games_per_pair, StarterRule starter_rule, std::uint64_t master_seed) {
  if (agents.size() < 2) throw std::invalid_argument("a league needs at least two agents");
  if (ids.size() != agents.size()) throw std::invalid_argument("one id per league agent");
  if (games_per_pair < 0) throw std::invalid_argument("games_per_pair must be nonnegative");
  if (starter_rule == StarterRule::Alternate && games_per_pair % 2 != 0) {
    throw std::invalid_argument("alternating starters need an even games_per_pair");
  }
  WinMatrix m(std::vector<int>(ids.begin(), ids.end()), games_per_pair);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const std::uint64_t pair_seed = derive_seed(
          master_seed, "league/" + std::to_string(ids[i]) + "/" + std::to_string(ids[j]));
      for (long g = 0; g < games_per_pair; ++g) {
        Rng rng(mix64(pair_seed + static_cast<std::uint64_t>(g)));
        bool i_starts;
        if (starter_rule == StarterRule::Alternate) {
          i_starts = g % 2 == 0;
        } else {
          i_starts = rng.below(2) == 0;
        }
        const std::size_t first = i_starts ? i : j;
        const std::size_t second = i_starts ? j : i;
        const MatchResult r = play_match(*agents[first], *agents[second], rng);
        ++m.starter_games[first];
        if (r.outcome.kind() == Outcome::Kind::Draw) {
          ++m.draws[i][j];
          ++m.draws[j][i];
        } else if (r.outcome.winner() == Mark::Cross) {
          ++m.wins[first][second];
          ++m.starter_wins[first];
        } else {
          ++m.wins[second][first];
        }
      }
    }
  }
  return m;
}

double starter_advantage(const WinMatrix& m) {
  long wins = 0, games = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    wins += m.starter_wins[i];
    games += m.starter_games[i];
  }
  return games == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(games);
}

double starter_decisive_share(const WinMatrix& m) {
  long starter = 0, decisive = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    starter += m.starter_wins[i];
    decisive += m.total_wins(i);
  }
  return decisive == 0 ? 0.0 : static_cast<double>(starter) / static_cast<double>(decisive);
}

}  // namespace socialtd
