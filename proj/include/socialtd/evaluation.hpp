#pragma once

// Move-quality board test and all-pairs league play test. Both treat agents
// as frozen policies and never touch their tables.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socialtd/game.hpp"
#include "socialtd/random.hpp"
#include "socialtd/rl.hpp"
#include "socialtd/training.hpp"

namespace socialtd {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action choose(const GameState& state, std::span<const Action> legal,
                        Rng& rng) const = 0;
};

// Greedy over a Q-table with uniform tie-break; the frozen form of an agent.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(const QTable& q) : q_(&q) {}
  Action choose(const GameState& state, std::span<const Action> legal, Rng& rng) const override;

 private:
  const QTable* q_;
};

// Uniform over the minimax-optimal moves.
class OraclePolicy final : public Policy {
 public:
  Action choose(const GameState& state, std::span<const Action> legal, Rng& rng) const override;
};

class RandomPolicy final : public Policy {
 public:
  Action choose(const GameState& state, std::span<const Action> legal, Rng& rng) const override;
};

struct MatchResult {
  Outcome outcome = Outcome::ongoing();
  int plies = 0;
};

// Plays one game from the empty board; `cross` moves first.
MatchResult play_match(const Policy& cross, const Policy& nought, Rng& rng);

// --- board test -------------------------------------------------------------

enum class Difficulty : std::uint8_t { Easy, Intermediate, Hard };
enum class Level : std::uint8_t { Beginner, Intermediate, Advanced };

std::string to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view s);
std::string to_string(Level l);

struct TestBoard {
  GameState state;
  std::vector<Action> correct_actions;
  Difficulty difficulty = Difficulty::Easy;
  std::string description;

  friend bool operator==(const TestBoard&, const TestBoard&) = default;
};

// Tier of a state whose minimax-optimal move is unique, if it fits one:
//   Easy          the optimal move wins on the spot;
//   Intermediate  value 0, every other move loses, and the optimal move
//                 blocks an immediate win by the opponent;
//   Hard          value +1 but the win comes on a later ply.
std::optional<Difficulty> classify_board(const GameState& state);

inline constexpr std::array<int, 3> kBoardsPerTier = {5, 2, 3};

// First qualifying reachable states per tier in ascending key order.
std::vector<TestBoard> generate_test_boards();

// Line-oriented fixture text:
//   # comment
//   <difficulty> <key> <board> <to_move> <correct cells, comma-separated> <description...>
std::string format_fixture(std::span<const TestBoard> boards);
std::vector<TestBoard> parse_fixture(std::string_view text);
std::vector<TestBoard> load_fixture(const std::string& path);

// FNV-1a over the fixture text.
std::uint64_t fixture_hash(std::span<const TestBoard> boards);

struct LevelThresholds {
  int beginner_max = 4;
  int intermediate_max = 7;
};

// Throws std::out_of_range outside [0, 10].
Level classify_level(int total_correct, const LevelThresholds& thresholds = {});

struct BoardTestReport {
  int agent_id = 0;
  int total_correct = 0;
  std::array<int, 3> correct_by_tier{};  // Easy, Intermediate, Hard
  Level level = Level::Beginner;
  std::vector<Action> chosen;  // one per board
};

BoardTestReport run_board_test(const Policy& policy, std::span<const TestBoard> boards,
                               Rng& rng, int agent_id = 0,
                               const LevelThresholds& thresholds = {});

// Expected score of a uniformly random mover: sum of 1 / |legal|.
double expected_random_score(std::span<const TestBoard> boards);

// --- league -----------------------------------------------------------------

struct WinMatrix {
  std::vector<int> agents;
  std::vector<std::vector<long>> wins;   // wins[i][j]: games i won against j
  std::vector<std::vector<long>> draws;  // symmetric
  std::vector<long> starter_wins;        // games i won as the starter
  std::vector<long> starter_games;       // games i started
  long games_per_pair = 0;

  explicit WinMatrix(std::vector<int> ids = {}, long games_per_pair = 0);

  std::size_t size() const { return agents.size(); }
  // wins[i][j] + wins[j][i] + draws[i][j] == games_per_pair off the diagonal,
  // zero diagonal, symmetric draws.
  bool accounting_holds() const;
  long total_wins(std::size_t i) const;
};

// Every unordered pair plays games_per_pair games. Alternate starters need an
// even count. Game g of pair (i, j) draws from a stream derived from
// (master_seed, i, j, g).
WinMatrix run_league(std::span<const Policy* const> agents, std::span<const int> ids,
                     long games_per_pair, StarterRule starter_rule, std::uint64_t master_seed);

// Wins as starter over games as starter, pooled over all agents.
double starter_advantage(const WinMatrix& m);

// Wins as starter over decisive games, pooled over all agents.
double starter_decisive_share(const WinMatrix& m);

}  // namespace socialtd
