#pragma once

// The game controller and the three training regimes.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "socialtd/game.hpp"
#include "socialtd/random.hpp"
#include "socialtd/rl.hpp"

namespace socialtd {

struct Agent {
  AgentIdentity identity;
  QTable q;
  Rng rng;

  static Agent create(int id, std::uint64_t seed, const ExplorationSchedule& schedule,
                      const IdentityRanges& ranges = {}, Bootstrap bootstrap = Bootstrap::Max);

  int id() const { return identity.id; }
  double epsilon() const { return epsilon_at(identity.params, identity.episodes_trained); }
};

enum class Regime : std::uint8_t { SelfPlay, RoundRobin, ModifiedSwiss };
enum class StarterRule : std::uint8_t { Random, Alternate };

std::string to_string(Regime r);
Regime parse_regime(std::string_view s);
std::string to_string(StarterRule r);
StarterRule parse_starter_rule(std::string_view s);

struct PopulationConfig {
  int size = 4;
  Regime regime = Regime::ModifiedSwiss;
  long episodes_per_agent = 50000;
  std::uint64_t master_seed = 0;
  StarterRule starter_rule = StarterRule::Random;
  // Unset means ExplorationSchedule::for_budget(episodes_per_agent).
  std::optional<ExplorationSchedule> schedule;
  IdentityRanges ranges;
  Bootstrap bootstrap = Bootstrap::Max;

  ExplorationSchedule effective_schedule() const;
  // Throws std::invalid_argument.
  void validate() const;
};

enum class GameResult : std::uint8_t { AWins, BWins, Draw };
std::string to_string(GameResult r);

struct GameRecord {
  long round = 0;
  int agent_a = 0;
  int agent_b = 0;
  int starter = 0;
  GameResult result = GameResult::Draw;
  int plies = 0;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

enum class Pool : std::uint8_t { Winner, Loser };

struct PoolAssignment {
  std::vector<Pool> pool;  // indexed by agent id

  std::vector<int> members(Pool p) const;
  bool balanced() const;
  std::string to_string() const;  // e.g. "WLLW"

  friend bool operator==(const PoolAssignment&, const PoolAssignment&) = default;
};

struct TrainingObserver {
  std::function<void(const GameRecord&)> on_game;
  // Called after pools are reassigned at the end of each Swiss round.
  std::function<void(long round, const PoolAssignment&)> on_swiss_round;
};

// One full game from the empty board between two distinct agents. The
// starter plays Cross. Agents explore per their epsilon schedule; with
// `learn` set each agent runs td_update on its own transitions and its
// episode counter advances.
GameRecord play_training_game(Agent& a, Agent& b, int starter, bool learn, long round = 0);

// One game where `agent` plays both sides with one table and a trace set per
// side.
GameRecord play_self_play_game(Agent& agent, bool learn, long round = 0);

Agent run_self_play(const PopulationConfig& config, const TrainingObserver& observer = {});

std::vector<Agent> make_population(const PopulationConfig& config);

// Circle-method schedule for `size` players; odd sizes get a bye. Each inner
// vector is one round of disjoint pairs, and together the rounds cover every
// unordered pair once.
std::vector<std::vector<std::pair<int, int>>> circle_schedule(int size);

std::vector<Agent> run_round_robin(const PopulationConfig& config,
                                   const TrainingObserver& observer = {});

PoolAssignment swiss_initial_split(int size, Rng& rng);

// Uniformly random perfect matching between the pools, as (winner, loser)
// pairs ordered by winner id.
std::vector<std::pair<int, int>> swiss_pairings(const PoolAssignment& pools, Rng& rng);

// Winner of the game joins the Winner pool and the loser the Loser pool; a
// drawn pair keeps its prior pools.
void swiss_reassign(PoolAssignment& pools, const GameRecord& record);

std::vector<Agent> run_modified_swiss(const PopulationConfig& config,
                                      const TrainingObserver& observer = {});

// Dispatches on config.regime. Self-play returns a single agent.
std::vector<Agent> train(const PopulationConfig& config, const TrainingObserver& observer = {});

}  // namespace socialtd
