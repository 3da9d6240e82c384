#include "socialtd/training.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace socialtd {
namespace {

struct LegalMoves {
  std::array<Action, kNumCells> buf{};
  std::size_t n = 0;
  std::span<const Action> span() const { return {buf.data(), n}; }
};

LegalMoves legal_moves(const GameState& s) {
  LegalMoves m;
  for (int i = 0; i < kNumCells; ++i) {
    if (s.cells[i] == Mark::Empty) m.buf[m.n++] = Action{i};
  }
  return m;
}

// One side of the board during a game.
struct Seat {
  QTable* q;
  Rng* rng;
  const Hyperparameters* params;
  double epsilon;
  Mark mark;
  EligibilityTraces traces;
  std::optional<std::pair<StateKey, Action>> pending;
};

struct EpisodeResult {
  Outcome outcome = Outcome::ongoing();
  int plies = 0;
};

EpisodeResult play_episode(Seat& cross, Seat& nought, bool learn) {
  begin_episode(cross.traces);
  begin_episode(nought.traces);
  GameState s = GameState::initial(Mark::Cross);
  EpisodeResult result;
  while (true) {
    Seat& me = s.to_move == Mark::Cross ? cross : nought;
    const StateKey key = encode(s);
    const LegalMoves legal = legal_moves(s);
    const Action a = select_action(*me.q, key, legal.span(), me.epsilon, *me.rng);
    if (learn && me.pending) {
      Transition t{me.pending->first, me.pending->second, 0.0, key, legal.span(), a};
      td_update(*me.q, me.traces, t, *me.params);
    }
    me.pending = std::pair{key, a};
    s = apply(s, a);
    ++result.plies;
    result.outcome = outcome(s);
    if (!result.outcome.is_terminal()) continue;

    if (learn) {
      Seat& other = s.to_move == Mark::Cross ? cross : nought;
      for (Seat* seat : {&me, &other}) {
        if (!seat->pending) continue;
        Transition t{seat->pending->first, seat->pending->second,
                     reward(result.outcome, seat->mark), std::nullopt, {}, std::nullopt};
        td_update(*seat->q, seat->traces, t, *seat->params);
      }
    }
    return result;
  }
}

GameResult result_for(const Outcome& o, Mark a_mark) {
  if (o.kind() == Outcome::Kind::Draw) return GameResult::Draw;
  return o.winner() == a_mark ? GameResult::AWins : GameResult::BWins;
}

Seat seat_for(Agent& agent, Mark mark) {
  return Seat{&agent.q, &agent.rng, &agent.identity.params, agent.epsilon(), mark, {}, {}};
}

void emit(const TrainingObserver& observer, const GameRecord& r) {
  if (observer.on_game) observer.on_game(r);
}

}  // namespace

Agent Agent::create(int id, std::uint64_t seed, const ExplorationSchedule& schedule,
                    const IdentityRanges& ranges, Bootstrap bootstrap) {
  Agent agent;
  agent.identity = sample_identity(id, seed, agent.rng, schedule, ranges, bootstrap);
  return agent;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SelfPlay:
      return "self_play";
    case Regime::RoundRobin:
      return "round_robin";
    case Regime::ModifiedSwiss:
      break;
  }
  return "modified_swiss";
}

Regime parse_regime(std::string_view s) {
  if (s == "self_play") return Regime::SelfPlay;
  if (s == "round_robin") return Regime::RoundRobin;
  if (s == "modified_swiss") return Regime::ModifiedSwiss;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

std::string to_string(StarterRule r) { return r == StarterRule::Random ? "random" : "alternate"; }

StarterRule parse_starter_rule(std::string_view s) {
  if (s == "random") return StarterRule::Random;
  if (s == "alternate") return StarterRule::Alternate;
  throw std::invalid_argument("unknown starter rule '" + std::string(s) + "'");
}

std::string to_string(GameResult r) {
  switch (r) {
    case GameResult::AWins:
      return "a";
    case GameResult::BWins:
      return "b";
    case GameResult::Draw:
      break;
  }
  return "draw";
}

ExplorationSchedule PopulationConfig::effective_schedule() const {
  return schedule ? *schedule : ExplorationSchedule::for_budget(episodes_per_agent);
}

void PopulationConfig::validate() const {
  if (episodes_per_agent < 0) throw std::invalid_argument("episodes_per_agent must be >= 0");
  if (regime != Regime::SelfPlay && size < 2) {
    throw std::invalid_argument("population size must be at least 2");
  }
  if (regime == Regime::ModifiedSwiss && size % 2 != 0) {
    throw std::invalid_argument("modified Swiss needs an even population, got " +
                                std::to_string(size));
  }
  const ExplorationSchedule s = effective_schedule();
  Hyperparameters probe;
  probe.epsilon0 = s.epsilon0;
  probe.epsilon_min = s.epsilon_min;
  probe.epsilon_decay = s.epsilon_decay;
  probe.validate();
}

std::vector<int> PoolAssignment::members(Pool p) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] == p) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool PoolAssignment::balanced() const {
  return 2 * std::count(pool.begin(), pool.end(), Pool::Winner) ==
         static_cast<std::ptrdiff_t>(pool.size());
}

std::string PoolAssignment::to_string() const {
  std::string s;
  for (Pool p : pool) s.push_back(p == Pool::Winner ? 'W' : 'L');
  return s;
}

GameRecord play_training_game(Agent& a, Agent& b, int starter, bool learn, long round) {
  if (&a == &b) throw std::invalid_argument("play_training_game needs two distinct agents");
  if (starter != a.id() && starter != b.id()) {
    throw std::invalid_argument("starter " + std::to_string(starter) + " is not in the game");
  }
  const bool a_starts = starter == a.id();
  Seat seat_a = seat_for(a, a_starts ? Mark::Cross : Mark::Nought);
  Seat seat_b = seat_for(b, a_starts ? Mark::Nought : Mark::Cross);
  const EpisodeResult r = a_starts ? play_episode(seat_a, seat_b, learn)
                                   : play_episode(seat_b, seat_a, learn);
  if (learn) {
    ++a.identity.episodes_trained;
    ++b.identity.episodes_trained;
  }
  return GameRecord{round, a.id(), b.id(), starter, result_for(r.outcome, seat_a.mark), r.plies};
}

GameRecord play_self_play_game(Agent& agent, bool learn, long round) {
  Seat cross = seat_for(agent, Mark::Cross);
  Seat nought = seat_for(agent, Mark::Nought);
  const EpisodeResult r = play_episode(cross, nought, learn);
  if (learn) ++agent.identity.episodes_trained;
  return GameRecord{round, agent.id(), agent.id(), agent.id(),
                    result_for(r.outcome, Mark::Cross), r.plies};
}

Agent run_self_play(const PopulationConfig& config, const TrainingObserver& observer) {
  config.validate();
  Agent agent = Agent::create(0, derive_seed(config.master_seed, "selfplay"),
                              config.effective_schedule(), config.ranges, config.bootstrap);
  for (long episode = 0; episode < config.episodes_per_agent; ++episode) {
    emit(observer, play_self_play_game(agent, true, episode));
  }
  return agent;
}

std::vector<Agent> make_population(const PopulationConfig& config) {
  config.validate();
  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(config.size));
  for (int i = 0; i < config.size; ++i) {
    agents.push_back(Agent::create(i, derive_seed(config.master_seed, "agent/" + std::to_string(i)),
                                   config.effective_schedule(), config.ranges, config.bootstrap));
  }
  return agents;
}

std::vector<std::vector<std::pair<int, int>>> circle_schedule(int size) {
  if (size < 2) throw std::invalid_argument("circle schedule needs at least 2 players");
  const int m = size % 2 == 0 ? size : size + 1;  // slot m-1 is the bye when odd
  std::vector<int> circle(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) circle[i] = i < size ? i : -1;

  std::vector<std::vector<std::pair<int, int>>> rounds;
  for (int r = 0; r < m - 1; ++r) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m / 2; ++i) {
      const int x = circle[i];
      const int y = circle[m - 1 - i];
      if (x < 0 || y < 0) continue;
      pairs.emplace_back(std::min(x, y), std::max(x, y));
    }
    rounds.push_back(std::move(pairs));
    std::rotate(circle.begin() + 1, circle.end() - 1, circle.end());
  }
  return rounds;
}

std::vector<Agent> run_round_robin(const PopulationConfig& config,
                                   const TrainingObserver& observer) {
  if (config.regime != Regime::RoundRobin) {
    throw std::invalid_argument("run_round_robin called with regime " + to_string(config.regime));
  }
  std::vector<Agent> agents = make_population(config);
  Rng controller(derive_seed(config.master_seed, "controller"));
  const auto schedule = circle_schedule(config.size);
  const long per_circuit = config.size - 1;
  const long circuits = (config.episodes_per_agent + per_circuit - 1) / per_circuit;

  long round = 0;
  for (long circuit = 0; circuit < circuits; ++circuit) {
    for (const auto& pairs : schedule) {
      for (const auto& [x, y] : pairs) {
        int starter;
        if (config.starter_rule == StarterRule::Random) {
          starter = controller.below(2) == 0 ? x : y;
        } else {
          starter = circuit % 2 == 0 ? x : y;
        }
        emit(observer, play_training_game(agents[x], agents[y], starter, true, round));
      }
      ++round;
    }
  }
  return agents;
}

PoolAssignment swiss_initial_split(int size, Rng& rng) {
  if (size < 2 || size % 2 != 0) {
    throw std::invalid_argument("Swiss split needs an even population, got " +
                                std::to_string(size));
  }
  std::vector<int> order(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) order[i] = i;
  for (int i = size - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  }
  PoolAssignment pools;
  pools.pool.assign(static_cast<std::size_t>(size), Pool::Loser);
  for (int i = 0; i < size / 2; ++i) pools.pool[order[i]] = Pool::Winner;
  return pools;
}

std::vector<std::pair<int, int>> swiss_pairings(const PoolAssignment& pools, Rng& rng) {
  const std::vector<int> winners = pools.members(Pool::Winner);
  std::vector<int> losers = pools.members(Pool::Loser);
  if (winners.size() != losers.size() || winners.empty()) {
    throw std::invalid_argument("Swiss pools are unbalanced: " + pools.to_string());
  }
  for (std::size_t i = losers.size() - 1; i > 0; --i) {
    std::swap(losers[i], losers[rng.below(i + 1)]);
  }
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(winners.size());
  for (std::size_t i = 0; i < winners.size(); ++i) pairs.emplace_back(winners[i], losers[i]);
  return pairs;
}

void swiss_reassign(PoolAssignment& pools, const GameRecord& record) {
  if (record.result == GameResult::Draw) return;
  const int winner = record.result == GameResult::AWins ? record.agent_a : record.agent_b;
  const int loser = record.result == GameResult::AWins ? record.agent_b : record.agent_a;
  pools.pool.at(static_cast<std::size_t>(winner)) = Pool::Winner;
  pools.pool.at(static_cast<std::size_t>(loser)) = Pool::Loser;
}

std::vector<Agent> run_modified_swiss(const PopulationConfig& config,
                                      const TrainingObserver& observer) {
  if (config.regime != Regime::ModifiedSwiss) {
    throw std::invalid_argument("run_modified_swiss called with regime " +
                                to_string(config.regime));
  }
  std::vector<Agent> agents = make_population(config);
  Rng controller(derive_seed(config.master_seed, "controller"));
  PoolAssignment pools = swiss_initial_split(config.size, controller);

  for (long round = 0; round < config.episodes_per_agent; ++round) {
    const auto pairs = swiss_pairings(pools, controller);
    std::vector<GameRecord> records;
    records.reserve(pairs.size());
    for (const auto& [w, l] : pairs) {
      int starter;
      if (config.starter_rule == StarterRule::Random) {
        starter = controller.below(2) == 0 ? w : l;
      } else {
        starter = round % 2 == 0 ? w : l;
      }
      records.push_back(play_training_game(agents[w], agents[l], starter, true, round));
    }
    // Pool reassignment is a barrier after every game in the round.
    for (const GameRecord& r : records) {
      swiss_reassign(pools, r);
      emit(observer, r);
    }
    if (observer.on_swiss_round) observer.on_swiss_round(round, pools);
  }
  return agents;
}

std::vector<Agent> train(const PopulationConfig& config, const TrainingObserver& observer) {
  switch (config.regime) {
    case Regime::SelfPlay: {
      std::vector<Agent> out;
      out.push_back(run_self_play(config, observer));
      return out;
    }
    case Regime::RoundRobin:
      return run_round_robin(config, observer);
    case Regime::ModifiedSwiss:
      break;
  }
  return run_modified_swiss(config, observer);
}

}  // namespace socialtd
