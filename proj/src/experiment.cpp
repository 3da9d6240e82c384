#include "socialtd/experiment.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "socialtd/snapshot.hpp"

namespace socialtd {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// --- configuration ----------------------------------------------------------

ExperimentConfig ExperimentConfig::profile(std::string_view name) {
  ExperimentConfig c;
  if (name == "full") return c;
  if (name == "smoke") {
    c.sizes = {4};
    c.repetitions = 2;
    c.episodes_per_agent = 10000;
    c.league_size = 4;
    return c;
  }
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (full|smoke)");
}

ExplorationSchedule ExperimentConfig::schedule() const {
  ExplorationSchedule s = ExplorationSchedule::for_budget(
      episodes_per_agent, epsilon0.value_or(0.9), epsilon_min.value_or(0.01));
  if (epsilon_decay) s.epsilon_decay = *epsilon_decay;
  return s;
}

PopulationConfig ExperimentConfig::population(Regime r, int size, int repetition) const {
  PopulationConfig p;
  p.regime = r;
  p.size = r == Regime::SelfPlay ? 1 : size;
  p.episodes_per_agent = episodes_per_agent;
  p.master_seed = run_seed(master_seed, r, size, repetition);
  p.starter_rule = starter_rule;
  p.schedule = schedule();
  p.bootstrap = bootstrap;
  return p;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (sizes.empty()) fail("at least one population size is required");
  if (episodes_per_agent < 0) fail("episodes_per_agent must be >= 0");
  if (league_games < 0 || league_games % 2 != 0) fail("league_games must be even and >= 0");
  if (thresholds.beginner_max > thresholds.intermediate_max) fail("level thresholds out of order");
  for (int s : sizes) {
    if (s < 2) fail("population sizes must be >= 2");
    if (regime == Regime::ModifiedSwiss && s % 2 != 0) {
      fail("modified Swiss needs even population sizes, got " + std::to_string(s));
    }
  }
  Hyperparameters probe;
  const ExplorationSchedule s = schedule();
  probe.epsilon0 = s.epsilon0;
  probe.epsilon_min = s.epsilon_min;
  probe.epsilon_decay = s.epsilon_decay;
  probe.validate();
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "regime") {
        c.regime = parse_regime(v.get<std::string>());
      } else if (key == "sizes") {
        c.sizes = v.get<std::vector<int>>();
      } else if (key == "episodes_per_agent") {
        c.episodes_per_agent = v.get<long>();
      } else if (key == "repetitions") {
        c.repetitions = v.get<int>();
      } else if (key == "master_seed") {
        c.master_seed = v.get<std::uint64_t>();
      } else if (key == "epsilon0") {
        c.epsilon0 = v.get<double>();
      } else if (key == "epsilon_min") {
        c.epsilon_min = v.get<double>();
      } else if (key == "epsilon_decay") {
        c.epsilon_decay = v.get<double>();
      } else if (key == "bootstrap") {
        c.bootstrap = parse_bootstrap(v.get<std::string>());
      } else if (key == "starter_rule") {
        c.starter_rule = parse_starter_rule(v.get<std::string>());
      } else if (key == "league_games") {
        c.league_games = v.get<long>();
      } else if (key == "league_size") {
        c.league_size = v.get<int>();
      } else if (key == "game_log") {
        c.game_log = v.get<bool>();
      } else if (key == "output_dir") {
        c.output_dir = v.get<std::string>();
      } else if (key == "fixture") {
        c.fixture = v.get<std::string>();
      } else if (key == "level_thresholds") {
        c.thresholds.beginner_max = v.at("beginner_max").get<int>();
        c.thresholds.intermediate_max = v.at("intermediate_max").get<int>();
      } else if (key.starts_with("_")) {
        // comment
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

namespace {

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["regime"] = to_string(c.regime);
  j["sizes"] = c.sizes;
  j["episodes_per_agent"] = c.episodes_per_agent;
  j["repetitions"] = c.repetitions;
  j["master_seed"] = c.master_seed;
  const ExplorationSchedule s = c.schedule();
  j["epsilon0"] = s.epsilon0;
  j["epsilon_min"] = s.epsilon_min;
  j["epsilon_decay"] = s.epsilon_decay;
  j["bootstrap"] = to_string(c.bootstrap);
  j["starter_rule"] = to_string(c.starter_rule);
  j["league_games"] = c.league_games;
  j["league_size"] = c.league_size;
  j["game_log"] = c.game_log;
  j["fixture"] = c.fixture;
  j["level_thresholds"] = {{"beginner_max", c.thresholds.beginner_max},
                           {"intermediate_max", c.thresholds.intermediate_max}};
  return j;
}

}  // namespace

std::string config_json(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

// --- runs -------------------------------------------------------------------

std::string run_label(Regime regime, int size, int repetition) {
  if (regime == Regime::SelfPlay) return "self_play/rep" + std::to_string(repetition);
  return to_string(regime) + "/size" + std::to_string(size) + "/rep" + std::to_string(repetition);
}

std::uint64_t run_seed(std::uint64_t master_seed, Regime regime, int size, int repetition) {
  return derive_seed(master_seed, run_label(regime, size, repetition));
}

std::string TrainedRun::agent_label(std::size_t i) const {
  return label() + "/agent" + std::to_string(i);
}

namespace {

long total_rounds(const PopulationConfig& p) {
  switch (p.regime) {
    case Regime::SelfPlay:
    case Regime::ModifiedSwiss:
      return p.episodes_per_agent;
    case Regime::RoundRobin:
      break;
  }
  const long per_circuit = p.size - 1;
  const long rounds_per_circuit = p.size % 2 == 0 ? p.size - 1 : p.size;
  return (p.episodes_per_agent + per_circuit - 1) / per_circuit * rounds_per_circuit;
}

void write_game_line(std::ostream& out, const GameRecord& r) {
  out << "{\"round\":" << r.round << ",\"a\":" << r.agent_a << ",\"b\":" << r.agent_b
      << ",\"starter\":" << r.starter << ",\"result\":\"" << to_string(r.result)
      << "\",\"plies\":" << r.plies << "}\n";
}

ordered_json buckets_to_json(const std::vector<TrainingBucket>& buckets) {
  ordered_json out = ordered_json::array();
  for (const TrainingBucket& b : buckets) {
    out.push_back({{"first_round", b.first_round},
                   {"games", b.games},
                   {"starter_wins", b.starter_wins},
                   {"second_wins", b.second_wins},
                   {"draws", b.draws},
                   {"plies", b.plies},
                   {"pool_changes", b.pool_changes}});
  }
  return out;
}

std::vector<TrainingBucket> buckets_from_json(const json& j) {
  std::vector<TrainingBucket> out;
  for (const auto& b : j) {
    out.push_back(TrainingBucket{b.at("first_round").get<long>(), b.at("games").get<long>(),
                                 b.at("starter_wins").get<long>(),
                                 b.at("second_wins").get<long>(), b.at("draws").get<long>(),
                                 b.at("plies").get<long>(), b.at("pool_changes").get<long>()});
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("error writing " + p.string());
}

}  // namespace

TrainedRun train_run(const ExperimentConfig& config, Regime regime, int size, int repetition,
                     std::ostream* game_log) {
  TrainedRun run;
  run.regime = regime;
  run.size = regime == Regime::SelfPlay ? 1 : size;
  run.repetition = repetition;
  const PopulationConfig pop = config.population(regime, size, repetition);
  run.seed = pop.master_seed;

  const long rounds = total_rounds(pop);
  const long bucket_len = std::max(1L, (rounds + kTrainingBuckets - 1) / kTrainingBuckets);
  for (long first = 0; first < rounds; first += bucket_len) {
    run.buckets.push_back(TrainingBucket{first});
  }

  std::optional<PoolAssignment> previous_pools;
  TrainingObserver observer;
  observer.on_game = [&](const GameRecord& r) {
    TrainingBucket& b = run.buckets[static_cast<std::size_t>(r.round / bucket_len)];
    ++b.games;
    b.plies += r.plies;
    if (r.result == GameResult::Draw) {
      ++b.draws;
    } else if ((r.result == GameResult::AWins) == (r.starter == r.agent_a)) {
      ++b.starter_wins;
    } else {
      ++b.second_wins;
    }
    if (game_log) write_game_line(*game_log, r);
  };
  observer.on_swiss_round = [&](long round, const PoolAssignment& pools) {
    if (previous_pools) {
      long changes = 0;
      for (std::size_t i = 0; i < pools.pool.size(); ++i) {
        changes += pools.pool[i] != previous_pools->pool[i];
      }
      run.buckets[static_cast<std::size_t>(round / bucket_len)].pool_changes += changes;
    }
    previous_pools = pools;
  };
  run.agents = train(pop, observer);
  return run;
}

fs::path run_directory(const fs::path& root, Regime regime, int size, int repetition) {
  return root / run_label(regime, size, repetition);
}

fs::path run_directory(const fs::path& root, const TrainedRun& run) {
  return run_directory(root, run.regime, run.size, run.repetition);
}

void write_run(const fs::path& root, const TrainedRun& run) {
  const fs::path dir = run_directory(root, run);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < run.agents.size(); ++i) {
    save_snapshot((dir / ("agent" + std::to_string(i) + ".snap")).string(), run.agents[i],
                  run.agent_label(i));
  }
  ordered_json j;
  j["label"] = run.label();
  j["regime"] = to_string(run.regime);
  j["size"] = run.size;
  j["repetition"] = run.repetition;
  j["seed"] = run.seed;
  j["agents"] = run.agents.size();
  j["buckets"] = buckets_to_json(run.buckets);
  write_file(dir / "summary.json", j.dump(2) + "\n");
}

std::optional<TrainedRun> load_run(const fs::path& root, Regime regime, int size, int repetition) {
  const fs::path dir = run_directory(root, regime, size, repetition);
  if (!fs::exists(dir / "summary.json")) return std::nullopt;
  const json j = json::parse(read_file(dir / "summary.json"));
  TrainedRun run;
  run.regime = regime;
  run.size = j.at("size").get<int>();
  run.repetition = repetition;
  run.seed = j.at("seed").get<std::uint64_t>();
  run.buckets = buckets_from_json(j.at("buckets"));
  const auto n = j.at("agents").get<std::size_t>();
  for (std::size_t i = 0; i < n; ++i) {
    run.agents.push_back(
        load_snapshot((dir / ("agent" + std::to_string(i) + ".snap")).string()).agent);
  }
  return run;
}

// --- evaluation helpers -----------------------------------------------------

std::vector<TestBoard> boards_for(const ExperimentConfig& config) {
  return config.fixture.empty() ? generate_test_boards() : load_fixture(config.fixture);
}

BoardTestReport board_test_agent(const Agent& agent, std::string_view label,
                                 std::span<const TestBoard> boards, std::uint64_t master_seed,
                                 const LevelThresholds& thresholds) {
  Rng rng(derive_seed(master_seed, "boardtest/" + std::string(label)));
  return run_board_test(GreedyPolicy(agent.q), boards, rng, agent.id(), thresholds);
}

std::string format_board_table(std::span<const LabeledReport> reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.label.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "agent" << std::right
      << "  total  easy  inter  hard  level\n";
  for (const auto& [label, r] : reports) {
    out << std::left << std::setw(static_cast<int>(width)) << label << std::right << "  "
        << std::setw(5) << r.total_correct << "  " << std::setw(4) << r.correct_by_tier[0] << "  "
        << std::setw(5) << r.correct_by_tier[1] << "  " << std::setw(4) << r.correct_by_tier[2]
        << "  " << to_string(r.level) << '\n';
  }
  return out.str();
}

namespace {

ordered_json report_to_json(const LabeledReport& lr) {
  const BoardTestReport& r = lr.report;
  ordered_json chosen = ordered_json::array();
  for (Action a : r.chosen) chosen.push_back(a.cell);
  return {{"label", lr.label},
          {"agent", r.agent_id},
          {"total", r.total_correct},
          {"easy", r.correct_by_tier[0]},
          {"intermediate", r.correct_by_tier[1]},
          {"hard", r.correct_by_tier[2]},
          {"level", to_string(r.level)},
          {"chosen", chosen}};
}

}  // namespace

std::string board_reports_json(std::span<const LabeledReport> reports) {
  ordered_json j = ordered_json::array();
  for (const auto& r : reports) j.push_back(report_to_json(r));
  return j.dump(2) + "\n";
}

LeagueSummary summarize_league(std::vector<std::string> labels, WinMatrix matrix) {
  LeagueSummary s;
  s.labels = std::move(labels);
  s.matrix = std::move(matrix);
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    if (s.labels[i].starts_with("self_play")) {
      s.self_play_index = i;
      break;
    }
  }
  s.starter_advantage = starter_advantage(s.matrix);
  s.starter_decisive_share = starter_decisive_share(s.matrix);
  if (s.self_play_index && s.matrix.size() > 1) {
    const std::size_t sp = *s.self_play_index;
    double total = 0.0;
    for (std::size_t i = 0; i < s.matrix.size(); ++i) {
      if (i == sp) continue;
      total += static_cast<double>(s.matrix.wins[i][sp] - s.matrix.wins[sp][i]);
    }
    s.social_minus_self_play = total / static_cast<double>(s.matrix.size() - 1);
  }
  return s;
}

std::string format_matrix_tsv(const LeagueSummary& league, bool draws) {
  const auto& cells = draws ? league.matrix.draws : league.matrix.wins;
  std::ostringstream out;
  out << (draws ? "draws" : "wins");
  for (const auto& l : league.labels) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < league.labels.size(); ++i) {
    out << league.labels[i];
    for (long v : cells[i]) out << '\t' << v;
    out << '\n';
  }
  return out.str();
}

std::string format_league(const LeagueSummary& league) {
  std::ostringstream out;
  out << "games per pair: " << league.matrix.games_per_pair << "\n\n";
  out << "wins (row agent against column agent)\n" << format_matrix_tsv(league, false) << '\n';
  out << "draws\n" << format_matrix_tsv(league, true) << '\n';
  out << "starter wins / games started\n";
  for (std::size_t i = 0; i < league.labels.size(); ++i) {
    out << league.labels[i] << '\t' << league.matrix.starter_wins[i] << " / "
        << league.matrix.starter_games[i] << '\n';
  }
  out << std::fixed << std::setprecision(4);
  out << "\nstarter advantage (wins as starter / games as starter): " << league.starter_advantage
      << '\n';
  out << "starter share of decisive games: " << league.starter_decisive_share << '\n';
  if (league.social_minus_self_play) {
    out << "social minus self-play wins per pairing: " << *league.social_minus_self_play << '\n';
  }
  return out.str();
}

namespace {

ordered_json league_to_json(const LeagueSummary& league) {
  ordered_json j;
  j["labels"] = league.labels;
  j["games_per_pair"] = league.matrix.games_per_pair;
  j["wins"] = league.matrix.wins;
  j["draws"] = league.matrix.draws;
  j["starter_wins"] = league.matrix.starter_wins;
  j["starter_games"] = league.matrix.starter_games;
  j["starter_advantage"] = league.starter_advantage;
  j["starter_decisive_share"] = league.starter_decisive_share;
  j["social_minus_self_play"] = league.social_minus_self_play
                                    ? ordered_json(*league.social_minus_self_play)
                                    : ordered_json(nullptr);
  return j;
}

std::optional<TrainedRun> obtain_run(const ExperimentConfig& config, Regime regime, int size,
                                     int repetition, bool resume, std::ostream& log) {
  const fs::path root(config.output_dir);
  if (resume) {
    if (auto loaded = load_run(root, regime, size, repetition)) {
      log << "resumed " << loaded->label() << '\n';
      return loaded;
    }
  }
  const fs::path dir = run_directory(root, regime, size, repetition);
  fs::create_directories(dir);
  std::ofstream game_log;
  if (config.game_log) {
    game_log.open(dir / "games.jsonl", std::ios::binary);
    if (!game_log) throw std::runtime_error("cannot write " + (dir / "games.jsonl").string());
  }
  TrainedRun run = train_run(config, regime, size, repetition, config.game_log ? &game_log : nullptr);
  write_run(root, run);
  log << "trained " << run.label() << " (" << run.agents.size() << " agents)\n";
  return run;
}

}  // namespace

// --- subcommands ------------------------------------------------------------

int cli_train(const ExperimentConfig& config, bool resume, std::ostream& log) {
  config.validate();
  fs::create_directories(config.output_dir);
  write_file(fs::path(config.output_dir) / "config.json", config_json(config));
  for (int rep = 0; rep < config.repetitions; ++rep) {
    obtain_run(config, Regime::SelfPlay, 1, rep, resume, log);
    if (config.regime == Regime::SelfPlay) continue;
    for (int size : config.sizes) obtain_run(config, config.regime, size, rep, resume, log);
  }
  return kExitOk;
}

namespace {

struct LoadedPolicy {
  std::string label;
  int id = 0;
  std::optional<Agent> agent;
  std::unique_ptr<Policy> policy;
};

std::vector<LoadedPolicy> load_policies(std::span<const std::string> args) {
  std::vector<LoadedPolicy> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    LoadedPolicy p;
    p.id = static_cast<int>(i);
    if (args[i] == "@oracle") {
      p.label = "oracle#" + std::to_string(i);
      p.policy = std::make_unique<OraclePolicy>();
    } else if (args[i] == "@random") {
      p.label = "random#" + std::to_string(i);
      p.policy = std::make_unique<RandomPolicy>();
    } else {
      AgentSnapshot snap = load_snapshot(args[i]);
      p.label = snap.label;
      p.agent.emplace(std::move(snap.agent));
    }
    out.push_back(std::move(p));
  }
  // Greedy policies point into the agents, so bind them once storage is stable.
  for (auto& p : out) {
    if (p.agent) p.policy = std::make_unique<GreedyPolicy>(p.agent->q);
  }
  return out;
}

}  // namespace

int cli_boardtest(std::span<const std::string> snapshots, const std::string& fixture,
                  std::uint64_t seed, const std::optional<std::string>& json_path,
                  std::ostream& out, std::ostream& err) {
  const std::vector<TestBoard> boards =
      fixture.empty() ? generate_test_boards() : load_fixture(fixture);
  const std::vector<LoadedPolicy> policies = load_policies(snapshots);
  std::vector<LabeledReport> reports;
  for (const LoadedPolicy& p : policies) {
    Rng rng(derive_seed(seed, "boardtest/" + p.label));
    reports.push_back({p.label, run_board_test(*p.policy, boards, rng, p.id)});
  }
  out << format_board_table(reports);
  if (json_path) write_file(*json_path, board_reports_json(reports));
  if (reports.empty()) {
    err << "boardtest: no snapshots given\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cli_league(std::span<const std::string> snapshots, long games_per_pair, StarterRule rule,
               std::uint64_t seed, const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err) {
  if (snapshots.size() < 2) {
    err << "league: need at least two snapshots\n";
    return kExitUsage;
  }
  const std::vector<LoadedPolicy> policies = load_policies(snapshots);
  std::vector<const Policy*> ptrs;
  std::vector<int> ids;
  std::vector<std::string> labels;
  for (const auto& p : policies) {
    ptrs.push_back(p.policy.get());
    ids.push_back(p.id);
    labels.push_back(p.label);
  }
  const LeagueSummary league =
      summarize_league(labels, run_league(ptrs, ids, games_per_pair, rule, seed));
  if (!league.matrix.accounting_holds()) {
    err << "league: win matrix accounting identity violated\n";
    return kExitRuntime;
  }
  out << format_league(league);
  if (out_dir) {
    fs::create_directories(*out_dir);
    write_file(fs::path(*out_dir) / "wins.tsv", format_matrix_tsv(league, false));
    write_file(fs::path(*out_dir) / "draws.tsv", format_matrix_tsv(league, true));
    write_file(fs::path(*out_dir) / "league.json", league_to_json(league).dump(2) + "\n");
  }
  return kExitOk;
}

int cli_reproduce(const ExperimentConfig& config, bool resume, std::ostream& log) {
  config.validate();
  for (int s : config.sizes) {
    if (s % 2 != 0) throw std::invalid_argument("reproduce needs even population sizes");
  }
  const bool league_enabled =
      std::find(config.sizes.begin(), config.sizes.end(), config.league_size) !=
      config.sizes.end();

  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  ordered_json timing = ordered_json::object();

  const fs::path root(config.output_dir);
  fs::create_directories(root);
  write_file(root / "config.json", config_json(config));
  const std::vector<TestBoard> boards = boards_for(config);
  write_file(root / "test_boards.txt", format_fixture(boards));

  struct Row {
    Regime regime;
    int size;
    int rep;
    std::vector<LabeledReport> reports;
    std::vector<TrainingBucket> buckets;
  };
  std::vector<Row> rows;
  std::vector<LabeledReport> self_play_reports;
  std::vector<LeagueSummary> leagues;

  for (int rep = 0; rep < config.repetitions; ++rep) {
    auto t0 = Clock::now();
    const TrainedRun sp = *obtain_run(config, Regime::SelfPlay, 1, rep, resume, log);
    timing[sp.label()] = std::chrono::duration<double>(Clock::now() - t0).count();
    const BoardTestReport sp_report =
        board_test_agent(sp.agents[0], sp.agent_label(0), boards, config.master_seed,
                         config.thresholds);
    self_play_reports.push_back({sp.agent_label(0), sp_report});
    for (int size : config.sizes) {
      rows.push_back(Row{Regime::SelfPlay, size, rep, {{sp.agent_label(0), sp_report}}, sp.buckets});
    }

    for (Regime regime : {Regime::RoundRobin, Regime::ModifiedSwiss}) {
      for (int size : config.sizes) {
        t0 = Clock::now();
        const TrainedRun run = *obtain_run(config, regime, size, rep, resume, log);
        timing[run.label()] = std::chrono::duration<double>(Clock::now() - t0).count();
        Row row{regime, size, rep, {}, run.buckets};
        for (std::size_t i = 0; i < run.agents.size(); ++i) {
          row.reports.push_back({run.agent_label(i),
                                 board_test_agent(run.agents[i], run.agent_label(i), boards,
                                                  config.master_seed, config.thresholds)});
        }
        rows.push_back(std::move(row));

        if (regime == Regime::ModifiedSwiss && size == config.league_size && league_enabled) {
          t0 = Clock::now();
          std::vector<GreedyPolicy> greedy;
          greedy.emplace_back(sp.agents[0].q);
          for (const Agent& a : run.agents) greedy.emplace_back(a.q);
          std::vector<const Policy*> ptrs;
          std::vector<int> ids;
          std::vector<std::string> labels{sp.agent_label(0)};
          for (std::size_t i = 0; i < greedy.size(); ++i) {
            ptrs.push_back(&greedy[i]);
            ids.push_back(static_cast<int>(i));
            if (i > 0) labels.push_back(run.agent_label(i - 1));
          }
          const std::uint64_t league_seed =
              derive_seed(config.master_seed, "league/rep" + std::to_string(rep));
          leagues.push_back(summarize_league(
              labels, run_league(ptrs, ids, config.league_games, StarterRule::Alternate,
                                 league_seed)));
          if (!leagues.back().matrix.accounting_holds()) {
            throw std::runtime_error("league accounting identity violated");
          }
          timing["league/rep" + std::to_string(rep)] =
              std::chrono::duration<double>(Clock::now() - t0).count();
          const std::string stem = "league_rep" + std::to_string(rep);
          write_file(root / (stem + "_wins.tsv"), format_matrix_tsv(leagues.back(), false));
          write_file(root / (stem + "_draws.tsv"), format_matrix_tsv(leagues.back(), true));
        }
      }
    }
  }

  // Machine-readable report.
  ordered_json report;
  report["format"] = "socialtd-report/1";
  report["config"] = config_to_json(config);
  {
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << fixture_hash(boards);
    report["fixture_hash"] = h.str();
  }
  report["expected_random_score"] = expected_random_score(boards);
  ordered_json jrows = ordered_json::array();
  ordered_json comparison = ordered_json::array();
  for (const Row& row : rows) {
    int best = 0, intermediate_or_better = 0;
    double mean = 0.0;
    ordered_json agents = ordered_json::array();
    for (const auto& r : row.reports) {
      best = std::max(best, r.report.total_correct);
      intermediate_or_better += r.report.level != Level::Beginner;
      mean += r.report.total_correct;
      agents.push_back(report_to_json(r));
    }
    mean /= static_cast<double>(row.reports.size());
    const int sp_score = self_play_reports[static_cast<std::size_t>(row.rep)].report.total_correct;
    jrows.push_back({{"regime", to_string(row.regime)},
                     {"size", row.size},
                     {"repetition", row.rep},
                     {"agents", agents},
                     {"training", buckets_to_json(row.buckets)}});
    comparison.push_back({{"regime", to_string(row.regime)},
                          {"size", row.size},
                          {"repetition", row.rep},
                          {"best", best},
                          {"mean", mean},
                          {"intermediate_or_better", intermediate_or_better},
                          {"self_play", sp_score}});
  }
  report["runs"] = jrows;
  report["comparison"] = comparison;
  ordered_json jleagues = ordered_json::array();
  for (const auto& l : leagues) jleagues.push_back(league_to_json(l));
  report["leagues"] = jleagues;
  write_file(root / "report.json", report.dump(2) + "\n");

  // Human-readable report.
  std::ostringstream txt;
  txt << "social learning reproduction report\n";
  txt << "master seed " << config.master_seed << ", " << config.episodes_per_agent
      << " episodes per agent, " << config.repetitions << " repetitions\n";
  txt << "board fixture hash " << report["fixture_hash"].get<std::string>()
      << ", random-mover expectation " << std::fixed << std::setprecision(3)
      << expected_random_score(boards) << "\n\n";
  for (Regime regime : {Regime::SelfPlay, Regime::RoundRobin, Regime::ModifiedSwiss}) {
    txt << "== " << to_string(regime) << " ==\n";
    txt << "size  rep  best  mean   >=intermediate  self_play\n";
    for (const auto& c : comparison) {
      if (c["regime"] != to_string(regime)) continue;
      txt << std::setw(4) << c["size"].get<int>() << "  " << std::setw(3)
          << c["repetition"].get<int>() << "  " << std::setw(4) << c["best"].get<int>() << "  "
          << std::setw(5) << std::setprecision(2) << c["mean"].get<double>() << "  "
          << std::setw(14) << c["intermediate_or_better"].get<int>() << "  " << std::setw(9)
          << c["self_play"].get<int>() << '\n';
    }
    txt << '\n';
  }
  txt << "== board tests ==\n";
  for (const Row& row : rows) {
    if (row.regime == Regime::SelfPlay) continue;
    txt << format_board_table(row.reports);
  }
  txt << format_board_table(self_play_reports) << '\n';
  for (std::size_t i = 0; i < leagues.size(); ++i) {
    txt << "== league rep" << i << " ==\n" << format_league(leagues[i]) << '\n';
  }
  write_file(root / "report.txt", txt.str());

  timing["total"] = std::chrono::duration<double>(Clock::now() - started).count();
  write_file(root / "timing.json", timing.dump(2) + "\n");
  log << "report written to " << (root / "report.txt").string() << '\n';
  return kExitOk;
}

}  // namespace socialtd
