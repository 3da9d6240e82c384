#pragma once

// Experiment driver behind the command-line tool: configuration, seed
// derivation, per-run training with snapshots and logs, board tests, leagues
// and the composite reproduction report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialtd/evaluation.hpp"
#include "socialtd/training.hpp"

namespace socialtd {

struct ExperimentConfig {
  Regime regime = Regime::ModifiedSwiss;  // used by `train`
  std::vector<int> sizes = {4, 6, 8};
  long episodes_per_agent = 50000;
  int repetitions = 5;
  std::uint64_t master_seed = 2008;
  // Unset fields fall back to ExplorationSchedule::for_budget.
  std::optional<double> epsilon0;
  std::optional<double> epsilon_min;
  std::optional<double> epsilon_decay;
  Bootstrap bootstrap = Bootstrap::Max;
  StarterRule starter_rule = StarterRule::Random;
  long league_games = 5000;
  int league_size = 4;
  bool game_log = false;
  std::string output_dir = "runs";
  std::string fixture;  // empty: generated in memory
  LevelThresholds thresholds;

  // "full" (sizes 4/6/8, 5 repetitions, 50000 episodes) or "smoke" (size 4,
  // 2 repetitions, 10000 episodes).
  static ExperimentConfig profile(std::string_view name);

  ExplorationSchedule schedule() const;
  PopulationConfig population(Regime regime, int size, int repetition) const;
  // Throws std::invalid_argument.
  void validate() const;
};

// Overlays the JSON object in `text` onto `base`. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
std::string config_json(const ExperimentConfig& config);

std::string run_label(Regime regime, int size, int repetition);
// Self-play runs ignore `size`: one benchmark agent per repetition.
std::uint64_t run_seed(std::uint64_t master_seed, Regime regime, int size, int repetition);

struct TrainingBucket {
  long first_round = 0;
  long games = 0;
  long starter_wins = 0;
  long second_wins = 0;
  long draws = 0;
  long plies = 0;
  long pool_changes = 0;  // Swiss only
};

struct TrainedRun {
  Regime regime = Regime::SelfPlay;
  int size = 1;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::vector<Agent> agents;
  std::vector<TrainingBucket> buckets;

  std::string label() const { return run_label(regime, size, repetition); }
  std::string agent_label(std::size_t i) const;
};

inline constexpr int kTrainingBuckets = 20;

// Trains one (regime, size, repetition) cell. When `game_log` is set every
// game is appended to it as one JSON object per line.
TrainedRun train_run(const ExperimentConfig& config, Regime regime, int size, int repetition,
                     std::ostream* game_log = nullptr);

std::filesystem::path run_directory(const std::filesystem::path& root, const TrainedRun& run);
std::filesystem::path run_directory(const std::filesystem::path& root, Regime regime, int size,
                                    int repetition);

// Writes agent<i>.snap files and summary.json (the completion marker).
void write_run(const std::filesystem::path& root, const TrainedRun& run);
// Loads a completed run written by write_run.
std::optional<TrainedRun> load_run(const std::filesystem::path& root, Regime regime, int size,
                                   int repetition);

std::vector<TestBoard> boards_for(const ExperimentConfig& config);

// Board test with the random stream derived from (master_seed, label).
BoardTestReport board_test_agent(const Agent& agent, std::string_view label,
                                 std::span<const TestBoard> boards, std::uint64_t master_seed,
                                 const LevelThresholds& thresholds = {});

struct LabeledReport {
  std::string label;
  BoardTestReport report;
};

std::string format_board_table(std::span<const LabeledReport> reports);
std::string board_reports_json(std::span<const LabeledReport> reports);

struct LeagueSummary {
  std::vector<std::string> labels;
  WinMatrix matrix;
  std::optional<std::size_t> self_play_index;
  double starter_advantage = 0.0;
  double starter_decisive_share = 0.0;
  // Mean over non-self-play agents of (wins vs self-play - self-play wins vs them).
  std::optional<double> social_minus_self_play;
};

LeagueSummary summarize_league(std::vector<std::string> labels, WinMatrix matrix);
std::string format_matrix_tsv(const LeagueSummary& league, bool draws);
std::string format_league(const LeagueSummary& league);

// Exit codes shared by the tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Trains config.regime for every size and repetition plus one self-play
// benchmark per repetition. With `resume`, completed runs on disk are kept.
int cli_train(const ExperimentConfig& config, bool resume, std::ostream& log);

// Snapshot arguments may be the literal "@oracle" or "@random".
int cli_boardtest(std::span<const std::string> snapshots, const std::string& fixture,
                  std::uint64_t seed, const std::optional<std::string>& json_path,
                  std::ostream& out, std::ostream& err);

int cli_league(std::span<const std::string> snapshots, long games_per_pair, StarterRule rule,
               std::uint64_t seed, const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err);

// Self-play, round robin and modified Swiss at every size and repetition,
// board tests for every agent, a league of the league_size Swiss population
// plus the self-play benchmark per repetition, and the comparison report.
// Writes report.txt, report.json, league TSVs and snapshots under
// config.output_dir; wall-clock data goes to timing.json only.
int cli_reproduce(const ExperimentConfig& config, bool resume, std::ostream& log);

}  // namespace socialtd
