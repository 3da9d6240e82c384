#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "socialtd/experiment.hpp"
#include "socialtd/snapshot.hpp"

namespace fs = std::filesystem;
using namespace socialtd;

namespace {

Agent trained_agent() {
  PopulationConfig c;
  c.regime = Regime::SelfPlay;
  c.size = 1;
  c.episodes_per_agent = 400;
  c.master_seed = 31;
  return train(c).front();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("socialtd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SOCIALTD_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Snapshot, RoundTripIsExact) {
  const Agent a = trained_agent();
  const std::string text = format_snapshot(a, "self_play/rep0/agent0");
  const AgentSnapshot back = parse_snapshot(text);
  EXPECT_EQ(back.label, "self_play/rep0/agent0");
  EXPECT_EQ(back.agent.identity, a.identity);
  EXPECT_TRUE(back.agent.q == a.q);
  EXPECT_EQ(format_snapshot(back.agent, back.label), text);
  EXPECT_EQ(snapshot_hash(back.agent), snapshot_hash(a));
}

TEST(Snapshot, DoublesRoundTrip) {
  for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, -0.9999999999999999, 5e-324, 1e300}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.0x"), std::runtime_error);
}

TEST(Snapshot, MalformedInputRejected) {
  const std::string good = format_snapshot(trained_agent());
  EXPECT_THROW(parse_snapshot(""), std::runtime_error);
  EXPECT_THROW(parse_snapshot("socialtd-snapshot 2\n"), std::runtime_error);
  std::string truncated = good.substr(0, good.size() / 2);
  truncated = truncated.substr(0, truncated.rfind('\n'));
  EXPECT_THROW(parse_snapshot(truncated), std::runtime_error);
  std::string bad_cell = good;
  bad_cell += "0 9 0.5\n";
  EXPECT_THROW(parse_snapshot(bad_cell), std::runtime_error);
}

TEST(Snapshot, FileRoundTrip) {
  const fs::path dir = scratch("snapshot");
  const Agent a = trained_agent();
  save_snapshot((dir / "a.snap").string(), a, "x");
  EXPECT_TRUE(load_snapshot((dir / "a.snap").string()).agent.q == a.q);
  EXPECT_THROW(load_snapshot((dir / "missing.snap").string()), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Config, ProfilesAndOverlay) {
  const ExperimentConfig full = ExperimentConfig::profile("full");
  EXPECT_EQ(full.sizes, (std::vector<int>{4, 6, 8}));
  EXPECT_EQ(full.repetitions, 5);
  EXPECT_EQ(full.episodes_per_agent, 50000);
  const ExperimentConfig smoke = ExperimentConfig::profile("smoke");
  EXPECT_EQ(smoke.sizes, (std::vector<int>{4}));
  EXPECT_THROW(ExperimentConfig::profile("huge"), std::invalid_argument);

  const ExperimentConfig c = parse_config(
      R"({"_note": "x", "sizes": [4, 16], "master_seed": 7, "regime": "round_robin",
          "epsilon_min": 0.05, "level_thresholds": {"beginner_max": 3, "intermediate_max": 6}})",
      smoke);
  EXPECT_EQ(c.sizes, (std::vector<int>{4, 16}));
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_EQ(c.regime, Regime::RoundRobin);
  EXPECT_EQ(c.repetitions, smoke.repetitions);
  EXPECT_EQ(c.schedule().epsilon_min, 0.05);
  EXPECT_EQ(c.thresholds.beginner_max, 3);
  EXPECT_EQ(parse_config(config_json(c)).sizes, c.sizes);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{\"sizez\": [4]}"), std::invalid_argument);
  EXPECT_THROW(parse_config("[1]"), std::invalid_argument);
  EXPECT_THROW(parse_config("{\"sizes\": \"four\"}"), std::invalid_argument);
  EXPECT_THROW(parse_config("{\"regime\": \"ladder\"}"), std::invalid_argument);
  EXPECT_THROW(parse_config("{\"epsilon0\": 1.5}").validate(), std::invalid_argument);
}

TEST(Config, CommittedConfigsLoad) {
  const ExperimentConfig full = load_config(std::string(SOCIALTD_SOURCE_DIR) + "/configs/full.json");
  EXPECT_NO_THROW(full.validate());
  EXPECT_EQ(full.master_seed, 2008u);
  const ExperimentConfig smoke =
      load_config(std::string(SOCIALTD_SOURCE_DIR) + "/configs/smoke.json");
  EXPECT_NO_THROW(smoke.validate());
}

TEST(Seeds, RunSeedsDoNotCollide) {
  ExperimentConfig c = ExperimentConfig::profile("full");
  c.sizes = {4, 6, 8, 16};
  std::set<std::uint64_t> seeds;
  std::size_t expected = 0;
  for (int rep = 0; rep < c.repetitions; ++rep) {
    seeds.insert(run_seed(c.master_seed, Regime::SelfPlay, 1, rep));
    ++expected;
    for (int size : c.sizes) {
      for (Regime r : {Regime::RoundRobin, Regime::ModifiedSwiss}) {
        const PopulationConfig pop = c.population(r, size, rep);
        seeds.insert(pop.master_seed);
        ++expected;
        for (const Agent& a : make_population(pop)) {
          seeds.insert(a.identity.seed);
          ++expected;
        }
      }
    }
  }
  EXPECT_EQ(seeds.size(), expected);
}

TEST(Runs, WriteAndLoad) {
  const fs::path dir = scratch("runs");
  ExperimentConfig c = ExperimentConfig::profile("smoke");
  c.episodes_per_agent = 200;
  const TrainedRun run = train_run(c, Regime::ModifiedSwiss, 4, 1);
  write_run(dir, run);
  const auto back = load_run(dir, Regime::ModifiedSwiss, 4, 1);
  ASSERT_TRUE(back.has_value());
  ASSERT_EQ(back->agents.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(back->agents[i].q == run.agents[i].q);
  EXPECT_FALSE(load_run(dir, Regime::RoundRobin, 4, 1).has_value());
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("boardtest"), 2);
  EXPECT_EQ(run_cli("boardtest @oracle @random"), 0);
  EXPECT_EQ(run_cli("league @oracle"), 1);
  EXPECT_EQ(run_cli("league @oracle @oracle --games 3"), 1);
  EXPECT_EQ(run_cli("league @oracle @random --games 20 --out " + (dir / "lg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "lg" / "wins.tsv"));
  EXPECT_EQ(run_cli("boardtest " + (dir / "missing.snap").string()), 2);
  EXPECT_EQ(run_cli("train --profile smoke --episodes 50 --regime ladder --out " +
                    (dir / "t").string()),
            1);
  EXPECT_EQ(run_cli("train --profile smoke --episodes 50 --out " + (dir / "t").string()), 0);
  EXPECT_EQ(run_cli("boardtest " + (dir / "t" / "self_play" / "rep0" / "agent0.snap").string()),
            0);
  fs::remove_all(dir);
}
