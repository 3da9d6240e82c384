// Command-line driver: train, boardtest, league, reproduce, fixture.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "socialtd/evaluation.hpp"
#include "socialtd/experiment.hpp"

namespace {

using namespace socialtd;

struct ConfigFlags {
  std::string config_path;
  std::string profile = "full";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> episodes;
  bool resume = false;
  bool game_log = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("-p,--profile", profile, "Base profile")
        ->check(CLI::IsMember({"full", "smoke"}))
        ->capture_default_str();
    cmd->add_option("-s,--seed", seed, "Master seed");
    cmd->add_option("-o,--out", out, "Output directory (overrides $SOCIALTD_OUT_DIR)");
    cmd->add_option("-e,--episodes", episodes, "Episodes per agent");
    cmd->add_flag("--resume", resume, "Reuse completed runs found in the output directory");
    cmd->add_flag("--game-log", game_log, "Write every training game to games.jsonl");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = ExperimentConfig::profile(profile);
    if (!config_path.empty()) c = load_config(config_path, c);
    if (const char* env = std::getenv("SOCIALTD_OUT_DIR"); env && *env) c.output_dir = env;
    if (out) c.output_dir = *out;
    if (seed) c.master_seed = *seed;
    if (episodes) c.episodes_per_agent = *episodes;
    if (game_log) c.game_log = true;
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular TD(lambda) Tic-Tac-Toe agents trained by self-play, round robin "
               "and modified Swiss pools"};
  app.require_subcommand(1);

  ConfigFlags train_flags;
  std::optional<std::string> train_regime;
  auto* train = app.add_subcommand("train", "Train one regime for every size and repetition");
  train_flags.add_to(train);
  train->add_option("-r,--regime", train_regime, "self_play | round_robin | modified_swiss");

  std::vector<std::string> bt_snapshots;
  std::string bt_fixture;
  std::uint64_t bt_seed = 0;
  std::optional<std::string> bt_json;
  auto* boardtest = app.add_subcommand("boardtest", "Score snapshots on the 10 test boards");
  boardtest->add_option("snapshots", bt_snapshots, "Snapshot files, @oracle or @random");
  boardtest->add_option("-f,--fixture", bt_fixture, "Board fixture (default: generated)");
  boardtest->add_option("-s,--seed", bt_seed, "Seed for tie-breaks")->capture_default_str();
  boardtest->add_option("--json", bt_json, "Also write a JSON report here");

  std::vector<std::string> lg_snapshots;
  long lg_games = 5000;
  std::string lg_starters = "alternate";
  std::uint64_t lg_seed = 0;
  std::optional<std::string> lg_out;
  auto* league = app.add_subcommand("league", "All-pairs play test between frozen agents");
  league->add_option("snapshots", lg_snapshots, "Snapshot files, @oracle or @random");
  league->add_option("-g,--games", lg_games, "Games per pair")->capture_default_str();
  league->add_option("--starters", lg_starters, "alternate | random")
      ->check(CLI::IsMember({"alternate", "random"}))
      ->capture_default_str();
  league->add_option("-s,--seed", lg_seed, "League seed")->capture_default_str();
  league->add_option("-o,--out", lg_out, "Directory for wins.tsv, draws.tsv and league.json");

  ConfigFlags repro_flags;
  auto* reproduce = app.add_subcommand("reproduce", "Run the full comparison protocol");
  repro_flags.add_to(reproduce);

  std::optional<std::string> fx_out;
  auto* fixture = app.add_subcommand("fixture", "Print or write the generated board fixture");
  fixture->add_option("-o,--out", fx_out, "Write the fixture to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      ExperimentConfig config;
      try {
        config = train_flags.resolve();
        if (train_regime) config.regime = parse_regime(*train_regime);
        config.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "train: " << e.what() << '\n';
        return kExitUsage;
      }
      return cli_train(config, train_flags.resume, std::cerr);
    }
    if (*boardtest) {
      return cli_boardtest(bt_snapshots, bt_fixture, bt_seed, bt_json, std::cout, std::cerr);
    }
    if (*league) {
      return cli_league(lg_snapshots, lg_games, parse_starter_rule(lg_starters), lg_seed, lg_out,
                        std::cout, std::cerr);
    }
    if (*reproduce) {
      ExperimentConfig config;
      try {
        config = repro_flags.resolve();
      } catch (const std::invalid_argument& e) {
        std::cerr << "reproduce: " << e.what() << '\n';
        return kExitUsage;
      }
      return cli_reproduce(config, repro_flags.resume, std::cerr);
    }
    if (*fixture) {
      const std::string text = format_fixture(generate_test_boards());
      if (fx_out) {
        std::ofstream out(*fx_out, std::ios::binary);
        if (!(out << text)) throw std::runtime_error("cannot write " + *fx_out);
      } else {
        std::cout << text;
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
