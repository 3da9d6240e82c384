// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Thresholds and tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "socialtd/evaluation.hpp"
#include "socialtd/experiment.hpp"
#include "socialtd/minimax.hpp"
#include "socialtd/snapshot.hpp"
#include "socialtd/training.hpp"

namespace fs = std::filesystem;
using namespace socialtd;

namespace {

constexpr int kRepetitions = 5;
constexpr long kEpisodes = 50000;
constexpr long kLeagueGames = 5000;
constexpr std::uint64_t kMasterSeed = 2008;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const std::function<Verdict()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("[%s] %d. %s (%.2fs): %s\n", v.pass ? "PASS" : "FAIL", number, name.c_str(), secs,
              v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Trained populations shared by criteria 4, 5, 6 and 9.
struct Invariants {
  long swiss_rounds_checked = 0;
  long swiss_unbalanced = 0;
  long conservation_violations = 0;
  long budget_violations = 0;
  long plies_violations = 0;
  double max_abs_q = 0.0;
};

struct RepData {
  Agent self_play;
  std::map<int, std::vector<Agent>> swiss;  // by size
  std::map<int, std::vector<Agent>> round_robin;
};

ExperimentConfig base_config() {
  ExperimentConfig c = ExperimentConfig::profile("full");
  c.master_seed = kMasterSeed;
  c.episodes_per_agent = kEpisodes;
  return c;
}

std::vector<Agent> train_checked(const ExperimentConfig& cfg, Regime regime, int size, int rep,
                                 Invariants& inv) {
  const PopulationConfig pop = cfg.population(regime, size, rep);
  std::map<long, std::array<long, 3>> per_round;  // a wins, b wins, draws
  TrainingObserver obs;
  obs.on_game = [&](const GameRecord& r) {
    per_round[r.round][static_cast<int>(r.result)]++;
    if (r.plies < 1 || r.plies > 9 || (r.result != GameResult::Draw && r.plies < 5)) {
      ++inv.plies_violations;
    }
  };
  obs.on_swiss_round = [&](long, const PoolAssignment& pools) {
    ++inv.swiss_rounds_checked;
    if (!pools.balanced() || pools.pool.size() != static_cast<std::size_t>(size)) {
      ++inv.swiss_unbalanced;
    }
  };
  std::vector<Agent> agents = train(pop, obs);
  for (const auto& [round, t] : per_round) {
    const long games = t[0] + t[1] + t[2];
    const long wins = t[0] + t[1];
    const long losses = t[0] + t[1];
    if (wins + losses + 2 * t[2] != 2 * games) ++inv.conservation_violations;
  }
  long unit = 0;
  if (regime == Regime::ModifiedSwiss) unit = 1;
  if (regime == Regime::RoundRobin) unit = size - 1;
  for (const Agent& a : agents) {
    const long e = a.identity.episodes_trained;
    if (e < kEpisodes || e > kEpisodes + unit) ++inv.budget_violations;
    inv.max_abs_q = std::max(inv.max_abs_q, a.q.max_abs());
  }
  return agents;
}

int board_score(const Agent& a, const std::string& label, const std::vector<TestBoard>& boards) {
  return board_test_agent(a, label, boards, kMasterSeed).total_correct;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::printf("socialtd acceptance suite (seed %llu, %ld episodes, %d repetitions)\n",
              static_cast<unsigned long long>(kMasterSeed), kEpisodes, kRepetitions);

  // 1. Perfect play always draws.
  report(1, "perfect-play sanity", [] {
    OraclePolicy a, b;
    const std::vector<const Policy*> ptrs{&a, &b};
    const std::vector<int> ids{0, 1};
    const auto t0 = std::chrono::steady_clock::now();
    const WinMatrix m = run_league(ptrs, ids, 1000, StarterRule::Alternate, kMasterSeed);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const long decisive = m.wins[0][1] + m.wins[1][0];
    const bool both_starters = m.starter_games[0] == 500 && m.starter_games[1] == 500;
    return Verdict{decisive == 0 && m.draws[0][1] == 1000 && both_starters && secs < 1.0,
                   "decisive=" + std::to_string(decisive) + " draws=" +
                       std::to_string(m.draws[0][1]) + " time=" + fmt(secs, 3) + "s"};
  });

  // 2. TD update against independent oracles.
  report(2, "TD update oracle equivalence", [] {
    Rng rng(kMasterSeed);
    double worst_lambda0 = 0.0;
    long mismatches = 0;
    QTable q0, ql;
    EligibilityTraces tr0, trl;
    reference::DenseTable oracle0, oraclel;
    Hyperparameters p0, pl;
    p0.alpha = pl.alpha = 0.25;
    p0.gamma = pl.gamma = 0.97;
    p0.lambda = 0.0;
    pl.lambda = 0.95;
    std::vector<std::pair<std::uint32_t, int>> touched;
    for (int episode = 0; episode < 100; ++episode) {
      const reference::OracleEpisode ep = reference::random_episode(rng);
      begin_episode(tr0);
      begin_episode(trl);
      for (const auto& st : ep) {
        td_update(q0, tr0, reference::to_transition(st), p0);
        td_update(ql, trl, reference::to_transition(st), pl);
        touched.emplace_back(st.s, st.a);
      }
      reference::one_step_q(oracle0, ep, p0.alpha, p0.gamma);
      reference::brute_force_td_lambda(oraclel, ep, pl.alpha, pl.gamma, pl.lambda);
    }
    for (std::uint32_t s = 0; s < kNumStateKeys; ++s) {
      for (int a = 0; a < 9; ++a) {
        worst_lambda0 = std::max(worst_lambda0,
                                 std::abs(q0.value(StateKey{s}, Action{a}) - oracle0.at(s, a)));
        if (ql.value(StateKey{s}, Action{a}) != oraclel.at(s, a)) ++mismatches;
      }
    }
    return Verdict{worst_lambda0 <= 1e-12 && mismatches == 0,
                   "lambda=0 max error " + sci(worst_lambda0) +
                       ", general-lambda mismatches " + std::to_string(mismatches) + " over " +
                       std::to_string(touched.size()) + " updates"};
  });

  // 3. Epsilon-greedy distribution.
  report(3, "epsilon-greedy distribution", [] {
    constexpr int kDraws = 100000;
    const std::vector<Action> legal{Action{0}, Action{3}, Action{5}, Action{8}};
    QTable q;
    const StateKey s{0};
    q.set(s, Action{0}, 0.1);
    q.set(s, Action{3}, 0.7);  // unique argmax
    q.set(s, Action{5}, -0.2);
    q.set(s, Action{8}, 0.0);
    std::string detail;
    bool ok = true;
    for (double eps : {0.0, 0.25, 0.5, 1.0}) {
      Rng rng(derive_seed(kMasterSeed, "eq4/" + std::to_string(eps)));
      std::array<long, 9> counts{};
      for (int i = 0; i < kDraws; ++i) counts[select_action(q, s, legal, eps, rng).cell]++;
      double worst_z = 0.0;
      for (Action a : legal) {
        const double p = a.cell == 3 ? 1.0 - eps + eps / 4.0 : eps / 4.0;
        const double sigma = std::sqrt(p * (1.0 - p) / kDraws);
        const double freq = static_cast<double>(counts[a.cell]) / kDraws;
        if (sigma == 0.0) {
          if (freq != p) ok = false;
        } else {
          worst_z = std::max(worst_z, std::abs(freq - p) / sigma);
        }
      }
      if (worst_z > 3.0) ok = false;
      detail += "eps=" + fmt(eps, 2) + " max|z|=" + fmt(worst_z, 2) + " ";
    }
    return Verdict{ok, detail};
  });

  // Shared training for 4, 5, 6 and 9.
  const ExperimentConfig cfg = base_config();
  const std::vector<TestBoard> boards = generate_test_boards();
  Invariants inv;
  std::vector<RepData> reps;
  const auto train_t0 = std::chrono::steady_clock::now();
  for (int rep = 0; rep < kRepetitions; ++rep) {
    RepData d{train_checked(cfg, Regime::SelfPlay, 1, rep, inv).front(), {}, {}};
    for (int size : {4, 6}) d.swiss[size] = train_checked(cfg, Regime::ModifiedSwiss, size, rep, inv);
    reps.push_back(std::move(d));
  }
  std::printf("   trained self-play and Swiss populations (sizes 4, 6) in %.1fs\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - train_t0).count());

  // 4. Board-test ordering.
  report(4, "board-test ordering Swiss vs self-play", [&] {
    bool ok = true;
    std::string detail;
    for (int size : {4, 6}) {
      double best_sum = 0.0, sp_sum = 0.0;
      int strictly = 0;
      std::string per_rep;
      for (int rep = 0; rep < kRepetitions; ++rep) {
        const auto& pop = reps[rep].swiss.at(size);
        int best = 0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
          best = std::max(best, board_score(pop[i], run_label(Regime::ModifiedSwiss, size, rep) +
                                                        "/agent" + std::to_string(i),
                                            boards));
        }
        const int sp = board_score(reps[rep].self_play,
                                   run_label(Regime::SelfPlay, 1, rep) + "/agent0", boards);
        best_sum += best;
        sp_sum += sp;
        strictly += best > sp;
        per_rep += std::to_string(best) + "v" + std::to_string(sp) + " ";
      }
      const bool size_ok = best_sum >= sp_sum && strictly >= 3;
      ok = ok && size_ok;
      detail += "size " + std::to_string(size) + ": mean best " + fmt(best_sum / kRepetitions, 2) +
                " vs self-play " + fmt(sp_sum / kRepetitions, 2) + ", strictly greater in " +
                std::to_string(strictly) + "/5 [" + per_rep + "]; ";
    }
    return Verdict{ok, detail};
  });

  // Leagues for 5, 6 and the accounting part of 9.
  std::vector<LeagueSummary> leagues;
  long mutated = 0;
  for (int rep = 0; rep < kRepetitions; ++rep) {
    const auto& pop = reps[rep].swiss.at(4);
    std::vector<std::uint64_t> before;
    before.push_back(snapshot_hash(reps[rep].self_play));
    for (const Agent& a : pop) before.push_back(snapshot_hash(a));

    std::vector<GreedyPolicy> greedy{GreedyPolicy(reps[rep].self_play.q)};
    std::vector<std::string> labels{run_label(Regime::SelfPlay, 1, rep) + "/agent0"};
    for (std::size_t i = 0; i < pop.size(); ++i) {
      greedy.emplace_back(pop[i].q);
      labels.push_back(run_label(Regime::ModifiedSwiss, 4, rep) + "/agent" + std::to_string(i));
    }
    std::vector<const Policy*> ptrs;
    std::vector<int> ids;
    for (std::size_t i = 0; i < greedy.size(); ++i) {
      ptrs.push_back(&greedy[i]);
      ids.push_back(static_cast<int>(i));
    }
    leagues.push_back(summarize_league(
        labels, run_league(ptrs, ids, kLeagueGames, StarterRule::Alternate,
                           derive_seed(kMasterSeed, "league/rep" + std::to_string(rep)))));
    for (std::size_t i = 0; i < pop.size(); ++i) board_score(pop[i], labels[i + 1], boards);

    std::vector<std::uint64_t> after;
    after.push_back(snapshot_hash(reps[rep].self_play));
    for (const Agent& a : pop) after.push_back(snapshot_hash(a));
    mutated += before != after;
  }

  // 5. Starter advantage.
  report(5, "starter advantage in league", [&] {
    long starter = 0, decisive = 0;
    for (const auto& l : leagues) {
      for (std::size_t i = 0; i < l.matrix.size(); ++i) {
        starter += l.matrix.starter_wins[i];
        decisive += l.matrix.total_wins(i);
      }
    }
    const double share = decisive == 0 ? 0.0 : static_cast<double>(starter) / decisive;
    return Verdict{share > 0.55, "starter wins " + std::to_string(starter) + " of " +
                                     std::to_string(decisive) + " decisive games = " +
                                     fmt(share) + " (threshold 0.55)"};
  });

  // 6. Social minus self-play wins per pairing.
  report(6, "social vs self-play league differential", [&] {
    double sum = 0.0;
    std::string per_rep;
    for (const auto& l : leagues) {
      sum += *l.social_minus_self_play;
      per_rep += fmt(*l.social_minus_self_play, 1) + " ";
    }
    const double mean = sum / kRepetitions;
    return Verdict{mean > 0.0, "mean differential " + fmt(mean, 2) + " games per 5000 [" +
                                   per_rep + "]"};
  });

  // 7. Population scaling at size 16.
  report(7, "size-16 intermediate agents Swiss vs round robin", [&] {
    double swiss_total = 0.0, rr_total = 0.0;
    std::string per_rep;
    Invariants inv16;
    for (int rep = 0; rep < kRepetitions; ++rep) {
      int counts[2] = {0, 0};
      int k = 0;
      for (Regime regime : {Regime::ModifiedSwiss, Regime::RoundRobin}) {
        const std::vector<Agent> pop = train_checked(cfg, regime, 16, rep, inv16);
        for (std::size_t i = 0; i < pop.size(); ++i) {
          counts[k] += board_score(pop[i], run_label(regime, 16, rep) + "/agent" +
                                               std::to_string(i), boards) >= 5;
        }
        ++k;
      }
      swiss_total += counts[0];
      rr_total += counts[1];
      per_rep += std::to_string(counts[0]) + "v" + std::to_string(counts[1]) + " ";
    }
    inv.budget_violations += inv16.budget_violations;
    inv.swiss_unbalanced += inv16.swiss_unbalanced;
    inv.swiss_rounds_checked += inv16.swiss_rounds_checked;
    inv.conservation_violations += inv16.conservation_violations;
    inv.max_abs_q = std::max(inv.max_abs_q, inv16.max_abs_q);
    return Verdict{swiss_total > rr_total,
                   "mean agents scoring >=5: Swiss " + fmt(swiss_total / kRepetitions, 2) +
                       " vs round robin " + fmt(rr_total / kRepetitions, 2) + " [" + per_rep +
                       "]"};
  });

  // 8. Determinism of the smoke reproduction.
  report(8, "reproduce --profile smoke determinism", [&] {
    if (cli.empty()) return Verdict{false, "CLI path not supplied"};
    const fs::path base = fs::temp_directory_path() / "socialtd_acceptance_determinism";
    fs::remove_all(base);
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "\"" + cli + "\" reproduce --profile smoke --seed 7 --out \"" +
                              (base / run).string() + "\" 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) return Verdict{false, "reproduce exited nonzero"};
    }
    long compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
      if (!entry.is_regular_file() || entry.path().filename() == "timing.json") continue;
      const fs::path other = base / "b" / fs::relative(entry.path(), base / "a");
      std::ifstream fa(entry.path(), std::ios::binary), fb(other, std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      ++compared;
      if (!fb || sa.str() != sb.str()) ++differing;
    }
    long count_b = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "b")) {
      count_b += entry.is_regular_file() && entry.path().filename() != "timing.json";
    }
    fs::remove_all(base);
    return Verdict{compared > 0 && differing == 0 && count_b == compared,
                   std::to_string(compared) + " files compared, " + std::to_string(differing) +
                       " differ"};
  });

  // 9. Invariant suites.
  report(9, "invariant suites", [&] {
    long accounting = 0;
    for (const auto& l : leagues) accounting += !l.matrix.accounting_holds();
    const bool ok = accounting == 0 && inv.swiss_unbalanced == 0 &&
                    inv.swiss_rounds_checked > 0 && inv.budget_violations == 0 &&
                    inv.conservation_violations == 0 && inv.plies_violations == 0 &&
                    mutated == 0 && inv.max_abs_q <= 2.0;
    return Verdict{ok, "accounting failures " + std::to_string(accounting) +
                           ", unbalanced Swiss rounds " + std::to_string(inv.swiss_unbalanced) +
                           "/" + std::to_string(inv.swiss_rounds_checked) +
                           ", budget violations " + std::to_string(inv.budget_violations) +
                           ", conservation violations " +
                           std::to_string(inv.conservation_violations) +
                           ", ply violations " + std::to_string(inv.plies_violations) +
                           ", mutated by evaluation " + std::to_string(mutated) +
                           ", max|Q| " + fmt(inv.max_abs_q)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
