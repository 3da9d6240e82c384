#include "socialtd/rl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socialtd {

std::string to_string(Bootstrap b) { return b == Bootstrap::Max ? "max" : "sarsa"; }

Bootstrap parse_bootstrap(std::string_view s) {
  if (s == "max") return Bootstrap::Max;
  if (s == "sarsa") return Bootstrap::Sarsa;
  throw std::invalid_argument("unknown bootstrap '" + std::string(s) + "'");
}

ExplorationSchedule ExplorationSchedule::for_budget(long episodes, double epsilon0,
                                                    double epsilon_min, double fraction) {
  ExplorationSchedule s{epsilon0, epsilon_min, 1.0};
  const double horizon = fraction * static_cast<double>(episodes);
  if (horizon >= 1.0 && epsilon_min > 0.0 && epsilon_min < epsilon0) {
    s.epsilon_decay = std::pow(epsilon_min / epsilon0, 1.0 / horizon);
  }
  return s;
}

void Hyperparameters::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon0 && epsilon0 <= 1.0)) {
    fail("exploration requires 0 <= epsilon_min <= epsilon0 <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) fail("epsilon_decay must lie in (0, 1]");
}

bool Hyperparameters::within_identity_ranges() const {
  const IdentityRanges r;
  return alpha >= r.alpha_lo && alpha <= r.alpha_hi && gamma >= r.gamma_lo &&
         gamma <= r.gamma_hi && lambda >= r.lambda_lo && lambda <= r.lambda_hi;
}

Hyperparameters sample_params(const std::function<double()>& uniform01,
                              const ExplorationSchedule& schedule, const IdentityRanges& ranges,
                              Bootstrap bootstrap) {
  Hyperparameters p;
  p.alpha = ranges.alpha_lo + (ranges.alpha_hi - ranges.alpha_lo) * uniform01();
  p.gamma = ranges.gamma_lo + (ranges.gamma_hi - ranges.gamma_lo) * uniform01();
  p.lambda = ranges.lambda_lo + (ranges.lambda_hi - ranges.lambda_lo) * uniform01();
  p.epsilon0 = schedule.epsilon0;
  p.epsilon_min = schedule.epsilon_min;
  p.epsilon_decay = schedule.epsilon_decay;
  p.bootstrap = bootstrap;
  p.validate();
  return p;
}

AgentIdentity sample_identity(int id, std::uint64_t seed, Rng& rng,
                              const ExplorationSchedule& schedule, const IdentityRanges& ranges,
                              Bootstrap bootstrap) {
  rng = Rng(seed);
  AgentIdentity identity;
  identity.id = id;
  identity.seed = seed;
  identity.params = sample_params([&rng] { return rng.uniform(); }, schedule, ranges, bootstrap);
  return identity;
}

double epsilon_at(const Hyperparameters& p, long episode) {
  if (episode < 0) throw std::invalid_argument("episode must be nonnegative");
  return std::max(p.epsilon_min, p.epsilon0 * std::pow(p.epsilon_decay, static_cast<double>(episode)));
}

// --- QTable ----------------------------------------------------------------

QTable::QTable()
    : values_(static_cast<std::size_t>(kNumStateKeys) * kNumCells, kInitialValue),
      written_(static_cast<std::size_t>(kNumStateKeys) * kNumCells, 0) {}

void QTable::check_legal(StateKey s, Action a) const {
  if (s.value >= kNumStateKeys || a.cell < 0 || a.cell >= kNumCells ||
      cell_of(s, a.cell) != Mark::Empty) {
    throw std::invalid_argument("illegal (state " + std::to_string(s.value) + ", cell " +
                                std::to_string(a.cell) + ") pair written to Q-table");
  }
}

void QTable::set(StateKey s, Action a, double v) {
  check_legal(s, a);
  const std::size_t i = index(s, a);
  if (!written_[i]) {
    written_[i] = 1;
    ++size_;
  }
  values_[i] = v;
}

void QTable::add(StateKey s, Action a, double delta) {
  check_legal(s, a);
  const std::size_t i = index(s, a);
  if (!written_[i]) {
    written_[i] = 1;
    ++size_;
  }
  values_[i] += delta;
}

double QTable::max_value(StateKey s, std::span<const Action> legal) const {
  if (legal.empty()) return kInitialValue;
  double best = value(s, legal.front());
  for (Action a : legal.subspan(1)) best = std::max(best, value(s, a));
  return best;
}

double QTable::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<QTable::Entry> QTable::entries() const {
  std::vector<Entry> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!written_[i]) continue;
    out.push_back(Entry{StateKey{static_cast<std::uint32_t>(i / kNumCells)},
                        Action{static_cast<int>(i % kNumCells)}, values_[i]});
  }
  return out;
}

// --- EligibilityTraces -----------------------------------------------------

void EligibilityTraces::accumulate(StateKey s, Action a) {
  for (Entry& e : entries_) {
    if (e.key == s && e.action == a) {
      e.trace += 1.0;
      return;
    }
  }
  entries_.push_back(Entry{s, a, 1.0});
}

double EligibilityTraces::trace(StateKey s, Action a) const {
  for (const Entry& e : entries_) {
    if (e.key == s && e.action == a) return e.trace;
  }
  return 0.0;
}

void EligibilityTraces::apply_and_decay(QTable& q, double step, double decay) {
  for (Entry& e : entries_) {
    q.add(e.key, e.action, step * e.trace);
    e.trace *= decay;
  }
  std::erase_if(entries_, [](const Entry& e) { return e.trace < kFloor; });
}

// --- updates and action selection ------------------------------------------

double td_update(QTable& q, EligibilityTraces& traces, const Transition& t,
                 const Hyperparameters& p) {
  double target = t.r;
  if (t.s_next) {
    if (p.bootstrap == Bootstrap::Max) {
      target += p.gamma * q.max_value(*t.s_next, t.legal_next);
    } else {
      if (!t.a_next) throw std::invalid_argument("sarsa bootstrap needs the next action");
      target += p.gamma * q.value(*t.s_next, *t.a_next);
    }
  }
  const double delta = target - q.value(t.s, t.a);
  traces.accumulate(t.s, t.a);
  traces.apply_and_decay(q, p.alpha * delta, p.gamma * p.lambda);
  return delta;
}

Action greedy_action(const QTable& q, StateKey s, std::span<const Action> legal, Rng& rng) {
  if (legal.empty()) throw std::invalid_argument("greedy_action with no legal actions");
  std::array<Action, kNumCells> ties{};
  std::size_t n = 0;
  double best = 0.0;
  for (Action a : legal) {
    const double v = q.value(s, a);
    if (n == 0 || v > best) {
      best = v;
      n = 0;
      ties[n++] = a;
    } else if (v == best) {
      ties[n++] = a;
    }
  }
  return n == 1 ? ties[0] : ties[rng.below(n)];
}

Action select_action(const QTable& q, StateKey s, std::span<const Action> legal, double epsilon,
                     Rng& rng) {
  if (legal.empty()) throw std::invalid_argument("select_action with no legal actions");
  if (rng.uniform() < epsilon) return legal[rng.below(legal.size())];
  return greedy_action(q, s, legal, rng);
}

}  // namespace socialtd
