#pragma once

// Tabular action-value learning with accumulating eligibility traces.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socialtd/game.hpp"
#include "socialtd/random.hpp"

namespace socialtd {

enum class Bootstrap : std::uint8_t {
  Max,    // δ uses max over the next state's legal actions
  Sarsa,  // δ uses the action actually chosen in the next state
};

std::string to_string(Bootstrap b);
Bootstrap parse_bootstrap(std::string_view s);

struct ExplorationSchedule {
  double epsilon0 = 0.9;
  double epsilon_min = 0.01;
  double epsilon_decay = 1.0;

  // Decay chosen so that epsilon reaches epsilon_min at `fraction` of the
  // training budget.
  static ExplorationSchedule for_budget(long episodes, double epsilon0 = 0.9,
                                        double epsilon_min = 0.01, double fraction = 0.9);
};

struct Hyperparameters {
  double alpha = 0.25;
  double gamma = 0.97;
  double lambda = 0.95;
  double epsilon0 = 0.9;
  double epsilon_min = 0.01;
  double epsilon_decay = 1.0;
  Bootstrap bootstrap = Bootstrap::Max;

  // Throws std::invalid_argument if the exploration schedule or a rate lies
  // outside its admissible range.
  void validate() const;
  bool within_identity_ranges() const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

// Ranges agents draw their identities from.
struct IdentityRanges {
  double alpha_lo = 0.2, alpha_hi = 0.3;
  double gamma_lo = 0.95, gamma_hi = 0.99;
  double lambda_lo = 0.9, lambda_hi = 1.0;
};

struct AgentIdentity {
  int id = 0;
  Hyperparameters params;
  std::uint64_t seed = 0;
  long episodes_trained = 0;

  friend bool operator==(const AgentIdentity&, const AgentIdentity&) = default;
};

// Draws alpha, gamma and lambda uniformly (inclusive of the upper endpoint
// up to floating-point resolution) from `ranges` via `uniform01`.
Hyperparameters sample_params(const std::function<double()>& uniform01,
                              const ExplorationSchedule& schedule,
                              const IdentityRanges& ranges = {},
                              Bootstrap bootstrap = Bootstrap::Max);

// Seeds `rng` from `seed` and draws the identity from it. The same stream is
// what the agent later uses for exploration and tie-breaks.
AgentIdentity sample_identity(int id, std::uint64_t seed, Rng& rng,
                              const ExplorationSchedule& schedule,
                              const IdentityRanges& ranges = {},
                              Bootstrap bootstrap = Bootstrap::Max);

// max(epsilon_min, epsilon0 * epsilon_decay^episode).
double epsilon_at(const Hyperparameters& p, long episode);

// Dense action-value table over every (state key, cell). Entries never
// written read as kInitialValue; only written entries are serialized.
class QTable {
 public:
  static constexpr double kInitialValue = 0.0;

  QTable();

  double value(StateKey s, Action a) const { return values_[index(s, a)]; }

  // Throws std::invalid_argument when `a` is not legal in `s`.
  void set(StateKey s, Action a, double v);
  void add(StateKey s, Action a, double delta);

  bool written(StateKey s, Action a) const { return written_[index(s, a)] != 0; }

  // Largest value over `legal`; kInitialValue for an empty span.
  double max_value(StateKey s, std::span<const Action> legal) const;

  std::size_t size() const { return size_; }
  double max_abs() const;

  struct Entry {
    StateKey key;
    Action action;
    double value;
  };
  // Written entries sorted by key then action.
  std::vector<Entry> entries() const;

  friend bool operator==(const QTable& a, const QTable& b) {
    return a.values_ == b.values_ && a.written_ == b.written_;
  }

 private:
  static std::size_t index(StateKey s, Action a) {
    return static_cast<std::size_t>(s.value) * kNumCells + static_cast<std::size_t>(a.cell);
  }
  void check_legal(StateKey s, Action a) const;

  std::vector<double> values_;
  std::vector<std::uint8_t> written_;
  std::size_t size_ = 0;
};

class EligibilityTraces {
 public:
  static constexpr double kFloor = 1e-8;

  struct Entry {
    StateKey key;
    Action action;
    double trace;
  };

  // Clears every trace (start of an episode).
  void reset() { entries_.clear(); }

  void accumulate(StateKey s, Action a);
  double trace(StateKey s, Action a) const;
  bool empty() const { return entries_.empty(); }
  std::span<const Entry> entries() const { return entries_; }

  // Applies q += step * e to every traced pair, then e *= decay, pruning
  // entries that fall below kFloor.
  void apply_and_decay(QTable& q, double step, double decay);

 private:
  std::vector<Entry> entries_;
};

inline void begin_episode(EligibilityTraces& traces) { traces.reset(); }

struct Transition {
  StateKey s;
  Action a;
  double r = 0.0;
  // nullopt marks a terminal successor.
  std::optional<StateKey> s_next;
  // Legal actions in s_next; empty when terminal. Not owned.
  std::span<const Action> legal_next;
  // Needed only under Bootstrap::Sarsa for non-terminal successors.
  std::optional<Action> a_next;
};

// δ = r + γ·Q̂(s′) − Q(s,a); e(s,a) += 1; Q += α·δ·e and e ← γ·λ·e for every
// traced pair. Returns δ.
double td_update(QTable& q, EligibilityTraces& traces, const Transition& t,
                 const Hyperparameters& p);

// Argmax of Q(s,·) over `legal` with uniform random tie-break.
Action greedy_action(const QTable& q, StateKey s, std::span<const Action> legal, Rng& rng);

// With probability epsilon a uniform legal action, otherwise greedy_action.
Action select_action(const QTable& q, StateKey s, std::span<const Action> legal,
                     double epsilon, Rng& rng);

}  // namespace socialtd
