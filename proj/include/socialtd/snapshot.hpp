#pragma once

// Agent snapshot files: a versioned plain-text header followed by the
// written Q-table entries as sorted (key, action, value) triples. Values use
// the shortest decimal form that round-trips exactly.
//
//   socialtd-snapshot 1
//   label modified_swiss/size4/rep0/agent2
//   id 2
//   seed 1234
//   episodes 50000
//   alpha 0.2671
//   gamma 0.9612
//   lambda 0.97
//   epsilon0 0.9
//   epsilon_min 0.01
//   epsilon_decay 0.9999
//   bootstrap max
//   entries 3
//   0 4 0.125
//   ...

#include <cstdint>
#include <string>
#include <string_view>

#include "socialtd/training.hpp"

namespace socialtd {

inline constexpr int kSnapshotVersion = 1;

struct AgentSnapshot {
  std::string label;
  Agent agent;
};

std::string format_snapshot(const Agent& agent, std::string_view label = {});

// The restored agent's random stream is re-seeded from its identity seed;
// stream position is not persisted. Throws std::runtime_error on malformed
// input or an unsupported version.
AgentSnapshot parse_snapshot(std::string_view text);

void save_snapshot(const std::string& path, const Agent& agent, std::string_view label = {});
AgentSnapshot load_snapshot(const std::string& path);

// FNV-1a over the formatted snapshot.
std::uint64_t snapshot_hash(const Agent& agent);

std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace socialtd
