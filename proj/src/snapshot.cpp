#include "socialtd/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace socialtd {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string format_snapshot(const Agent& agent, std::string_view label) {
  const AgentIdentity& id = agent.identity;
  const Hyperparameters& p = id.params;
  std::ostringstream out;
  out << "socialtd-snapshot " << kSnapshotVersion << '\n';
  out << "label " << (label.empty() ? std::string("agent") + std::to_string(id.id)
                                    : std::string(label))
      << '\n';
  out << "id " << id.id << '\n';
  out << "seed " << id.seed << '\n';
  out << "episodes " << id.episodes_trained << '\n';
  out << "alpha " << format_double(p.alpha) << '\n';
  out << "gamma " << format_double(p.gamma) << '\n';
  out << "lambda " << format_double(p.lambda) << '\n';
  out << "epsilon0 " << format_double(p.epsilon0) << '\n';
  out << "epsilon_min " << format_double(p.epsilon_min) << '\n';
  out << "epsilon_decay " << format_double(p.epsilon_decay) << '\n';
  out << "bootstrap " << to_string(p.bootstrap) << '\n';
  const auto entries = agent.q.entries();
  out << "entries " << entries.size() << '\n';
  for (const auto& e : entries) {
    out << e.key.value << ' ' << e.action.cell << ' ' << format_double(e.value) << '\n';
  }
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  std::string field(std::string_view name) {
    std::string line;
    ++lineno_;
    if (!std::getline(in_, line)) fail("unexpected end of file, wanted '" + std::string(name) + "'");
    const auto space = line.find(' ');
    if (space == std::string::npos || std::string_view(line).substr(0, space) != name) {
      fail("expected field '" + std::string(name) + "'");
    }
    return line.substr(space + 1);
  }

  bool next(std::string& line) {
    ++lineno_;
    return static_cast<bool>(std::getline(in_, line));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("snapshot line " + std::to_string(lineno_) + ": " + what);
  }

 private:
  std::istringstream in_;
  int lineno_ = 0;
};

template <typename Int>
Int parse_int(LineReader& r, const std::string& s) {
  Int v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) r.fail("bad integer '" + s + "'");
  return v;
}

}  // namespace

AgentSnapshot parse_snapshot(std::string_view text) {
  LineReader r(text);
  const int version = parse_int<int>(r, r.field("socialtd-snapshot"));
  if (version != kSnapshotVersion) {
    r.fail("unsupported snapshot version " + std::to_string(version));
  }
  AgentSnapshot snap;
  snap.label = r.field("label");
  AgentIdentity& id = snap.agent.identity;
  Hyperparameters& p = id.params;
  try {
    id.id = parse_int<int>(r, r.field("id"));
    id.seed = parse_int<std::uint64_t>(r, r.field("seed"));
    id.episodes_trained = parse_int<long>(r, r.field("episodes"));
    p.alpha = parse_double(r.field("alpha"));
    p.gamma = parse_double(r.field("gamma"));
    p.lambda = parse_double(r.field("lambda"));
    p.epsilon0 = parse_double(r.field("epsilon0"));
    p.epsilon_min = parse_double(r.field("epsilon_min"));
    p.epsilon_decay = parse_double(r.field("epsilon_decay"));
    p.bootstrap = parse_bootstrap(r.field("bootstrap"));
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  snap.agent.rng = Rng(id.seed);

  const auto count = parse_int<std::size_t>(r, r.field("entries"));
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!r.next(line)) r.fail("expected " + std::to_string(count) + " entries");
    std::istringstream fields(line);
    std::string key, cell, value;
    if (!(fields >> key >> cell >> value)) r.fail("malformed entry");
    const StateKey k{parse_int<std::uint32_t>(r, key)};
    const Action a{parse_int<int>(r, cell)};
    try {
      snap.agent.q.set(k, a, parse_double(value));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  if (r.next(line) && !line.empty()) r.fail("trailing content after entries");
  return snap;
}

void save_snapshot(const std::string& path, const Agent& agent, std::string_view label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write snapshot " + path);
  out << format_snapshot(agent, label);
  if (!out) throw std::runtime_error("error writing snapshot " + path);
}

AgentSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_snapshot(buf.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::uint64_t snapshot_hash(const Agent& agent) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_snapshot(agent)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace socialtd
