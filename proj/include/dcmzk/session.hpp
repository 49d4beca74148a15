#pragma once

// Party state machines, the drivers that connect two of them, and the
// transcript format.
//
// A party reacts to received frames by emitting zero or more frames. The
// same party objects run unchanged in lockstep over an in-process channel,
// on two threads, or in two processes joined by a socket, so a session
// with fixed seeds produces the same transcript everywhere.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dcmzk/channel.hpp"
#include "dcmzk/digest.hpp"
#include "dcmzk/errors.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/wire.hpp"

namespace dcmzk {

class ProtocolViolation : public TransportError {
 public:
  using TransportError::TransportError;
};

class Party {
 public:
  virtual ~Party() = default;
  virtual std::vector<Bytes> open() { return {}; }
  virtual std::vector<Bytes> on_frame(const Frame& frame) = 0;
  virtual bool finished() const = 0;
};

enum class Composition { atomic, sequential, parallel };

struct SessionMode {
  Composition composition = Composition::atomic;
  std::size_t k = 1;

  static SessionMode atomic() { return {Composition::atomic, 1}; }
  static SessionMode sequential(std::size_t k) { return {Composition::sequential, k}; }
  static SessionMode parallel(std::size_t k) { return {Composition::parallel, k}; }

  // Atomic executions run one after another; slots share one exchange.
  std::size_t executions() const { return composition == Composition::sequential ? k : 1; }
  std::size_t slots() const { return composition == Composition::parallel ? k : 1; }

  std::string label() const {
    switch (composition) {
      case Composition::atomic: return "atomic";
      case Composition::sequential: return "sequential:" + std::to_string(k);
      case Composition::parallel: return "parallel:" + std::to_string(k);
    }
    return "?";
  }

  static SessionMode parse(const std::string& name, std::size_t k) {
    if (k == 0) throw ParseError("repetition count must be at least 1");
    if (name == "atomic") {
      if (k != 1) throw ParseError("atomic mode takes k = 1");
      return atomic();
    }
    if (name == "sequential") return sequential(k);
    if (name == "parallel") return parallel(k);
    throw ParseError("unknown mode '" + name + "'");
  }

  friend bool operator==(const SessionMode&, const SessionMode&) = default;
};

struct SessionSeeds {
  Seed prover{};
  Seed verifier{};

  static SessionSeeds from_master(std::uint64_t master) {
    return {derive_seed(master, "prover"), derive_seed(master, "verifier")};
  }
  // Independent seeds for trial `index` of a Monte Carlo run.
  static SessionSeeds for_trial(std::uint64_t master, std::uint64_t index) {
    const Seed base = derive_seed(master, "trials");
    return {derive_seed(base, "prover", index), derive_seed(base, "verifier", index)};
  }
};

struct TranscriptEntry {
  char from = 'P';  // 'P' prover, 'V' verifier
  Bytes body;       // tag + payload
  bool oversize = false;
  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct Transcript {
  Digest256 instance_digest{};
  std::optional<Seed> verifier_seed;
  std::optional<Seed> prover_seed;
  std::string mode = "atomic";
  std::vector<TranscriptEntry> entries;
  std::optional<bool> verdict;  // set once the session completed

  Message message(std::size_t i) const { return decode(Frame{entries[i].body, entries[i].oversize}); }

  // Rounds are the protocol messages proper; verdict frames are outputs.
  std::size_t round_count() const {
    std::size_t n = 0;
    for (const auto& e : entries)
      if (e.body.empty() || e.body[0] != static_cast<std::uint8_t>(Tag::verdict)) ++n;
    return n;
  }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

inline std::string format_transcript(const Transcript& t) {
  auto seed_text = [](const std::optional<Seed>& s) { return s ? to_hex(*s) : std::string("-"); };
  std::ostringstream out;
  out << "dcmzk-transcript 1\n";
  out << "instance-digest: " << to_hex(t.instance_digest) << "\n";
  out << "seed-verifier: " << seed_text(t.verifier_seed) << "\n";
  out << "seed-prover: " << seed_text(t.prover_seed) << "\n";
  out << "mode: " << t.mode << "\n";
  for (const auto& e : t.entries) {
    const std::uint8_t tag = e.body.empty() ? 0 : e.body[0];
    out << e.from << ' ' << tag_name(tag) << ' ' << to_hex(e.body) << (e.oversize ? " oversize" : "") << " # "
        << describe(decode(Frame{e.body, e.oversize})) << "\n";
  }
  out << "verdict: " << (t.verdict ? (*t.verdict ? "ACCEPT" : "REJECT") : "INCOMPLETE") << "\n";
  return out.str();
}

inline Transcript parse_transcript(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Transcript t;
  auto expect_prefix = [&](const std::string& prefix) -> std::string {
    if (!std::getline(in, line) || line.rfind(prefix, 0) != 0) throw ParseError("transcript: expected '" + prefix + "'");
    return line.substr(prefix.size());
  };
  auto parse_seed = [](const std::string& hex) -> std::optional<Seed> {
    if (hex == "-") return std::nullopt;
    const auto bytes = from_hex(hex);
    if (bytes.size() != 32) throw ParseError("transcript: seed must be 32 bytes");
    Seed s{};
    std::copy(bytes.begin(), bytes.end(), s.begin());
    return s;
  };
  if (!std::getline(in, line) || line != "dcmzk-transcript 1") throw ParseError("transcript: bad header");
  const auto digest = from_hex(expect_prefix("instance-digest: "));
  if (digest.size() != 32) throw ParseError("transcript: digest must be 32 bytes");
  std::copy(digest.begin(), digest.end(), t.instance_digest.begin());
  t.verifier_seed = parse_seed(expect_prefix("seed-verifier: "));
  t.prover_seed = parse_seed(expect_prefix("seed-prover: "));
  t.mode = expect_prefix("mode: ");
  while (std::getline(in, line)) {
    if (line.rfind("verdict: ", 0) == 0) {
      const auto v = line.substr(9);
      if (v == "ACCEPT") t.verdict = true;
      else if (v == "REJECT") t.verdict = false;
      else if (v != "INCOMPLETE") throw ParseError("transcript: bad verdict line");
      return t;
    }
    std::istringstream fields(line);
    std::string from, name, hex, extra;
    if (!(fields >> from >> name >> hex) || (from != "P" && from != "V"))
      throw ParseError("transcript: bad message line");
    TranscriptEntry e;
    e.from = from[0];
    e.body = from_hex(hex);
    e.oversize = (fields >> extra) && extra == "oversize";
    t.entries.push_back(std::move(e));
  }
  throw ParseError("transcript: missing verdict line");
}

// Runs one party to completion over a channel.
inline void run_party(Party& party, Channel& channel) {
  for (const auto& b : party.open()) channel.send(std::span<const std::uint8_t>(b));
  while (!party.finished()) {
    const Frame f = channel.receive();
    for (const auto& b : party.on_frame(f)) channel.send(std::span<const std::uint8_t>(b));
  }
}

// Single-threaded alternation over an in-process channel pair.
inline void run_lockstep(Party& prover, Party& verifier) {
  auto [p_end, v_end] = make_in_process_pair();
  std::size_t to_verifier = 0, to_prover = 0;
  for (const auto& b : prover.open()) {
    p_end->send(std::span<const std::uint8_t>(b));
    ++to_verifier;
  }
  for (const auto& b : verifier.open()) {
    v_end->send(std::span<const std::uint8_t>(b));
    ++to_prover;
  }
  while (to_verifier || to_prover) {
    if (to_verifier) {
      --to_verifier;
      for (const auto& b : verifier.on_frame(v_end->receive())) {
        v_end->send(std::span<const std::uint8_t>(b));
        ++to_prover;
      }
    } else {
      --to_prover;
      for (const auto& b : prover.on_frame(p_end->receive())) {
        p_end->send(std::span<const std::uint8_t>(b));
        ++to_verifier;
      }
    }
  }
  if (!prover.finished() || !verifier.finished()) throw ProtocolViolation("session stalled before completion");
}

// Both parties on their own threads, joined by an in-process channel.
inline void run_threaded(Party& prover, Party& verifier, std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto [p_end, v_end] = make_in_process_pair(timeout);
  std::exception_ptr prover_error, verifier_error;
  std::thread pt([&, ch = std::move(p_end)]() mutable {
    try {
      run_party(prover, *ch);
    } catch (...) {
      prover_error = std::current_exception();
    }
    ch.reset();
  });
  std::thread vt([&, ch = std::move(v_end)]() mutable {
    try {
      run_party(verifier, *ch);
    } catch (...) {
      verifier_error = std::current_exception();
    }
    ch.reset();
  });
  pt.join();
  vt.join();
  if (verifier_error) std::rethrow_exception(verifier_error);
  if (prover_error) std::rethrow_exception(prover_error);
}

// Prover in a forked child process, verifier in this one, joined by a
// socket pair. The child exits without returning to the caller.
inline void run_forked(Party& prover, Party& verifier, std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto [parent_fd, child_fd] = make_socket_pair();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(parent_fd);
    ::close(child_fd);
    throw TransportError("fork failed");
  }
  if (pid == 0) {
    ::close(parent_fd);
    int code = 0;
    try {
      FdChannel ch(child_fd, timeout);
      run_party(prover, ch);
    } catch (...) {
      code = 1;
    }
    ::_exit(code);
  }
  ::close(child_fd);
  std::exception_ptr error;
  {
    FdChannel ch(parent_fd, timeout);
    try {
      run_party(verifier, ch);
    } catch (...) {
      error = std::current_exception();
    }
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (error) std::rethrow_exception(error);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) throw TransportError("prover process failed");
}

enum class Transport { lockstep, threaded, forked };

inline void run_parties(Party& prover, Party& verifier, Transport transport) {
  switch (transport) {
    case Transport::lockstep: return run_lockstep(prover, verifier);
    case Transport::threaded: return run_threaded(prover, verifier);
    case Transport::forked: return run_forked(prover, verifier);
  }
}

}  // namespace dcmzk
