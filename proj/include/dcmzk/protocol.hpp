#pragma once

// The three-round public-coin proof of double coset membership and its
// sequential and parallel compositions.
//
//   1. P: pick g in G, h in H uniformly; send t = g s h.
//      V: if t is not a permutation of the instance degree, stop and
//         ACCEPT. (Counterintuitive, but that is the protocol as stated;
//         DcmVerifier::Options can switch it off.)
//   2. V: send a fair bit b.
//   3. P: b == 0: send (g, h).  b != 0: send (g g0, h0 h) where s = g0 h0.
//      V: b == 0: accept iff g in G, h in H, t = g s h.
//         b != 0: accept iff x in G, y in H, t = x y.
//
// Any nonzero challenge byte takes the b != 0 branch.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dcmzk/dcm.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/session.hpp"
#include "dcmzk/view.hpp"
#include "dcmzk/wire.hpp"

namespace dcmzk {

struct ProverWitness {
  Factorization factorization;
};

// Obtains the witness from the brute-force oracle; OrderExceedsCap and
// NotInDoubleCoset surface unchanged.
inline ProverWitness make_witness(const PreparedInstance& p, std::size_t cap = kDefaultCap) {
  return {dcm_factorize(p, cap)};
}

// Prover's hidden state between commit and response.
struct CommitState {
  Permutation t;
  Permutation g;
  Permutation h;
};

inline CommitState prover_commit(const PreparedInstance& p, RandomSource& rng) {
  Permutation g = p.g().uniform_sample(rng);
  Permutation h = p.h().uniform_sample(rng);
  Permutation t = g * p.s() * h;
  return {std::move(t), std::move(g), std::move(h)};
}

inline std::pair<Permutation, Permutation> prover_respond(const ProverWitness& w, const CommitState& st,
                                                          std::uint8_t challenge) {
  if (challenge == 0) return {st.g, st.h};
  return {st.g * w.factorization.g0, w.factorization.h0 * st.h};
}

inline bool commit_well_formed(const PreparedInstance& p, const Permutation& t) { return t.degree() == p.degree(); }

// Emits Verdict(true) for a malformed commitment, otherwise a fair bit
// drawn from `rng` (exactly one bit consumed).
inline Message verifier_challenge(const PreparedInstance& p, const Message& commit, RandomSource& rng) {
  const auto* c = std::get_if<Commit>(&commit);
  if (!c || c->t.size() != 1 || !commit_well_formed(p, c->t.front())) return Verdict{true};
  return Challenge{{static_cast<std::uint8_t>(rng.bits(1))}};
}

inline bool verifier_check(const PreparedInstance& p, const Permutation& t, std::uint8_t challenge,
                           const Permutation& x, const Permutation& y) {
  if (x.degree() != p.degree() || y.degree() != p.degree()) return false;
  if (!p.g().contains(x) || !p.h().contains(y)) return false;
  return challenge == 0 ? x * p.s() * y == t : x * y == t;
}

// --- provers -------------------------------------------------------------

class ProverStrategy {
 public:
  virtual ~ProverStrategy() = default;
  virtual CommitState commit(RandomSource& rng) = 0;
  virtual std::pair<Permutation, Permutation> respond(const CommitState& st, std::uint8_t challenge) = 0;
};

class HonestProver final : public ProverStrategy {
 public:
  HonestProver(const PreparedInstance& p, ProverWitness w) : p_(&p), w_(std::move(w)) {}
  CommitState commit(RandomSource& rng) override { return prover_commit(*p_, rng); }
  std::pair<Permutation, Permutation> respond(const CommitState& st, std::uint8_t b) override {
    return prover_respond(w_, st, b);
  }

 private:
  const PreparedInstance* p_;
  ProverWitness w_;
};

// Best possible cheater on a NO instance: commits t = g h, which can only be
// opened on the b != 0 branch, and always opens (g, h). Wins exactly when
// the challenge is nonzero.
class OptimalCheatingProver final : public ProverStrategy {
 public:
  explicit OptimalCheatingProver(const PreparedInstance& p, std::size_t cap = kDefaultCap) : p_(&p) {
    if (dcm_decide(p, cap)) throw RequiresNoInstance();
  }
  CommitState commit(RandomSource& rng) override {
    Permutation g = p_->g().uniform_sample(rng);
    Permutation h = p_->h().uniform_sample(rng);
    Permutation t = g * h;
    return {std::move(t), std::move(g), std::move(h)};
  }
  std::pair<Permutation, Permutation> respond(const CommitState& st, std::uint8_t) override { return {st.g, st.h}; }

 private:
  const PreparedInstance* p_;
};

// Drives a ProverStrategy through a composed session. Execution i of a
// sequential session draws from prover stream i; slot j of a parallel
// session draws from stream j.
class DcmProver final : public Party {
 public:
  DcmProver(ProverStrategy& strategy, SessionMode mode, RandomStreams& streams)
      : strategy_(&strategy), mode_(mode), streams_(&streams) {}

  std::vector<Bytes> open() override { return {commit_frame()}; }

  std::vector<Bytes> on_frame(const Frame& frame) override {
    const Message m = decode(frame);
    if (const auto* v = std::get_if<Verdict>(&m)) {
      last_verdict_ = v->accept;
      if (++execution_ == mode_.executions()) {
        finished_ = true;
        return {};
      }
      return {commit_frame()};
    }
    if (pending_.empty()) throw ProtocolViolation("prover: unexpected message");
    // A malformed or short challenge falls into the b != 0 branch.
    const auto* c = std::get_if<Challenge>(&m);
    if (!c && !std::holds_alternative<Malformed>(m)) throw ProtocolViolation("prover: expected a challenge");
    Response r;
    for (std::size_t slot = 0; slot < pending_.size(); ++slot) {
      const std::uint8_t b = c && slot < c->b.size() ? c->b[slot] : std::uint8_t{1};
      r.xy.push_back(strategy_->respond(pending_[slot], b));
    }
    pending_.clear();
    return {encode_body(r)};
  }

  bool finished() const override { return finished_; }
  bool last_verdict() const { return last_verdict_; }

 private:
  Bytes commit_frame() {
    Commit c;
    pending_.clear();
    for (std::size_t slot = 0; slot < mode_.slots(); ++slot) {
      auto& rng = streams_->stream(mode_.composition == Composition::parallel ? slot : execution_);
      pending_.push_back(strategy_->commit(rng));
      c.t.push_back(pending_.back().t);
    }
    return encode_body(c);
  }

  ProverStrategy* strategy_;
  SessionMode mode_;
  RandomStreams* streams_;
  std::vector<CommitState> pending_;
  std::size_t execution_ = 0;
  bool finished_ = false;
  bool last_verdict_ = false;
};

// --- verifiers -----------------------------------------------------------

// A (possibly cheating) verifier's challenge rule: a deterministic function
// of the instance, its random tape, the completed stages, and the new
// commitment. Reads of the tape are tracked so the scanned prefix is known.
struct VerifierStrategy {
  std::string name;
  std::function<std::size_t(std::size_t k)> randomness_bound;
  std::function<std::uint8_t(const DcmInstance&, RandomTape&, std::span<const StageRecord>, const Permutation& t)>
      challenge;
};

inline VerifierStrategy honest_strategy() {
  return {"honest", [](std::size_t k) { return k; },
          [](const DcmInstance&, RandomTape& r, std::span<const StageRecord> history, const Permutation&) {
            return static_cast<std::uint8_t>(r.bit(history.size()));
          }};
}

// Fixed set of cheating verifiers used to exercise the black-box simulator.
inline std::vector<VerifierStrategy> adversary_zoo() {
  return {
      honest_strategy(),
      {"constant-0", [](std::size_t) { return std::size_t{0}; },
       [](const DcmInstance&, RandomTape&, std::span<const StageRecord>, const Permutation&) {
         return std::uint8_t{0};
       }},
      {"constant-1", [](std::size_t) { return std::size_t{0}; },
       [](const DcmInstance&, RandomTape&, std::span<const StageRecord>, const Permutation&) {
         return std::uint8_t{1};
       }},
      // Lowest bit of the image of point 0 under t.
      {"first-bit-of-t", [](std::size_t) { return std::size_t{0}; },
       [](const DcmInstance&, RandomTape&, std::span<const StageRecord>, const Permutation& t) {
         return static_cast<std::uint8_t>(t(0) & 1u);
       }},
      // Echoes one tape bit per stage as a full byte (0x00 or 0xff), xored
      // with the parity of the previous opening, so challenges outside
      // {0, 1} and history dependence are both exercised.
      {"randomness-echo", [](std::size_t k) { return k; },
       [](const DcmInstance&, RandomTape& r, std::span<const StageRecord> history, const Permutation&) {
         bool bit = r.bit(history.size());
         if (!history.empty()) bit ^= (history.back().g(0) & 1u) != 0;
         return static_cast<std::uint8_t>(bit ? 0xff : 0x00);
       }},
  };
}

inline VerifierStrategy find_adversary(const std::string& name) {
  for (auto& s : adversary_zoo())
    if (s.name == name) return s;
  throw ParseError("unknown adversary '" + name + "'");
}

// Source of challenge bytes for a DcmVerifier.
class ChallengePolicy {
 public:
  virtual ~ChallengePolicy() = default;
  virtual std::uint8_t challenge(std::size_t index, std::span<const StageRecord> history, const Permutation& t) = 0;
  // Random bits scanned so far, in reading order.
  virtual Bits consumed() = 0;
};

// The prescribed verifier: one fair bit per atomic execution, execution i
// reading verifier stream i.
class HonestChallenges final : public ChallengePolicy {
 public:
  explicit HonestChallenges(RandomStreams& streams) : streams_(&streams) {}
  std::uint8_t challenge(std::size_t index, std::span<const StageRecord>, const Permutation&) override {
    used_ = std::max(used_, index + 1);
    return static_cast<std::uint8_t>(streams_->stream(index).bits(1));
  }
  Bits consumed() override { return streams_->consumed_prefix(used_); }

 private:
  RandomStreams* streams_;
  std::size_t used_ = 0;
};

class StrategyChallenges final : public ChallengePolicy {
 public:
  StrategyChallenges(const DcmInstance& inst, VerifierStrategy strategy, RandomTape tape)
      : inst_(&inst), strategy_(std::move(strategy)), tape_(std::move(tape)) {}
  std::uint8_t challenge(std::size_t, std::span<const StageRecord> history, const Permutation& t) override {
    return strategy_.challenge(*inst_, tape_, history, t);
  }
  Bits consumed() override { return tape_.used_prefix(); }

 private:
  const DcmInstance* inst_;
  VerifierStrategy strategy_;
  RandomTape tape_;
};

class DcmVerifier final : public Party {
 public:
  struct Options {
    // Follow the stated rule: a commitment that is not a permutation of the
    // instance degree ends that execution with output 1.
    bool malformed_commit_accepts = true;
  };

  DcmVerifier(const PreparedInstance& p, ChallengePolicy& policy, SessionMode mode)
      : DcmVerifier(p, policy, mode, Options{}) {}
  DcmVerifier(const PreparedInstance& p, ChallengePolicy& policy, SessionMode mode, Options options)
      : p_(&p), policy_(&policy), mode_(mode), options_(options) {
    if (mode.k == 0) throw PreconditionError("repetition count must be at least 1");
    transcript_.instance_digest = instance_digest(p.instance());
    transcript_.mode = mode.label();
  }

  std::vector<Bytes> on_frame(const Frame& frame) override {
    if (finished_) throw ProtocolViolation("verifier: message after the session ended");
    transcript_.entries.push_back({'P', frame.body, frame.oversize});
    const Message m = decode(frame);
    if (awaiting_response_) {
      view_messages_.push_back(m);
      return reply(finish_execution(check_response(m)));
    }
    if (std::holds_alternative<Commit>(m) || std::holds_alternative<Malformed>(m)) {
      view_messages_.push_back(m);
      return reply(handle_commit(m));
    }
    // Anything else where a commitment belongs rejects the session.
    view_messages_.push_back(m);
    accepted_ = false;
    execution_ = mode_.executions() - 1;
    return reply(finish_execution(false));
  }

  bool finished() const override { return finished_; }
  bool accepted() const { return accepted_; }

  Transcript transcript() const {
    Transcript t = transcript_;
    if (finished_) t.verdict = accepted_;
    return t;
  }

  View view() const { return View{policy_->consumed(), view_messages_}; }

 private:
  std::vector<Bytes> reply(const Message& m) {
    Bytes body = encode_body(m);
    transcript_.entries.push_back({'V', body, false});
    return {std::move(body)};
  }

  Message handle_commit(const Message& m) {
    const auto* c = std::get_if<Commit>(&m);
    const std::size_t slots = mode_.slots();
    if (!c || c->t.size() != slots) return finish_execution(options_.malformed_commit_accepts);
    live_.assign(slots, false);
    bool any_live = false;
    for (std::size_t i = 0; i < slots; ++i) any_live |= live_[i] = commit_well_formed(*p_, c->t[i]);
    if (!any_live) return finish_execution(options_.malformed_commit_accepts);
    commits_ = c->t;
    Challenge ch;
    for (std::size_t i = 0; i < slots; ++i) {
      const std::size_t index = mode_.composition == Composition::parallel ? i : execution_;
      ch.b.push_back(live_[i] ? policy_->challenge(index, history_, commits_[i]) : std::uint8_t{0});
    }
    challenges_ = ch.b;
    awaiting_response_ = true;
    return ch;
  }

  bool check_response(const Message& m) {
    awaiting_response_ = false;
    const auto* r = std::get_if<Response>(&m);
    if (!r || r->xy.size() != commits_.size()) return false;
    bool ok = true;
    for (std::size_t i = 0; i < commits_.size(); ++i) {
      if (!live_[i]) {
        ok = ok && options_.malformed_commit_accepts;
        continue;
      }
      const auto& [x, y] = r->xy[i];
      ok = ok && verifier_check(*p_, commits_[i], challenges_[i], x, y);
    }
    if (mode_.composition != Composition::parallel) history_.push_back({commits_[0], r->xy[0].first, r->xy[0].second});
    return ok;
  }

  // Verdict frames carry the running AND, so the last one is the output.
  Message finish_execution(bool ok) {
    accepted_ = accepted_ && ok;
    if (++execution_ >= mode_.executions()) finished_ = true;
    return Verdict{accepted_};
  }

  const PreparedInstance* p_;
  ChallengePolicy* policy_;
  SessionMode mode_;
  Options options_;
  Transcript transcript_;
  std::vector<Message> view_messages_;
  std::vector<StageRecord> history_;
  std::vector<Permutation> commits_;
  std::vector<std::uint8_t> challenges_;
  std::vector<bool> live_;
  std::size_t execution_ = 0;
  bool awaiting_response_ = false;
  bool accepted_ = true;
  bool finished_ = false;
};

// --- sessions ------------------------------------------------------------

struct SessionResult {
  Transcript transcript;
  View view;
  bool accepted = false;
};

struct VerifierSetup {
  const VerifierStrategy* adversary = nullptr;  // null: prescribed verifier
  DcmVerifier::Options options{};
};

// Runs a session with the parties' randomness drawn from the given streams.
inline SessionResult run_dcm_session(const PreparedInstance& p, ProverStrategy& prover, SessionMode mode,
                                     RandomStreams& prover_streams, RandomStreams& verifier_streams,
                                     Transport transport = Transport::lockstep, const VerifierSetup& setup = {}) {
  if (setup.adversary && mode.composition == Composition::parallel)
    throw PreconditionError("strategy verifiers are only defined for sequential sessions");
  std::unique_ptr<ChallengePolicy> policy;
  if (setup.adversary) {
    RandomTape tape(verifier_streams.stream(0), setup.adversary->randomness_bound(mode.k));
    policy = std::make_unique<StrategyChallenges>(p.instance(), *setup.adversary, std::move(tape));
  } else {
    policy = std::make_unique<HonestChallenges>(verifier_streams);
  }
  DcmProver prover_party(prover, mode, prover_streams);
  DcmVerifier verifier_party(p, *policy, mode, setup.options);
  run_parties(prover_party, verifier_party, transport);
  return {verifier_party.transcript(), verifier_party.view(), verifier_party.accepted()};
}

inline SessionResult run_dcm_session(const PreparedInstance& p, ProverStrategy& prover, SessionMode mode,
                                     const SessionSeeds& seeds, Transport transport = Transport::lockstep,
                                     const VerifierSetup& setup = {}) {
  SeededStreams prover_streams(seeds.prover);
  SeededStreams verifier_streams(seeds.verifier);
  auto result = run_dcm_session(p, prover, mode, prover_streams, verifier_streams, transport, setup);
  result.transcript.verifier_seed = seeds.verifier;
  result.transcript.prover_seed = seeds.prover;
  return result;
}

inline SessionResult run_atomic(const PreparedInstance& p, ProverStrategy& prover, const SessionSeeds& seeds,
                                Transport transport = Transport::lockstep) {
  return run_dcm_session(p, prover, SessionMode::atomic(), seeds, transport);
}

inline SessionResult run_sequential(const PreparedInstance& p, ProverStrategy& prover, std::size_t k,
                                    const SessionSeeds& seeds, Transport transport = Transport::lockstep,
                                    const VerifierSetup& setup = {}) {
  if (k == 0) throw PreconditionError("k must be at least 1");
  return run_dcm_session(p, prover, SessionMode::sequential(k), seeds, transport, setup);
}

inline SessionResult run_parallel(const PreparedInstance& p, ProverStrategy& prover, std::size_t k,
                                  const SessionSeeds& seeds, Transport transport = Transport::lockstep) {
  if (k == 0) throw PreconditionError("k must be at least 1");
  return run_dcm_session(p, prover, SessionMode::parallel(k), seeds, transport);
}

// Public-coin check: the verifier's challenges, read as bits, are exactly a
// prefix of its random string.
inline bool public_coin_holds(const Transcript& t, const Bits& verifier_randomness) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    if (t.entries[i].from != 'V') continue;
    const Message m = t.message(i);
    const auto* c = std::get_if<Challenge>(&m);
    if (!c) continue;
    for (auto b : c->b) {
      if (b > 1 || pos >= verifier_randomness.size() || verifier_randomness[pos] != (b == 1)) return false;
      ++pos;
    }
  }
  return true;
}

// On a NO instance no t lies in both GH and GsH, so no commitment can be
// opened on both challenge branches. Exhaustive over G x H.
inline bool challenge_branches_disjoint(const PreparedInstance& p, std::size_t cap = kDefaultCap) {
  const auto gs = p.g().enumerate(cap);
  const auto hs = p.h().enumerate(cap);
  if (gs.size() * hs.size() > cap) throw OrderExceedsCap(BigInt(gs.size()) * hs.size(), cap);
  std::unordered_set<Permutation, PermutationHash> plain;
  for (const auto& g : gs)
    for (const auto& h : hs) plain.insert(g * h);
  for (const auto& g : gs) {
    const Permutation gs_ = g * p.s();
    for (const auto& h : hs)
      if (plain.count(gs_ * h)) return false;
  }
  return true;
}

}  // namespace dcmzk
