#pragma once

// Two-round proof that s is NOT in GH, zero-knowledge for the prescribed
// verifier.
//
//   1. V: b = first bit of its random string; g in G, h in H from the
//         following bits; send t = g h (b = 0) or t = g s h (b = 1).
//   2. P: send a = 0 if t in GH, else 1.
//      V: accept iff a == b.
//
// Not public-coin: b stays hidden inside t.

#include <cstdint>
#include <functional>
#include <vector>

#include "dcmzk/dcm.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/session.hpp"
#include "dcmzk/view.hpp"
#include "dcmzk/wire.hpp"

namespace dcmzk {

struct DcnmChallenge {
  Permutation t;
  bool b = false;
  Permutation g;
  Permutation h;
};

inline DcnmChallenge dcnm_verifier_probe(const PreparedInstance& p, RandomSource& rng) {
  const bool b = rng.bit();
  Permutation g = p.g().uniform_sample(rng);
  Permutation h = p.h().uniform_sample(rng);
  Permutation t = b ? g * p.s() * h : g * h;
  return {std::move(t), b, std::move(g), std::move(h)};
}

inline std::uint8_t dcnm_prover_answer(const PreparedInstance& p, const Permutation& t, std::size_t cap = kDefaultCap) {
  return in_product(p, t, cap) ? 0 : 1;
}

inline bool dcnm_verdict(bool b, std::uint8_t a) { return a == static_cast<std::uint8_t>(b); }

// Maps a probe to an answer byte.
using DcnmAnswerRule = std::function<std::uint8_t(const Permutation&)>;

inline DcnmAnswerRule honest_dcnm_rule(const PreparedInstance& p, std::size_t cap = kDefaultCap) {
  return [&p, cap](const Permutation& t) { return dcnm_prover_answer(p, t, cap); };
}

class DcnmProver final : public Party {
 public:
  DcnmProver(DcnmAnswerRule rule, std::size_t k) : rule_(std::move(rule)), k_(k) {}

  std::vector<Bytes> on_frame(const Frame& frame) override {
    const Message m = decode(frame);
    if (const auto* v = std::get_if<Verdict>(&m)) {
      last_verdict_ = v->accept;
      if (++verdicts_ == k_) finished_ = true;
      return {};
    }
    const auto* probe = std::get_if<Probe>(&m);
    if (!probe) throw ProtocolViolation("prover: expected a probe");
    return {encode_body(Answer{rule_(probe->t)})};
  }

  bool finished() const override { return finished_; }
  bool last_verdict() const { return last_verdict_; }

 private:
  DcnmAnswerRule rule_;
  std::size_t k_;
  std::size_t verdicts_ = 0;
  bool finished_ = false;
  bool last_verdict_ = false;
};

// k repetitions in sequence; repetition i reads verifier stream i. Each
// answer is followed by a Verdict frame carrying the running AND.
class DcnmVerifier final : public Party {
 public:
  DcnmVerifier(const PreparedInstance& p, RandomStreams& streams, std::size_t k)
      : p_(&p), streams_(&streams), k_(k) {
    if (k == 0) throw PreconditionError("repetition count must be at least 1");
    transcript_.instance_digest = instance_digest(p.instance());
    transcript_.mode = k == 1 ? "atomic" : "sequential:" + std::to_string(k);
  }

  std::vector<Bytes> open() override { return {record(probe())}; }

  std::vector<Bytes> on_frame(const Frame& frame) override {
    if (finished_) throw ProtocolViolation("verifier: message after the session ended");
    transcript_.entries.push_back({'P', frame.body, frame.oversize});
    const Message m = decode(frame);
    view_messages_.push_back(m);
    const auto* answer = std::get_if<Answer>(&m);
    accepted_ = accepted_ && answer && dcnm_verdict(pending_.b, answer->a);
    std::vector<Bytes> out{record(Verdict{accepted_})};
    if (++round_ == k_ || !answer) {
      finished_ = true;
      return out;
    }
    out.push_back(record(probe()));
    return out;
  }

  bool finished() const override { return finished_; }
  bool accepted() const { return accepted_; }

  Transcript transcript() const {
    Transcript t = transcript_;
    if (finished_) t.verdict = accepted_;
    return t;
  }

  View view() const { return View{streams_->consumed_prefix(std::min(round_ + 1, k_)), view_messages_}; }

 private:
  Message probe() {
    pending_ = dcnm_verifier_probe(*p_, streams_->stream(round_));
    return Probe{pending_.t};
  }

  Bytes record(const Message& m) {
    Bytes body = encode_body(m);
    transcript_.entries.push_back({'V', body, false});
    return body;
  }

  const PreparedInstance* p_;
  RandomStreams* streams_;
  std::size_t k_;
  DcnmChallenge pending_;
  Transcript transcript_;
  std::vector<Message> view_messages_;
  std::size_t round_ = 0;
  bool accepted_ = true;
  bool finished_ = false;
};

struct DcnmSessionResult {
  Transcript transcript;
  View view;
  bool accepted = false;
};

inline DcnmSessionResult run_dcnm_session(const PreparedInstance& p, const DcnmAnswerRule& rule, std::size_t k,
                                          RandomStreams& verifier_streams, Transport transport = Transport::lockstep) {
  DcnmProver prover(rule, k);
  DcnmVerifier verifier(p, verifier_streams, k);
  run_parties(prover, verifier, transport);
  return {verifier.transcript(), verifier.view(), verifier.accepted()};
}

inline DcnmSessionResult run_dcnm_session(const PreparedInstance& p, const DcnmAnswerRule& rule, std::size_t k,
                                          const SessionSeeds& seeds, Transport transport = Transport::lockstep) {
  SeededStreams streams(seeds.verifier);
  auto result = run_dcnm_session(p, rule, k, streams, transport);
  result.transcript.verifier_seed = seeds.verifier;
  return result;
}

// Reads b, answers a = b without any membership test, then derives g, h, t
// from the remaining bits so the scanned prefix matches the verifier's.
// The view keeps r' and the answers; each probe is a function of r'.
inline View simulate_dcnm_honest(const PreparedInstance& p, RandomStreams& streams, std::size_t k = 1,
                                 std::size_t cap = kDefaultCap) {
  if (k == 0) throw PreconditionError("repetition count must be at least 1");
  if (dcm_decide(p, cap)) throw RequiresNoInstance();
  View view;
  for (std::size_t i = 0; i < k; ++i) {
    auto& rng = streams.stream(i);
    const bool b = rng.bit();
    const std::uint8_t a = b ? 1 : 0;
    (void)p.g().uniform_sample(rng);
    (void)p.h().uniform_sample(rng);
    view.prover_messages.emplace_back(Answer{a});
  }
  view.consumed_randomness = streams.consumed_prefix(k);
  return view;
}

}  // namespace dcmzk
