#pragma once

// Exact view distributions.
//
// Interactions are enumerated by replaying the real party code with every
// coin supplied by a ChoiceScript. The black-box simulator has unbounded
// restart loops, so its distribution is computed in closed form: with the
// tape r fixed, a stage's output is uniform over the accepted attempts,
// which is what the geometric restart series sums to.

#include <cstdint>
#include <string>
#include <vector>

#include "dcmzk/dcm.hpp"
#include "dcmzk/dcnm.hpp"
#include "dcmzk/enumerate.hpp"
#include "dcmzk/protocol.hpp"
#include "dcmzk/simulator.hpp"
#include "dcmzk/stats.hpp"

namespace dcmzk {

inline constexpr std::uint64_t kMaxExactStates = 1'000'000;

inline void check_state_space(const PreparedInstance& p, std::size_t k) {
  const BigInt per_stage = BigInt(2) * p.g().order() * p.h().order();
  BigInt total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= per_stage;
    if (total > kMaxExactStates)
      throw StateSpaceTooLarge("(2|G||H|)^k exceeds " + std::to_string(kMaxExactStates) + " states");
  }
}

// View distribution of prover vs. verifier. `adversary` null means the
// prescribed verifier.
inline ExactDistribution exact_interaction_distribution(const PreparedInstance& p, ProverStrategy& prover,
                                                        SessionMode mode, const VerifierStrategy* adversary = nullptr) {
  check_state_space(p, mode.k);
  VerifierSetup setup;
  setup.adversary = adversary;
  return enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedStreams prover_streams(script, EnumeratedSource::Mode::indices);
    EnumeratedStreams verifier_streams(script, EnumeratedSource::Mode::indices);
    return run_dcm_session(p, prover, mode, prover_streams, verifier_streams, Transport::lockstep, setup)
        .view.canonical();
  });
}

inline ExactDistribution exact_honest_simulator_distribution(const PreparedInstance& p, SessionMode mode,
                                                             std::size_t cap = kDefaultCap) {
  check_state_space(p, mode.k);
  require_yes(p, cap);
  return enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedSource rng(script, EnumeratedSource::Mode::indices);
    return simulate_honest(p, mode, rng, cap).canonical();
  });
}

namespace detail {

struct SimulatorWalk {
  const PreparedInstance& p;
  const VerifierStrategy& vstar;
  const std::vector<Permutation>& gs;
  const std::vector<Permutation>& hs;
  std::size_t k;
  ExactDistribution& out;

  void stage(RandomTape& tape, std::vector<StageRecord>& history, std::vector<Message>& messages,
             const Rational& weight) {
    if (history.size() == k) {
      out.add(View{tape.used_prefix(), messages}.canonical(), weight);
      return;
    }
    const std::size_t used_before = tape.used();
    struct Accepted {
      StageRecord record;
      std::size_t used;
    };
    std::vector<Accepted> accepted;
    for (int a = 0; a < 2; ++a)
      for (const auto& g : gs)
        for (const auto& h : hs) {
          Permutation t = a ? g * h : g * p.s() * h;
          tape.set_used(used_before);
          const std::uint8_t b = vstar.challenge(p.instance(), tape, history, t);
          if ((b == 0) == (a == 0)) accepted.push_back({{std::move(t), g, h}, tape.used()});
        }
    if (accepted.empty()) throw Error("no simulator attempt is ever accepted");
    const Rational each = weight / Rational(static_cast<long long>(accepted.size()));
    for (auto& acc : accepted) {
      tape.set_used(acc.used);
      messages.emplace_back(Commit{{acc.record.t}});
      messages.emplace_back(Response{{{acc.record.g, acc.record.h}}});
      history.push_back(acc.record);
      stage(tape, history, messages, each);
      history.pop_back();
      messages.pop_back();
      messages.pop_back();
    }
    tape.set_used(used_before);
  }
};

}  // namespace detail

// Output distribution of simulate_sequential, restart cap taken as infinite.
inline ExactDistribution exact_sequential_simulator_distribution(const PreparedInstance& p,
                                                                 const VerifierStrategy& vstar, std::size_t k,
                                                                 std::size_t cap = kDefaultCap) {
  check_state_space(p, k);
  require_yes(p, cap);
  const std::size_t bound = vstar.randomness_bound(k);
  if (bound > 20) throw StateSpaceTooLarge("verifier tape too long to enumerate");
  const auto gs = p.g().enumerate(cap);
  const auto hs = p.h().enumerate(cap);
  ExactDistribution out;
  detail::SimulatorWalk walk{p, vstar, gs, hs, k, out};
  const Rational tape_weight = Rational(1) / Rational(BigInt(1) << bound);
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << bound); ++r) {
    Bits bits(bound);
    for (std::size_t i = 0; i < bound; ++i) bits[i] = (r >> (bound - 1 - i)) & 1u;
    RandomTape tape(std::move(bits));
    std::vector<StageRecord> history;
    std::vector<Message> messages;
    walk.stage(tape, history, messages, tape_weight);
  }
  return out;
}

// DCNM interaction with the honest prover, enumerated bit by bit so the
// scanned prefix is the real one. Rejection loops can be unbounded; mass
// beyond the depth limit lands on kTruncatedOutcome.
inline ExactDistribution exact_dcnm_interaction_distribution(const PreparedInstance& p, std::size_t k = 1,
                                                             const EnumerationLimits& limits = {},
                                                             std::size_t cap = kDefaultCap) {
  const auto rule = honest_dcnm_rule(p, cap);
  return enumerate_outcomes(
      [&](ChoiceScript& script) {
        EnumeratedStreams streams(script, EnumeratedSource::Mode::bits);
        return run_dcnm_session(p, rule, k, streams).view.canonical();
      },
      limits);
}

inline ExactDistribution exact_dcnm_simulator_distribution(const PreparedInstance& p, std::size_t k = 1,
                                                           const EnumerationLimits& limits = {},
                                                           std::size_t cap = kDefaultCap) {
  if (dcm_decide(p, cap)) throw RequiresNoInstance();
  return enumerate_outcomes(
      [&](ChoiceScript& script) {
        EnumeratedStreams streams(script, EnumeratedSource::Mode::bits);
        return simulate_dcnm_honest(p, streams, k, cap).canonical();
      },
      limits);
}

// Exact probability that the verifier accepts against `rule` over k
// repetitions.
inline Rational exact_dcnm_acceptance(const PreparedInstance& p, const DcnmAnswerRule& rule, std::size_t k = 1) {
  check_state_space(p, k);
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedStreams streams(script, EnumeratedSource::Mode::indices);
    return std::string(run_dcnm_session(p, rule, k, streams).accepted ? "1" : "0");
  });
  return dist.probability("1");
}

// Exact acceptance probability of a DCM session over all coins.
inline Rational exact_dcm_acceptance(const PreparedInstance& p, ProverStrategy& prover, SessionMode mode) {
  check_state_space(p, mode.k);
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedStreams prover_streams(script, EnumeratedSource::Mode::indices);
    EnumeratedStreams verifier_streams(script, EnumeratedSource::Mode::indices);
    return std::string(run_dcm_session(p, prover, mode, prover_streams, verifier_streams).accepted ? "1" : "0");
  });
  return dist.probability("1");
}

}  // namespace dcmzk
