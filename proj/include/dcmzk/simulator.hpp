#pragma once

// Simulators: views produced without the witness.
//
// simulate_honest: against the prescribed verifier. Pick the challenge bit
// first, then a commitment that can be opened on that branch.
//
// simulate_sequential: black-box simulator for an arbitrary verifier
// strategy V* in the sequential composition. Per stage, guess a bit a,
// commit to gsh (a = 0) or gh (a = 1), ask V* for its challenge b, and keep
// the stage only if a and b are both zero or both nonzero; otherwise retry
// the stage with fresh a, g, h. Bits of V*'s tape read only by discarded
// attempts are not part of the output.

#include <cstdint>
#include <vector>

#include "dcmzk/dcm.hpp"
#include "dcmzk/protocol.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/session.hpp"
#include "dcmzk/view.hpp"

namespace dcmzk {

inline constexpr std::size_t kDefaultRestartCap = 64;

inline void require_yes(const PreparedInstance& p, std::size_t cap) {
  if (!dcm_decide(p, cap)) throw RequiresYesInstance();
}

inline View simulate_honest(const PreparedInstance& p, SessionMode mode, RandomSource& rng,
                            std::size_t cap = kDefaultCap) {
  require_yes(p, cap);
  View view;
  Commit commit;
  Response response;
  for (std::size_t i = 0; i < mode.k; ++i) {
    const bool b = rng.bit();
    Permutation g = p.g().uniform_sample(rng);
    Permutation h = p.h().uniform_sample(rng);
    Permutation t = b ? g * h : g * p.s() * h;
    view.consumed_randomness.push_back(b);
    commit.t.push_back(std::move(t));
    response.xy.emplace_back(std::move(g), std::move(h));
    if (mode.composition != Composition::parallel) {
      view.prover_messages.emplace_back(std::move(commit));
      view.prover_messages.emplace_back(std::move(response));
      commit = {};
      response = {};
    }
  }
  if (mode.composition == Composition::parallel) {
    view.prover_messages.emplace_back(std::move(commit));
    view.prover_messages.emplace_back(std::move(response));
  }
  return view;
}

inline View simulate_atomic_honest(const PreparedInstance& p, RandomSource& rng, std::size_t cap = kDefaultCap) {
  return simulate_honest(p, SessionMode::atomic(), rng, cap);
}

struct SimulatedView {
  View view;
  std::vector<std::size_t> attempts_per_stage;
  // Tape bits read by discarded attempts beyond the accepted path; not
  // part of the view.
  std::size_t discarded_reads = 0;
};

inline SimulatedView simulate_sequential(const PreparedInstance& p, const VerifierStrategy& vstar, std::size_t k,
                                         RandomSource& rng, std::size_t restart_cap = kDefaultRestartCap,
                                         std::size_t cap = kDefaultCap) {
  if (k == 0) throw PreconditionError("k must be at least 1");
  require_yes(p, cap);
  Bits r;
  for (std::size_t i = 0; i < vstar.randomness_bound(k); ++i) r.push_back(rng.bit());
  RandomTape tape(std::move(r));

  SimulatedView out;
  std::vector<StageRecord> history;
  std::size_t max_used = 0;
  for (std::size_t stage = 0; stage < k; ++stage) {
    const std::size_t used_before = tape.used();
    for (std::size_t attempt = 1;; ++attempt) {
      if (attempt > restart_cap) throw RestartCapExceeded(stage, restart_cap);
      const bool a = rng.bit();
      Permutation g = p.g().uniform_sample(rng);
      Permutation h = p.h().uniform_sample(rng);
      Permutation t = a ? g * h : g * p.s() * h;
      tape.set_used(used_before);
      const std::uint8_t b = vstar.challenge(p.instance(), tape, history, t);
      if ((b == 0) == !a) {
        out.attempts_per_stage.push_back(attempt);
        out.view.prover_messages.emplace_back(Commit{{t}});
        out.view.prover_messages.emplace_back(Response{{{g, h}}});
        history.push_back({std::move(t), std::move(g), std::move(h)});
        break;
      }
      max_used = std::max(max_used, tape.used());
    }
  }
  out.view.consumed_randomness = tape.used_prefix();
  out.discarded_reads = max_used > tape.used() ? max_used - tape.used() : 0;
  return out;
}

}  // namespace dcmzk
