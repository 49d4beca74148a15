#include <gtest/gtest.h>

#include <random>

#include "dcmzk/dcmzk.hpp"
#include "oracles.hpp"

using namespace dcmzk;
using oracle::cyc;
using oracle::img;

namespace {

PreparedInstance yes_instance() {
  return oracle::prepare(3, cyc(3, {{0, 1}}) * cyc(3, {{1, 2}}), {cyc(3, {{0, 1}})}, {cyc(3, {{1, 2}})});
}

PreparedInstance no_instance() {
  return oracle::prepare(3, img({2, 1, 0}), {cyc(3, {{0, 1}})}, {cyc(3, {{1, 2}})});
}

// Sends fixed bodies regardless of what it receives.
class ScriptedProver final : public Party {
 public:
  ScriptedProver(Bytes commit, Bytes response) : commit_(std::move(commit)), response_(std::move(response)) {}
  std::vector<Bytes> open() override { return {commit_}; }
  std::vector<Bytes> on_frame(const Frame& f) override {
    const auto m = decode(f);
    if (std::holds_alternative<Verdict>(m)) {
      verdict_ = std::get<Verdict>(m).accept;
      done_ = true;
      return {};
    }
    return {response_};
  }
  bool finished() const override { return done_; }
  bool verdict_ = false;

 private:
  Bytes commit_, response_;
  bool done_ = false;
};

bool run_scripted(const PreparedInstance& p, Bytes commit, Bytes response, bool malformed_accepts = true) {
  ScriptedProver prover(std::move(commit), std::move(response));
  SeededStreams streams(derive_seed(5, "v"));
  HonestChallenges policy(streams);
  DcmVerifier verifier(p, policy, SessionMode::atomic(), DcmVerifier::Options{malformed_accepts});
  run_lockstep(prover, verifier);
  EXPECT_EQ(prover.verdict_, verifier.accepted());
  return verifier.accepted();
}

}  // namespace

TEST(Commit, TrivialGroupsCommitToS) {
  const auto s = img({2, 0, 1});
  const auto p = oracle::prepare(3, s, {}, {});
  SeededStreams streams(derive_seed(1, "p"));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(prover_commit(p, streams.stream(0)).t, s);
}

TEST(Commit, UniformOnProductSetExactly) {
  const auto p = yes_instance();
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedSource rng(script, EnumeratedSource::Mode::indices);
    const auto st = prover_commit(p, rng);
    EXPECT_EQ(st.t, st.g * p.s() * st.h);
    return to_string(st.t);
  });
  ASSERT_EQ(dist.size(), 4u);
  for (const auto& [t, pr] : dist.outcomes()) {
    EXPECT_EQ(pr, Rational(1, 4));
    EXPECT_TRUE(in_product(p, parse_permutation(t)));
  }
}

TEST(Challenge, MalformedCommitShortCircuitsToAccept) {
  const auto p = yes_instance();
  SeededStreams streams(derive_seed(1, "v"));
  const auto m = verifier_challenge(p, Commit{{Permutation::identity(4)}}, streams.stream(0));
  ASSERT_TRUE(std::holds_alternative<Verdict>(m));
  EXPECT_TRUE(std::get<Verdict>(m).accept);
  EXPECT_EQ(streams.stream(0).consumed_count(), 0u);
}

TEST(Challenge, FairBitConsumingOneBit) {
  const auto p = yes_instance();
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedSource rng(script, EnumeratedSource::Mode::bits);
    const auto m = verifier_challenge(p, Commit{{p.s()}}, rng);
    EXPECT_EQ(rng.consumed_count(), 1u);
    return describe(m);
  });
  EXPECT_EQ(dist.probability("b=0"), Rational(1, 2));
  EXPECT_EQ(dist.probability("b=1"), Rational(1, 2));
}

TEST(Respond, BranchesAndNonzeroChallenge) {
  const auto p = yes_instance();
  const auto w = make_witness(p);
  SeededStreams streams(derive_seed(2, "p"));
  for (int i = 0; i < 20; ++i) {
    const auto st = prover_commit(p, streams.stream(0));
    const auto [g, h] = prover_respond(w, st, 0);
    EXPECT_EQ(g * p.s() * h, st.t);
    EXPECT_TRUE(verifier_check(p, st.t, 0, g, h));
    const auto [g1, h1] = prover_respond(w, st, 1);
    EXPECT_EQ(g1 * h1, st.t);
    EXPECT_TRUE(verifier_check(p, st.t, 1, g1, h1));
    EXPECT_EQ(prover_respond(w, st, 255), prover_respond(w, st, 1));
    EXPECT_TRUE(verifier_check(p, st.t, 255, g1, h1));
  }
}

TEST(Check, RejectsOutsideGroups) {
  const auto p = yes_instance();
  const auto x = cyc(3, {{0, 2}});  // not in G
  const auto e = Permutation::identity(3);
  EXPECT_FALSE(verifier_check(p, x * p.s() * e, 0, x, e));
  EXPECT_FALSE(verifier_check(p, x * e, 1, x, e));
  EXPECT_FALSE(verifier_check(p, p.s(), 1, e, p.s()));  // s not in H
  EXPECT_TRUE(verifier_check(p, p.s(), 0, e, e));
  EXPECT_FALSE(verifier_check(p, e, 1, Permutation::identity(4), Permutation::identity(4)));
}

// On a NO instance no t can be opened on both branches.
TEST(Soundness, BranchDisjointnessOnNoInstances) {
  EXPECT_TRUE(challenge_branches_disjoint(no_instance()));
  EXPECT_FALSE(challenge_branches_disjoint(yes_instance()));
  std::mt19937_64 rng(4);
  int no = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 4 + trial % 3;
    const auto g = oracle::random_small_generators(rng, m);
    const auto h = oracle::random_small_generators(rng, m);
    const PreparedInstance p(DcmInstance(oracle::random_permutation(rng, m), g, h));
    if (p.g().order() * p.h().order() > 10000) continue;
    const bool yes = dcm_decide(p);
    // Oracle: t in GH and t in GsH for some t?
    const auto gc = oracle::closure(m, g.generators());
    const auto hc = oracle::closure(m, h.generators());
    const auto plain = oracle::product_table(gc, hc, nullptr);
    const auto shifted = oracle::product_table(gc, hc, &p.s().images());
    const std::set<oracle::Images> a(plain.begin(), plain.end()), b(shifted.begin(), shifted.end());
    bool overlap = false;
    for (const auto& t : b) overlap |= a.count(t) == 1;
    ASSERT_EQ(challenge_branches_disjoint(p), !overlap);
    if (!yes) {
      ++no;
      ASSERT_FALSE(overlap);
    }
  }
  EXPECT_GT(no, 20);
}

TEST(Atomic, HonestAcceptsAndIsDeterministic) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = run_atomic(p, prover, SessionSeeds::from_master(seed));
    EXPECT_TRUE(a.accepted);
    EXPECT_EQ(a.transcript.verdict, std::optional<bool>(true));
    const auto b = run_atomic(p, prover, SessionSeeds::from_master(seed));
    EXPECT_EQ(format_transcript(a.transcript), format_transcript(b.transcript));
    EXPECT_EQ(a.view, b.view);
  }
}

TEST(Atomic, CheaterWinsExactlyHalf) {
  const auto p = no_instance();
  OptimalCheatingProver cheater(p);
  EXPECT_EQ(exact_dcm_acceptance(p, cheater, SessionMode::atomic()), Rational(1, 2));
  EXPECT_THROW(OptimalCheatingProver{yes_instance()}, RequiresNoInstance);
}

TEST(Atomic, WitnessRefusalIsAResourceError) {
  const GeneratorSet s6(6, {cyc(6, {{0, 1}}), cyc(6, {{0, 1, 2, 3, 4, 5}})});
  const PreparedInstance p(DcmInstance(cyc(6, {{0, 1}}), s6, s6));
  EXPECT_THROW(make_witness(p, 100), OrderExceedsCap);
  EXPECT_THROW(make_witness(no_instance()), NotInDoubleCoset);
}

TEST(Composition, SingleRepetitionMatchesAtomic) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  const auto seeds = SessionSeeds::from_master(77);
  const auto atomic = run_atomic(p, prover, seeds);
  const auto seq = run_sequential(p, prover, 1, seeds);
  const auto par = run_parallel(p, prover, 1, seeds);
  EXPECT_EQ(atomic.transcript.entries, seq.transcript.entries);
  EXPECT_EQ(atomic.transcript.entries, par.transcript.entries);
  EXPECT_EQ(atomic.view, seq.view);
  EXPECT_EQ(atomic.view, par.view);
  EXPECT_THROW(run_sequential(p, prover, 0, seeds), PreconditionError);
  EXPECT_THROW(run_parallel(p, prover, 0, seeds), PreconditionError);
}

TEST(Composition, HonestAlwaysAcceptsAndConsumesKBits) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  for (std::size_t k = 1; k <= 8; ++k)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto seeds = SessionSeeds::for_trial(k, seed);
      const auto s = run_sequential(p, prover, k, seeds);
      const auto q = run_parallel(p, prover, k, seeds);
      ASSERT_TRUE(s.accepted);
      ASSERT_TRUE(q.accepted);
      ASSERT_EQ(s.view.consumed_randomness.size(), k);
      ASSERT_EQ(q.view.consumed_randomness.size(), k);
      ASSERT_EQ(s.view.prover_messages.size(), 2 * k);
      ASSERT_EQ(q.view.prover_messages.size(), 2u);
      ASSERT_TRUE(public_coin_holds(s.transcript, s.view.consumed_randomness));
      ASSERT_TRUE(public_coin_holds(q.transcript, q.view.consumed_randomness));
    }
}

TEST(Composition, ParallelHasThreeRounds) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  for (std::size_t k = 1; k <= 12; ++k) {
    const auto r = run_parallel(p, prover, k, SessionSeeds::from_master(k));
    EXPECT_EQ(r.transcript.round_count(), 3u);
    const auto c = std::get<Commit>(r.transcript.message(0));
    EXPECT_EQ(c.t.size(), k);
  }
  EXPECT_EQ(run_sequential(p, prover, 4, SessionSeeds::from_master(1)).transcript.round_count(), 12u);
}

TEST(Composition, CheaterExactDecay) {
  const auto p = no_instance();
  OptimalCheatingProver cheater(p);
  for (std::size_t k = 1; k <= 3; ++k) {
    const Rational expected(1, 1 << k);
    EXPECT_EQ(exact_dcm_acceptance(p, cheater, SessionMode::sequential(k)), expected);
    EXPECT_EQ(exact_dcm_acceptance(p, cheater, SessionMode::parallel(k)), expected);
  }
}

TEST(Composition, CheaterMonteCarloAtTenRepetitions) {
  const auto p = no_instance();
  OptimalCheatingProver cheater(p);
  const auto seq = acceptance_rate(
      [&](std::uint64_t i) { return run_sequential(p, cheater, 10, SessionSeeds::for_trial(10, i)).accepted; },
      100000);
  EXPECT_LE(seq.rate, 0.003);
  const auto par = acceptance_rate(
      [&](std::uint64_t i) { return run_parallel(p, cheater, 10, SessionSeeds::for_trial(11, i)).accepted; },
      100000);
  EXPECT_NEAR(par.rate, 1.0 / 1024, par.half_width_for(1.0 / 1024));
}

TEST(Malformed, WrongDegreeCommitIsAccepted) {
  const auto p = no_instance();
  const auto commit = encode_body(Commit{{Permutation::identity(4)}});
  const auto junk = encode_body(Response{{{Permutation::identity(4), Permutation::identity(4)}}});
  EXPECT_TRUE(run_scripted(p, commit, junk));
  EXPECT_FALSE(run_scripted(p, commit, junk, false));
}

TEST(Malformed, NonPermutationCommitIsAccepted) {
  const auto p = no_instance();
  const Bytes bad{1, 0, 3, 0, 0, 0, 0, 0, 1};  // images 0 0 1
  EXPECT_TRUE(std::holds_alternative<Malformed>(decode_body(bad)));
  EXPECT_TRUE(run_scripted(p, bad, {}));
}

TEST(Malformed, BadResponseIsRejected) {
  const auto p = yes_instance();
  const auto commit = encode_body(Commit{{p.s()}});
  EXPECT_FALSE(run_scripted(p, commit, Bytes{3, 0, 1}));
  EXPECT_FALSE(run_scripted(p, commit, encode_body(Verdict{true})));
  EXPECT_FALSE(run_scripted(p, commit, encode_body(Response{{{p.s(), p.s()}, {p.s(), p.s()}}})));
}

TEST(Malformed, UnexpectedOpeningMessageRejects) {
  const auto p = yes_instance();
  EXPECT_FALSE(run_scripted(p, encode_body(Answer{0}), {}));
}

TEST(Malformed, ParallelSlotWithWrongDegreeIsPassedOver) {
  const auto p = no_instance();
  // One dead slot plus one honest-looking slot the cheater can open on b != 0.
  const auto g = Permutation::identity(3);
  const auto body = encode_body(Commit{{Permutation::identity(5), g}});
  ScriptedProver prover(body, encode_body(Response{{{g, g}, {g, g}}}));
  SeededStreams streams(derive_seed(9, "v"));
  HonestChallenges policy(streams);
  DcmVerifier verifier(p, policy, SessionMode::parallel(2));
  run_lockstep(prover, verifier);
  const auto challenge = std::get<Challenge>(verifier.transcript().message(1));
  EXPECT_EQ(challenge.b[0], 0);
  EXPECT_EQ(verifier.accepted(), challenge.b[1] != 0);
}

TEST(Adversaries, ZooIsFixedAndPure) {
  const auto zoo = adversary_zoo();
  ASSERT_EQ(zoo.size(), 5u);
  const std::vector<std::string> names{"honest", "constant-0", "constant-1", "first-bit-of-t", "randomness-echo"};
  for (std::size_t i = 0; i < zoo.size(); ++i) EXPECT_EQ(zoo[i].name, names[i]);
  EXPECT_THROW(find_adversary("nobody"), ParseError);
  const auto p = yes_instance();
  std::mt19937_64 rng(1);
  for (const auto& v : zoo)
    for (int i = 0; i < 50; ++i) {
      const Bits r{static_cast<bool>(rng() & 1), static_cast<bool>(rng() & 1)};
      const auto t = oracle::random_permutation(rng, 3);
      std::vector<StageRecord> history;
      if (i % 2) history.push_back({t, t, t});
      RandomTape a(r), b(r);
      ASSERT_EQ(v.challenge(p.instance(), a, history, t), v.challenge(p.instance(), b, history, t));
      ASSERT_EQ(a.used(), b.used());
    }
}

TEST(Adversaries, HonestProverAcceptedByEveryStrategy) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  for (const auto& v : adversary_zoo()) {
    VerifierSetup setup;
    setup.adversary = &v;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      ASSERT_TRUE(run_sequential(p, prover, 3, SessionSeeds::from_master(seed), Transport::lockstep, setup).accepted)
          << v.name;
  }
}
