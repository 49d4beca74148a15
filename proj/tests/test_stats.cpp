#include <gtest/gtest.h>

#include <random>

#include "dcmzk/dcmzk.hpp"
#include "oracles.hpp"

using namespace dcmzk;
using oracle::cyc;
using oracle::img;

namespace {

ExactDistribution random_distribution(std::mt19937_64& rng, int support) {
  std::vector<std::uint64_t> w;
  std::uint64_t sum = 0;
  for (int i = 0; i < support; ++i) {
    w.push_back(rng() % 7);
    sum += w.back();
  }
  ExactDistribution d;
  if (sum == 0) {
    d.add("x0", 1);
    return d;
  }
  for (int i = 0; i < support; ++i) d.add("x" + std::to_string(i), Rational(w[i], sum));
  return d;
}

PreparedInstance yes_instance() {
  return oracle::prepare(3, cyc(3, {{0, 1}}) * cyc(3, {{1, 2}}), {cyc(3, {{0, 1}})}, {cyc(3, {{1, 2}})});
}

PreparedInstance no_instance() { return oracle::prepare(3, img({2, 1, 0}), {cyc(3, {{0, 1}})}, {cyc(3, {{1, 2}})}); }

}  // namespace

TEST(TvDistance, Examples) {
  ExactDistribution uniform, point, other;
  uniform.add("a", Rational(1, 2));
  uniform.add("b", Rational(1, 2));
  point.add("a", 1);
  other.add("c", 1);
  EXPECT_EQ(tv_distance(uniform, uniform), 0);
  EXPECT_EQ(tv_distance(point, other), 1);
  EXPECT_EQ(tv_distance(uniform, point), Rational(1, 2));
  EXPECT_EQ(uniform.total(), 1);
}

TEST(TvDistance, MetricOnRandomTriples) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto p = random_distribution(rng, 5);
    const auto q = random_distribution(rng, 5);
    const auto r = random_distribution(rng, 5);
    ASSERT_EQ(p.total(), 1);
    ASSERT_EQ(tv_distance(p, q), tv_distance(q, p));
    ASSERT_LE(tv_distance(p, r), tv_distance(p, q) + tv_distance(q, r));
    ASSERT_EQ(tv_distance(p, q) == 0, p == q);
    ASSERT_GE(tv_distance(p, q), 0);
    ASSERT_LE(tv_distance(p, q), 1);
  }
}

TEST(TvDistance, ExactNotFloating) {
  ExactDistribution p, q;
  p.add("a", Rational(1, 3));
  p.add("b", Rational(2, 3));
  q.add("a", Rational(1, 3) + Rational(1, BigInt(1) << 200));
  q.add("b", Rational(2, 3) - Rational(1, BigInt(1) << 200));
  EXPECT_NE(tv_distance(p, q), 0);
  EXPECT_EQ(tv_distance(p, q), Rational(1, BigInt(1) << 200));
}

TEST(ChiSquare, Examples) {
  EmpiricalSample balanced;
  for (int i = 0; i < 24; ++i) balanced.add("c" + std::to_string(i), 100);
  const auto r = chi_square_uniform(balanced, 24);
  EXPECT_EQ(r.statistic, 0);
  EXPECT_FALSE(r.rejected);
  EXPECT_EQ(r.degrees_of_freedom, 23u);

  EmpiricalSample spike;
  spike.add("c0", 100000);
  EXPECT_TRUE(chi_square_uniform(spike, 24, 0.05).rejected);
  EXPECT_TRUE(chi_square_uniform(spike, 24, 1e-9).rejected);

  EmpiricalSample tiny;
  tiny.add("c0", 10);
  EXPECT_THROW(chi_square_uniform(tiny, 24), PreconditionError);
}

TEST(ChiSquare, CriticalValueMatchesTable) {
  EmpiricalSample s;
  for (int i = 0; i < 24; ++i) s.add(std::to_string(i), 10);
  // chi-square(23) upper 0.001 quantile is 49.728.
  EXPECT_NEAR(chi_square_uniform(s, 24, 0.001).critical, 49.728, 1e-3);
  // chi-square(1) upper 0.05 quantile is 3.841.
  EmpiricalSample two;
  two.add("a", 10);
  two.add("b", 10);
  EXPECT_NEAR(chi_square_uniform(two, 2, 0.05).critical, 3.841, 1e-3);
}

TEST(ChiSquare, UniformSampleOnS4) {
  const GeneratorSet s4(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})});
  const auto g = schreier_sims(s4);
  ChaChaSource rng(derive_seed(2, "stats"), 0);
  EmpiricalSample sample;
  for (int i = 0; i < 100000; ++i) sample.add(to_string(g.uniform_sample(rng)));
  EXPECT_EQ(sample.counts.size(), 24u);
  EXPECT_FALSE(chi_square_uniform(sample, 24, 0.001).rejected);
}

TEST(AcceptanceRate, HonestIsCertain) {
  const auto p = yes_instance();
  HonestProver prover(p, make_witness(p));
  const auto r = acceptance_rate(
      [&](std::uint64_t i) { return run_atomic(p, prover, SessionSeeds::for_trial(20, i)).accepted; }, 1000);
  EXPECT_EQ(r.rate, 1.0);
  EXPECT_EQ(r.half_width, 0.0);
  EXPECT_THROW(acceptance_rate([](std::uint64_t) { return true; }, 0), PreconditionError);
}

TEST(AcceptanceRate, AtomicCheaterNearHalf) {
  const auto p = no_instance();
  OptimalCheatingProver cheater(p);
  const auto r = acceptance_rate(
      [&](std::uint64_t i) { return run_atomic(p, cheater, SessionSeeds::for_trial(21, i)).accepted; }, 10000);
  EXPECT_NEAR(r.half_width, 0.015, 1e-3);
  EXPECT_TRUE(r.within(0.5)) << r.rate;
}

TEST(AcceptanceRate, SequentialCheaterAtFiveRepetitions) {
  const auto p = no_instance();
  OptimalCheatingProver cheater(p);
  const auto r = acceptance_rate(
      [&](std::uint64_t i) { return run_sequential(p, cheater, 5, SessionSeeds::for_trial(22, i)).accepted; },
      100000);
  EXPECT_TRUE(r.within(1.0 / 32)) << r.rate;
}

TEST(Consistency, EmpiricalWithinFiveSigma) {
  const PreparedInstance p = oracle::prepare(4, cyc(4, {{0, 1}}) * cyc(4, {{2, 3}}),
                                             {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2}})}, {cyc(4, {{3, 2}})});
  const auto exact = exact_honest_simulator_distribution(p, SessionMode::atomic());
  SeededStreams streams(derive_seed(23, "stats"));
  EmpiricalSample sample;
  for (int i = 0; i < 100000; ++i) sample.add(simulate_atomic_honest(p, streams.stream(0)).canonical());
  EXPECT_LT(max_standardized_deviation(sample, exact), 5.0);
  EXPECT_LT(empirical_tv(sample, exact), 0.05);
}

TEST(Consistency, OutsideSupportIsInfinitelyFar) {
  ExactDistribution d;
  d.add("a", 1);
  EmpiricalSample s;
  s.add("a", 99);
  s.add("b", 1);
  EXPECT_TRUE(std::isinf(max_standardized_deviation(s, d)));
  EXPECT_NEAR(empirical_tv(s, d), 0.01, 1e-12);
}

TEST(Sample, MergeIsOrderIndependent) {
  EmpiricalSample a, b, c;
  a.add("x", 3);
  b.add("y", 2);
  b.add("x");
  c.add("z", 5);
  EmpiricalSample left = a, right = c;
  left.merge(b);
  left.merge(c);
  right.merge(b);
  right.merge(a);
  EXPECT_EQ(left.counts, right.counts);
  EXPECT_EQ(left.total, 11u);
  EXPECT_EQ(right.total, 11u);
}

TEST(Report, SummaryLine) {
  ExactDistribution p, q;
  p.add("a", Rational(1, 2));
  p.add("b", Rational(1, 2));
  q.add("a", 1);
  const auto text = distribution_report(p, &q);
  EXPECT_NE(text.find("61 1/2 1/1\n"), std::string::npos) << text;
  EXPECT_NE(text.find("62 1/2 0/1\n"), std::string::npos) << text;
  EXPECT_EQ(text.substr(text.rfind("TV=")), "TV=1/2\n");
  EXPECT_EQ(distribution_report(p).find("TV="), std::string::npos);
}
