#include <gtest/gtest.h>

#include <map>
#include <random>

#include "dcmzk/dcmzk.hpp"
#include "dcmzk/enumerate.hpp"
#include "oracles.hpp"

using namespace dcmzk;
using oracle::cyc;
using oracle::img;

namespace {

Bsgs bsgs_of(std::size_t degree, std::vector<Permutation> gens) {
  return schreier_sims(GeneratorSet(degree, std::move(gens)));
}

}  // namespace

TEST(Compose, IdentityAndInverse) {
  const auto p = img({2, 0, 3, 1});
  EXPECT_EQ(compose(Permutation::identity(4), p), p);
  EXPECT_EQ(compose(p, inverse(p)), Permutation::identity(4));
}

TEST(Compose, RightFactorActsFirst) {
  const auto p = cyc(3, {{0, 1}});
  const auto q = cyc(3, {{1, 2}});
  const auto expected = oracle::apply_product(p.images(), q.images());
  EXPECT_EQ(compose(p, q).images(), expected);
  EXPECT_EQ(compose(p, q), img({1, 2, 0}));
}

TEST(Compose, DegreeMismatchThrows) {
  EXPECT_THROW(compose(Permutation::identity(2), Permutation::identity(3)), DegreeMismatch);
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(Permutation::identity(5)), Permutation::identity(5));
  EXPECT_EQ(inverse(cyc(2, {{0, 1}})), cyc(2, {{0, 1}}));
  EXPECT_EQ(inverse(img({1, 2, 0})).images(), oracle::invert({1, 2, 0}));
  EXPECT_EQ(inverse(img({1, 2, 0})), img({2, 0, 1}));
}

TEST(Permutation, RejectsNonBijections) {
  EXPECT_THROW(img({0, 0, 1}), PreconditionError);
  EXPECT_THROW(img({}), PreconditionError);
  EXPECT_THROW(img({0, 3}), PreconditionError);
}

TEST(Permutation, AlgebraLawsOnSamples) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = oracle::random_permutation(rng, 7);
    const auto b = oracle::random_permutation(rng, 7);
    const auto c = oracle::random_permutation(rng, 7);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * Permutation::identity(7), a);
    EXPECT_EQ(Permutation::identity(7) * a, a);
    EXPECT_TRUE((a * a.inverse()).is_identity());
    EXPECT_TRUE((a.inverse() * a).is_identity());
  }
}

TEST(SchreierSims, Orders) {
  EXPECT_EQ(bsgs_of(4, {}).order(), 1);
  const std::vector<Permutation> s4{cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})};
  EXPECT_EQ(oracle::closure(4, s4).size(), 24u);
  EXPECT_EQ(bsgs_of(4, s4).order(), 24);
  const std::vector<Permutation> klein{cyc(4, {{0, 1}, {2, 3}}), cyc(4, {{0, 2}, {1, 3}})};
  EXPECT_EQ(oracle::closure(4, klein).size(), 4u);
  EXPECT_EQ(bsgs_of(4, klein).order(), 4);
}

TEST(SchreierSims, DeterministicForEqualInput) {
  const std::vector<Permutation> gens{cyc(6, {{0, 3, 5}}), cyc(6, {{1, 2}, {4, 5}})};
  const auto a = bsgs_of(6, gens);
  const auto b = bsgs_of(6, gens);
  EXPECT_EQ(a.base(), b.base());
  EXPECT_EQ(a.strong_generators(), b.strong_generators());
  EXPECT_EQ(a.enumerate(1000), b.enumerate(1000));
}

TEST(Contains, Examples) {
  const auto klein = bsgs_of(4, {cyc(4, {{0, 1}, {2, 3}}), cyc(4, {{0, 2}, {1, 3}})});
  EXPECT_TRUE(klein.contains(Permutation::identity(4)));
  EXPECT_FALSE(klein.contains(cyc(4, {{0, 1}})));
  const auto s4 = bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})});
  for (const auto& p : oracle::all_permutations(4)) EXPECT_TRUE(s4.contains(Permutation(p)));
  EXPECT_THROW(s4.contains(Permutation::identity(3)), DegreeMismatch);
}

// Random generator sets with closure up to 5040: order and membership
// against the brute-force closure.
TEST(SchreierSims, AgreesWithClosure) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 60; ++trial) {
    const std::size_t degree = 3 + trial % 5;  // 3..7
    const auto gens = trial % 3 == 0 ? oracle::random_generators(rng, degree, 1 + trial % 2)
                                     : oracle::random_small_generators(rng, degree);
    const auto closure = oracle::closure(degree, gens.generators());
    if (closure.size() > 5040) continue;
    ++checked;
    const auto bsgs = schreier_sims(gens);
    ASSERT_EQ(bsgs.order(), closure.size());
    if (degree <= 5) {
      for (const auto& p : oracle::all_permutations(degree))
        ASSERT_EQ(bsgs.contains(Permutation(p)), closure.count(p) == 1);
    } else {
      for (int i = 0; i < 300; ++i) {
        const auto p = oracle::random_permutation(rng, degree);
        ASSERT_EQ(bsgs.contains(p), closure.count(p.images()) == 1);
      }
      for (const auto& p : closure) ASSERT_TRUE(bsgs.contains(Permutation(p)));
    }
  }
  EXPECT_GE(checked, 50);
}

TEST(SchreierSims, StructuralInvariants) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto gens = oracle::random_generators(rng, 4 + trial % 4, 2);
    const auto bsgs = schreier_sims(gens);
    BigInt product = 1;
    for (const auto& level : bsgs.levels()) {
      product *= level.orbit.size();
      ASSERT_EQ(level.orbit.size(), level.representatives.size());
      for (std::size_t i = 0; i < level.orbit.size(); ++i)
        ASSERT_EQ(level.representatives[i](level.base), level.orbit[i]);
    }
    ASSERT_EQ(product, bsgs.order());
    const auto base = bsgs.base();
    for (const auto& s : bsgs.strong_generators()) {
      auto [residue, level] = bsgs.sift(s);
      ASSERT_EQ(level, bsgs.levels().size());
      ASSERT_TRUE(residue.is_identity());
      // Assigned level: first base point it moves; all earlier ones fixed.
      std::size_t assigned = 0;
      while (assigned < base.size() && s(base[assigned]) == base[assigned]) ++assigned;
      ASSERT_LT(assigned, base.size()) << "a strong generator fixes the whole base";
      // It belongs to the stabilizer chain from that level on.
      const auto* rep = bsgs.levels()[assigned].representative_for(s(base[assigned]));
      ASSERT_NE(rep, nullptr);
    }
    for (const auto& g : gens.generators()) ASSERT_TRUE(bsgs.contains(g));
  }
}

TEST(UniformSample, TrivialGroupGivesIdentity) {
  const auto trivial = bsgs_of(5, {});
  SeededStreams streams(derive_seed(1, "t"));
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(trivial.uniform_sample(streams.stream(0)).is_identity());
}

TEST(UniformSample, OrderTwoIsExactlyHalf) {
  const auto g = bsgs_of(3, {cyc(3, {{0, 2}})});
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedSource rng(script, EnumeratedSource::Mode::bits);
    return to_string(g.uniform_sample(rng));
  });
  ASSERT_EQ(dist.size(), 2u);
  for (const auto& [_, p] : dist.outcomes()) EXPECT_EQ(p, Rational(1, 2));
}

// Every group element of order <= 64 comes from exactly one tuple of
// transversal indices.
TEST(UniformSample, RepresentativeTuplesAreBijective) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 30; ++trial) {
    const auto gens = oracle::random_small_generators(rng, 4 + trial % 3);
    const auto bsgs = schreier_sims(gens);
    if (bsgs.order() > 64) continue;
    ++checked;
    std::map<Permutation, int> hits;
    std::vector<std::size_t> idx(bsgs.levels().size(), 0);
    for (;;) {
      ++hits[bsgs.element_at(idx)];
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == bsgs.levels()[i].orbit.size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
    ASSERT_EQ(hits.size(), bsgs.order());
    for (const auto& [p, n] : hits) {
      ASSERT_EQ(n, 1);
      ASSERT_TRUE(oracle::closure(p.degree(), gens.generators()).count(p.images()));
    }
  }
}

TEST(UniformSample, ExactDistributionIsUniform) {
  const auto s4 = bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})});
  const auto dist = enumerate_outcomes([&](ChoiceScript& script) {
    EnumeratedSource rng(script, EnumeratedSource::Mode::indices);
    return to_string(s4.uniform_sample(rng));
  });
  ASSERT_EQ(dist.size(), 24u);
  for (const auto& [_, p] : dist.outcomes()) EXPECT_EQ(p, Rational(1, 24));
}

TEST(UniformSample, ChiSquareOnS4) {
  const auto s4 = bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})});
  SeededStreams streams(derive_seed(424242, "chi"));
  EmpiricalSample sample;
  for (int i = 0; i < 100000; ++i) sample.add(to_string(s4.uniform_sample(streams.stream(0))));
  const auto r = chi_square_uniform(sample, 24, 0.001);
  EXPECT_FALSE(r.rejected) << "statistic " << r.statistic << " critical " << r.critical;
}

TEST(Enumerate, Examples) {
  EXPECT_EQ(bsgs_of(3, {}).enumerate(10), std::vector<Permutation>{Permutation::identity(3)});
  const std::vector<Permutation> two{Permutation::identity(2), cyc(2, {{0, 1}})};
  EXPECT_EQ(bsgs_of(2, {cyc(2, {{0, 1}})}).enumerate(10), two);
  try {
    bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})}).enumerate(10);
    FAIL() << "expected OrderExceedsCap";
  } catch (const OrderExceedsCap& e) {
    EXPECT_EQ(e.order(), 24);
    EXPECT_EQ(e.cap(), 10u);
  }
}

TEST(Enumerate, StrictlyIncreasingAndMatchesClosure) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto gens = oracle::random_generators(rng, 5, 1 + trial % 2);
    const auto elems = schreier_sims(gens).enumerate(200);
    for (std::size_t i = 1; i < elems.size(); ++i) ASSERT_LT(elems[i - 1], elems[i]);
    const auto closure = oracle::closure(5, gens.generators());
    ASSERT_EQ(elems.size(), closure.size());
    std::size_t i = 0;
    for (const auto& c : closure) ASSERT_EQ(elems[i++].images(), c);
  }
}

TEST(Intersect, Examples) {
  const auto s4 = bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2, 3}})});
  EXPECT_EQ(schreier_sims(intersect_bruteforce(s4, s4, 100)).order(), 24);

  const auto a = bsgs_of(3, {cyc(3, {{0, 1}})});
  const auto b = bsgs_of(3, {cyc(3, {{1, 2}})});
  EXPECT_EQ(schreier_sims(intersect_bruteforce(a, b, 100)).order(), 1);

  const auto left = bsgs_of(4, {cyc(4, {{0, 1}}), cyc(4, {{0, 1, 2}})});
  const auto right = bsgs_of(4, {cyc(4, {{1, 2}}), cyc(4, {{1, 2, 3}})});
  const auto both = schreier_sims(intersect_bruteforce(left, right, 100));
  EXPECT_EQ(both.order(), 2);
  EXPECT_TRUE(both.contains(cyc(4, {{1, 2}})));
  EXPECT_THROW(intersect_bruteforce(s4, s4, 10), OrderExceedsCap);
}

TEST(GroupText, RoundTrip) {
  const auto text = "degree 4\n(1 2)\n2 3 4 1\n";
  const auto g = parse_group(text);
  EXPECT_EQ(g.degree(), 4u);
  ASSERT_EQ(g.generators().size(), 2u);
  EXPECT_EQ(g.generators()[0], cyc(4, {{0, 1}}));
  EXPECT_EQ(g.generators()[1], img({1, 2, 3, 0}));
  EXPECT_EQ(parse_group(format_group(g)), g);
  EXPECT_THROW(parse_group("4\n1 2 3 4\n"), ParseError);
  EXPECT_THROW(parse_group("degree 3\n1 1 2\n"), ParseError);
}

TEST(PermutationText, ParsesBothForms) {
  EXPECT_EQ(parse_permutation("1 2 3"), Permutation::identity(3));
  EXPECT_EQ(parse_permutation("(1 3)", 3), cyc(3, {{0, 2}}));
  EXPECT_EQ(parse_permutation(to_string(img({2, 0, 1}))), img({2, 0, 1}));
  EXPECT_THROW(parse_permutation("1 2 2"), ParseError);
  EXPECT_THROW(parse_permutation("(1 4)", 3), ParseError);
  EXPECT_THROW(parse_permutation("1 2", 3), ParseError);
}
