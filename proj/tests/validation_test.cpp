#include <gtest/gtest.h>

#include <cmath>

#include "rr/online_engine.hpp"
#include "support.hpp"

using namespace rr;
using rr::testing::battery;
using rr::testing::law_matches;
using rr::testing::leaky_round;
using rr::testing::pow2_inv;
using rr::testing::ratio;
using rr::testing::recycling_state_samplers;

namespace {

// Largest uniform range the sampler asks for on this distribution.
uint64_t uniform_range(const std::string& id, const DiscreteDistribution& d) {
  return id == "alias" ? d.size() * d.total() : d.total();
}

bool division_fits(const std::string& id, const DiscreteDistribution& d, unsigned w) {
  return uniform_range(id, d) <= (uint64_t{1} << (w - 1));
}

}  // namespace

TEST(EnumerateLaw, SingleCoin) {
  auto law = enumerate_law([](BitSource& s) { return Outcome{int64_t(s.flip(1))}; });
  EXPECT_EQ(law.residual, 0);
  EXPECT_EQ(law.mass({0}), ratio(1, 2));
  EXPECT_EQ(law.mass({1}), ratio(1, 2));
  EXPECT_EQ(law.flip_mass, 1);
  EXPECT_EQ(law.leaves, 2u);
}

TEST(EnumerateLaw, UniformThreeAtWordSizeFour) {
  const unsigned cap = 40;
  auto law = enumerate_law([](BitSource& s) {
    UniformState st(s, 4);
    return Outcome{int64_t(uniform(st, 3))};
  }, cap);
  EXPECT_EQ(law.total(), 1);
  EXPECT_GT(law.residual, 0);
  EXPECT_LE(law.residual, pow2_inv(cap - 2));
  EXPECT_EQ(law.mass({0}), law.mass({1}));
  EXPECT_EQ(law.mass({1}), law.mass({2}));
}

TEST(EnumerateLaw, ResidualCollectsCappedBranches) {
  // Reads until the first 1: halts at length l with mass 2^-l.
  TapeProgram p = [](BitSource& s) {
    int64_t n = 0;
    while (s.flip(1) == 0) ++n;
    return Outcome{n};
  };
  auto law = enumerate_law(p, 10);
  EXPECT_EQ(law.residual, pow2_inv(10));
  EXPECT_EQ(law.mass({9}), pow2_inv(10));
  EXPECT_EQ(law.total(), 1);
  EXPECT_THROW(enumerate_law(p, 65), InvalidRange);
}

TEST(EnumerateLaw, MultiBitRequestsBranchTogether) {
  auto law = enumerate_law([](BitSource& s) { return Outcome{int64_t(s.flip(3) % 3)}; });
  EXPECT_EQ(law.mass({0}), ratio(3, 8));
  EXPECT_EQ(law.mass({2}), ratio(2, 8));
  EXPECT_EQ(law.flip_mass, 3);
  EXPECT_EQ(law.leaves, 8u);
}

TEST(EnumerateRounds, ZeroRoundsIsTheInitialState) {
  auto r = enumerate_rounds(leaky_round(), 8, 0);
  ASSERT_EQ(r.finals.size(), 1u);
  const auto& [key, mass] = *r.finals.begin();
  EXPECT_TRUE(key.first.empty());
  EXPECT_EQ(key.second, (StateSnapshot{0, 1, {}}));
  EXPECT_EQ(mass, 1);
  auto rep = check_invariant_I(r);
  EXPECT_EQ(rep.keys, 1u);
}

TEST(EnumerateRounds, MergedLawMatchesFlatEnumeration) {
  DiscreteDistribution d({2, 3, 5});
  RoundProgram prog = [&](UniformState& st, const Outcome&) { return int64_t(inversion(st, d)); };
  auto merged = enumerate_rounds(prog, 8, 2, 48);
  auto flat = enumerate_law([&](BitSource& s) {
    UniformState st(s, 8);
    int64_t a = int64_t(inversion(st, d));
    return Outcome{a, int64_t(inversion(st, d))};
  }, 48);
  // Per-round caps make the merged residual no larger than the flat one.
  EXPECT_LE(merged.law.residual, flat.residual);
  for (const auto& [o, m] : flat.masses) {
    EXPECT_GE(merged.law.mass(o), m);
    EXPECT_LE(merged.law.mass(o) - m, flat.residual);
  }
  EXPECT_EQ(merged.law.total(), 1);
}

TEST(EnumerateRounds, SharedSearchesGiveTheSameLaw) {
  DiscreteDistribution d({4, 3, 3, 1});
  RoundProgram prog = [&](UniformState& st, const Outcome&) {
    return int64_t(uniform_with(UniformMethod::widening, st, d.total()));
  };
  auto full = enumerate_rounds(prog, 6, 2, 24);
  auto shared = enumerate_rounds(prog, 6, 2, 24, {}, HistoryUse::length_only);
  EXPECT_EQ(full.finals, shared.finals);
  EXPECT_EQ(full.law.residual, shared.law.residual);
  EXPECT_EQ(full.law.flip_mass, shared.law.flip_mass);
  EXPECT_LT(shared.law.leaves, full.law.leaves);
}

TEST(EnumerateRounds, PosteriorPacksPushbackInServeOrder) {
  RoundLaw r;
  StateSnapshot s{1, 3, {{2, 2}, {1, 1}}};  // top of the stack is (1, 1 bit)
  r.finals[{Outcome{0}, s}] = 1;
  auto post = posterior_of(r);
  ASSERT_EQ(post.table.size(), 1u);
  const auto& [key, hist] = *post.table.begin();
  EXPECT_EQ(key.m, 3u);
  EXPECT_EQ(key.widths, (std::vector<unsigned>{1, 2}));
  // Z + M * (1 + 2 * 2)
  EXPECT_EQ(hist.begin()->first, 16);
}

TEST(InvariantI, FairCoinAtWordSizeFour) {
  DiscreteDistribution d({1, 1});
  auto rep = check_invariant_I(
      [](UniformState& st, const DiscreteDistribution& dd) { return inversion(st, dd); }, {d}, 1, 4);
  EXPECT_EQ(rep.residual, 0);
  EXPECT_EQ(rep.max_spread, 0);
  EXPECT_GT(rep.keys, 0u);
}

// Every general recycling sampler, two rounds, over the battery at each
// word size whose division range covers the draw.
class InvariantBattery : public ::testing::TestWithParam<unsigned> {};

TEST_P(InvariantBattery, TwoRounds) {
  const unsigned w = GetParam();
  for (const auto& [id, sampler] : recycling_state_samplers()) {
    for (const auto& d : battery()) {
      if (!division_fits(id, d, w)) continue;
      InvariantReport rep;
      ASSERT_NO_THROW(rep = check_invariant_I(sampler, {d}, 2, w)) << id << " " << d.to_string();
      EXPECT_LE(rep.max_spread, rep.residual);
      EXPECT_LT(rep.residual, pow2_inv(30)) << id << " W=" << w << " " << d.to_string();
    }
  }
}

INSTANTIATE_TEST_SUITE_P(WordSizes, InvariantBattery, ::testing::Values(4u, 6u, 8u));

// The uniform recyclers themselves, as two rounds of Uniform(A).
TEST(InvariantI, UniformRecyclersTwoRounds) {
  for (const std::string id : {"div", "widening", "lemire-rec", "batch-rec"}) {
    const UniformMethod m = parse_uniform_method(id);
    for (uint64_t n : {2u, 3u, 5u, 6u}) {
      RoundProgram p = [=](UniformState& st, const Outcome&) { return int64_t(uniform_with(m, st, n)); };
      ASSERT_NO_THROW(check_invariant_I(p, 6, 2, 40)) << id << " n=" << n;
    }
  }
}

TEST(InvariantI, MixedDistributionsAcrossRounds) {
  for (const auto& [id, sampler] : recycling_state_samplers()) {
    std::vector<DiscreteDistribution> dists = {DiscreteDistribution({1, 3}), DiscreteDistribution({2, 3, 5})};
    ASSERT_NO_THROW(check_invariant_I(sampler, dists, 2, 8)) << id;
  }
}

TEST(InvariantI, LeakyRecyclerIsCaught) {
  auto r = enumerate_rounds(leaky_round(), 8, 2);
  mpq_class second_is_one = 0;
  for (const auto& [o, m] : r.law.masses) {
    if (o[1] == 1) second_is_one += m;
  }
  EXPECT_EQ(second_is_one, ratio(5, 16));
  try {
    check_invariant_I(r);
    FAIL() << "leaky recycler passed the invariant check";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.key().outcome[0], 0);
    EXPECT_EQ(e.key().widths, (std::vector<unsigned>{1}));
    ASSERT_EQ(e.histogram().size(), 1u);
    EXPECT_EQ(e.histogram().begin()->first, 0);
  }
}

TEST(InvariantI, TamperedStateIsCaught) {
  // A correct draw that then leaks the output into Z.
  DiscreteDistribution d({1, 3});
  RoundProgram p = [&](UniformState& st, const Outcome&) {
    size_t x = inversion(st, d);
    st.recycle(x, 2);
    return int64_t(x);
  };
  EXPECT_THROW(check_invariant_I(p, 8, 1), InvariantViolation);
}

TEST(ExpectedTosses, MatchesOracleOnDyadicTrees) {
  for (const auto& w : std::vector<std::vector<uint64_t>>{{1, 1}, {1, 3}, {5, 2, 1}, {1, 1, 2, 4, 8}}) {
    auto tree = ddg_build(DiscreteDistribution(w));
    auto oracle = enumerate_law([&](BitSource& s) { return Outcome{int64_t(ddg_sample_fresh(s, tree))}; });
    EXPECT_EQ(oracle.residual, 0);
    EXPECT_EQ(oracle.flip_mass, ddg_expected_tosses(tree));
    EXPECT_EQ(oracle.masses, ddg_law(tree).masses);
  }
}

TEST(ChiSquare, PerfectHistogramScoresZero) {
  auto r = chi_square_gof({100, 300, 600}, std::vector<double>{0.1, 0.3, 0.6});
  EXPECT_DOUBLE_EQ(r.statistic, 0);
  EXPECT_EQ(r.dof, 2u);
  EXPECT_NEAR(r.p_value, 1, 1e-12);
}

TEST(ChiSquare, SkewedHistogramRejected) {
  auto r = chi_square_gof({900, 50, 50}, DiscreteDistribution({1, 1, 1}));
  EXPECT_LT(r.p_value, 1e-100);
}

TEST(ChiSquare, KnownStatistic) {
  // (60-50)^2/50 + (40-50)^2/50 = 4 with one degree of freedom.
  auto r = chi_square_gof({60, 40}, std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(r.statistic, 4, 1e-12);
  EXPECT_NEAR(r.p_value, 0.04550026389635842, 1e-12);
}

TEST(ChiSquare, SparseTailsAreMerged) {
  auto r = chi_square_gof({50, 45, 3, 1, 1}, std::vector<double>{0.5, 0.45, 0.03, 0.01, 0.01});
  EXPECT_EQ(r.bins, 3u);
  EXPECT_THROW(chi_square_gof({2, 1}, std::vector<double>{0.5, 0.5}), DegenerateBins);
  EXPECT_THROW(chi_square_gof({2, 1}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(ChiSquare, UniformSixAtFullWord) {
  auto src = BitSource::fast(2024);
  UniformState st(src, 64);
  std::vector<uint64_t> counts(6, 0);
  for (int i = 0; i < 1000000; ++i) ++counts[uniform(st, 6)];
  auto r = chi_square_gof(counts, DiscreteDistribution({1, 1, 1, 1, 1, 1}));
  EXPECT_GT(r.p_value, 1e-6);
}
