#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support.hpp"

using namespace rr;
using rr::testing::law_matches;
using rr::testing::pow2_inv;
using rr::testing::uniform_target;

namespace {

using u128 = unsigned __int128;

std::vector<uint8_t> word_bits(uint64_t x, unsigned w) {
  std::vector<uint8_t> bits;
  for (unsigned i = 0; i < w; ++i) bits.push_back((x >> i) & 1);
  return bits;
}

TapeProgram uniform_program(const std::string& id, unsigned w, uint64_t n) {
  if (id == "fdr") return [=](BitSource& src) { return Outcome{int64_t(fdr(src, n))}; };
  if (id == "lemire") {
    return [=](BitSource& src) { return Outcome{int64_t(lemire_plain(src, n, w))}; };
  }
  const UniformMethod m = parse_uniform_method(id);
  return [=](BitSource& src) {
    UniformState st(src, w);
    return Outcome{int64_t(uniform_with(m, st, n))};
  };
}

}  // namespace

TEST(DivmodWordRange, SmallCases) {
  auto a = divmod_word_range(4, 6);
  EXPECT_EQ(a.q, 2u);
  EXPECT_EQ(a.r, 4u);
  auto b = divmod_word_range(4, 16);
  EXPECT_EQ(b.q, 1u);
  EXPECT_EQ(b.r, 0u);
  auto c = divmod_word_range(4, 8);
  EXPECT_EQ(c.q, 2u);
  EXPECT_EQ(c.r, 0u);
}

TEST(DivmodWordRange, MatchesDoubleWidthDivision) {
  auto src = BitSource::fast(11);
  for (unsigned w : {2u, 5u, 16u, 33u, 63u, 64u}) {
    const u128 two_w = u128(1) << w;
    for (int i = 0; i < 2000; ++i) {
      const uint64_t n = 2 + uint64_t(src.flip(w) % (two_w - 2));  // [2, 2^W)
      auto d = divmod_word_range(w, n);
      ASSERT_EQ(u128(d.q), two_w / n) << w << " " << n;
      ASSERT_EQ(u128(d.r), two_w % n) << w << " " << n;
    }
  }
}

TEST(DivisionRecycler, TapeTrace) {
  auto src = BitSource::tape({1, 0, 1});
  UniformState st(src, 4);
  EXPECT_EQ(uniform(st, 3), 2u);  // refill to (5,8); 5 = 1*3 + 2 and 1 < 8/3
  EXPECT_EQ(st.value(), 1u);
  EXPECT_EQ(st.bound(), 2u);
}

TEST(DivisionRecycler, RangeOneTouchesNothing) {
  auto src = BitSource::tape({});
  UniformState st(src, 8, 3, 7);
  EXPECT_EQ(uniform(st, 1), 0u);
  EXPECT_EQ(st.value(), 3u);
  EXPECT_EQ(st.bound(), 7u);
}

TEST(DivisionRecycler, RangeLimits) {
  auto src = BitSource::fast(1);
  UniformState st(src, 8);
  EXPECT_THROW(uniform(st, 0), InvalidRange);
  EXPECT_THROW(uniform(st, 129), InvalidRange);
  EXPECT_LT(uniform(st, 128), 128u);
}

TEST(DivisionRecycler, ExactLawWithSmallResidual) {
  auto law = enumerate_law(uniform_program("div", 4, 3), 48);
  std::string why;
  EXPECT_TRUE(law_matches(law, uniform_target(3), &why)) << why;
  EXPECT_LE(law.residual, pow2_inv(46));  // 23 rejections of chance 1/4 each
}

TEST(DivisionRecycler, PowerOfTwoShortcutIsBitIdentical) {
  for (unsigned w : {4u, 8u, 16u, 64u}) {
    auto a = BitSource::fast(w);
    auto b = BitSource::fast(w);
    UniformState sa(a, w), sb(b, w);
    auto mix = BitSource::fast(99);
    for (int i = 0; i < 20000; ++i) {
      // Interleave power-of-two and general ranges so the states wander.
      const unsigned e = unsigned(mix.flip(6) % w);
      const uint64_t n = (i % 3 == 0) ? 3 + mix.flip(2) : (uint64_t{1} << e);
      ASSERT_EQ(uniform(sa, n), detail::uniform_division_general(sb, n));
      ASSERT_EQ(sa.snapshot(), sb.snapshot());
    }
    EXPECT_EQ(a.raw_bits_consumed(), b.raw_bits_consumed());
  }
}

// With n dividing the refilled bound the reject branch is unreachable.
TEST(DivisionRecycler, NeverRejectsWhenRangeDividesTheBound) {
  const unsigned w = 8;
  for (uint64_t m0 : {1u, 3u, 5u}) {
    // Refill lifts M = m0 to m0 * 2^k; every n = m0 * 2^j with j <= k
    // divides it.
    const uint64_t top = m0 << (w - bit_length(m0));
    for (uint64_t n = m0; n <= 128 && top % n == 0; n *= 2) {
      for (uint64_t z0 = 0; z0 < m0; ++z0) {
        TapeProgram p = [=](BitSource& src) {
          UniformState st(src, w, z0, m0);
          uniform(st, n);
          return Outcome{int64_t(st.rejections())};
        };
        auto law = enumerate_law(p, 48);
        EXPECT_EQ(law.residual, 0);
        EXPECT_EQ(law.masses.size(), 1u);
        EXPECT_EQ(law.mass({0}), 1) << "m0=" << m0 << " n=" << n;
      }
    }
  }
}

TEST(WideningRecycler, RejectTrace) {
  // X = 13 for n = 6: 13 = 2*6 + 1 and q_B = 2, so reject and recycle (1, 4).
  auto tape = word_bits(13, 4);
  auto accept = word_bits(0, 4);
  tape.insert(tape.end(), accept.begin(), accept.end());
  auto src = BitSource::tape(tape);
  UniformState st(src, 4);
  EXPECT_EQ(uniform_widening(st, 6), 0u);
  EXPECT_EQ(st.rejections(), 1u);
  // (1,4) then accept recycles (0, 2): (1 + 0*4, 8).
  EXPECT_EQ(st.value(), 1u);
  EXPECT_EQ(st.bound(), 8u);
}

TEST(WideningRecycler, FullRangeReturnsTheWord) {
  auto src = BitSource::tape(word_bits(11, 4));
  UniformState st(src, 4);
  EXPECT_EQ(uniform_widening(st, 16), 11u);
  EXPECT_EQ(st.bound(), 1u);
}

// The reject map of the multiply-shift recycler for W=4, n=6.
TEST(LemireRecycler, RejectSetMapsOntoLeftoverRange) {
  const std::set<uint64_t> reject = {0, 4, 8, 12};
  std::vector<uint64_t> images;
  for (uint64_t x = 0; x < 16; ++x) {
    auto src = BitSource::tape(word_bits(x, 4));
    UniformState st(src, 4);
    try {
      uniform_lemire_recycled(st, 6);
      EXPECT_FALSE(reject.count(x)) << x;
    } catch (const TapeExhausted&) {
      ASSERT_TRUE(reject.count(x)) << x;
      EXPECT_EQ(st.bound(), 4u);
      images.push_back(st.value());
    }
  }
  EXPECT_EQ(images, (std::vector<uint64_t>{0, 1, 2, 3}));
}

TEST(LemireRecycler, HalfWordNeverRejects) {
  for (uint64_t x = 0; x < 256; ++x) {
    auto src = BitSource::tape(word_bits(x, 8));
    UniformState st(src, 8);
    EXPECT_EQ(uniform_lemire_recycled(st, 128), x >> 1);
    EXPECT_EQ(st.rejections(), 0u);
  }
}

// For one word, the accepted (output, leftover) pairs and the rejected
// leftovers each enumerate their ranges exactly once.
TEST(WordRecyclers, OneWordSplitIsABijection) {
  for (const std::string id : {"widening", "lemire-rec", "batch-rec"}) {
    const UniformMethod m = parse_uniform_method(id);
    for (unsigned w = 3; w <= 8; ++w) {
      for (uint64_t n = 2; n < (uint64_t{1} << w); ++n) {
        if (id == "batch-rec" && n > (uint64_t{1} << (w - 1))) break;
        const auto [q, t] = divmod_word_range(w, n);
        std::set<std::pair<uint64_t, uint64_t>> accepted;
        std::set<uint64_t> rejected;
        for (uint64_t x = 0; x < (uint64_t{1} << w); ++x) {
          auto src = BitSource::tape(word_bits(x, w));
          UniformState st(src, w);
          try {
            uint64_t u = uniform_with(m, st, n);
            ASSERT_EQ(st.bound(), q);
            ASSERT_TRUE(accepted.insert({u, st.value()}).second);
          } catch (const TapeExhausted&) {
            ASSERT_EQ(st.bound(), t);
            ASSERT_TRUE(rejected.insert(st.value()).second);
          }
        }
        ASSERT_EQ(accepted.size(), n * q) << id << " W=" << w << " n=" << n;
        ASSERT_EQ(rejected.size(), t) << id << " W=" << w << " n=" << n;
      }
    }
  }
}

TEST(BatchRecycler, AllOnesConsumeNothing) {
  auto src = BitSource::tape({});
  UniformState st(src, 8, 2, 5);
  const uint64_t ranges[3] = {1, 1, 1};
  EXPECT_EQ(uniform_batch_recycled(st, ranges), (std::vector<uint64_t>{0, 0, 0}));
  EXPECT_EQ(st.value(), 2u);
  EXPECT_EQ(st.bound(), 5u);
}

TEST(BatchRecycler, RangeErrors) {
  auto src = BitSource::fast(2);
  UniformState st(src, 8);
  const uint64_t big[2] = {16, 16};
  EXPECT_THROW(uniform_batch_recycled(st, big), BatchOverflow);
  const uint64_t zero[2] = {3, 0};
  EXPECT_THROW(uniform_batch_recycled(st, zero), InvalidRange);
}

TEST(BatchRecycler, JointLawOfTwoRanges) {
  TapeProgram p = [](BitSource& src) {
    UniformState st(src, 8);
    const uint64_t ranges[2] = {3, 5};
    auto u = uniform_batch_recycled(st, ranges);
    return Outcome{int64_t(u[0]), int64_t(u[1])};
  };
  auto law = enumerate_law(p, 48);
  std::map<Outcome, mpq_class> target;
  for (int64_t a = 0; a < 3; ++a) {
    for (int64_t b = 0; b < 5; ++b) target[{a, b}] = rr::testing::ratio(1, 15);
  }
  std::string why;
  EXPECT_TRUE(law_matches(law, target, &why)) << why;
  EXPECT_LT(law.residual, pow2_inv(40));
}

TEST(BatchRecycler, SingleRangeHasTheLemireLaw) {
  auto a = enumerate_law(uniform_program("batch-rec", 8, 6), 48);
  auto b = enumerate_law(uniform_program("lemire-rec", 8, 6), 48);
  EXPECT_EQ(a.masses, b.masses);
  EXPECT_EQ(a.residual, b.residual);
}

TEST(FastDiceRoller, TrivialRanges) {
  auto src = BitSource::tape({1});
  EXPECT_EQ(fdr(src, 1), 0u);
  EXPECT_EQ(src.raw_bits_consumed(), 0u);
  EXPECT_EQ(fdr(src, 2), 1u);
  EXPECT_EQ(src.raw_bits_consumed(), 1u);
}

TEST(PlainLemire, OneWordPerDraw) {
  for (uint64_t n : {uint64_t{1}, uint64_t{6}, uint64_t{1000}}) {
    auto src = BitSource::fast(n);
    for (int i = 0; i < 1000; ++i) ASSERT_LT(lemire_plain(src, n, 64), n);
    // The reject chance 2^64 mod n / 2^64 is negligible here.
    EXPECT_EQ(src.raw_bits_consumed(), 64000u);
  }
  auto src = BitSource::tape(word_bits(0xB7, 8));
  EXPECT_EQ(lemire_plain(src, 256, 8), 0xB7u);
}

TEST(UniformSamplers, RangeErrors) {
  auto src = BitSource::fast(4);
  UniformState st(src, 6);
  EXPECT_THROW(uniform_widening(st, 65), InvalidRange);
  EXPECT_THROW(uniform_widening(st, 0), InvalidRange);
  EXPECT_THROW(uniform_lemire_recycled(st, 64), InvalidRange);
  EXPECT_THROW(lemire_plain(src, 65, 6), InvalidRange);
  EXPECT_THROW(fdr(src, 0), InvalidRange);
  EXPECT_EQ(max_range(UniformMethod::division, 6), 32u);
  EXPECT_EQ(max_range(UniformMethod::widening, 6), 63u);
}

TEST(UniformSamplers, MethodNames) {
  for (auto m : {UniformMethod::division, UniformMethod::widening,
                 UniformMethod::lemire_recycled, UniformMethod::batch_recycled}) {
    EXPECT_EQ(parse_uniform_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_uniform_method("coin"), std::invalid_argument);
}

// Every uniform sampler, every n in [1,20], W in {6,8}: masses are exactly
// 1/n up to the reported residual.
class UniformExactness : public ::testing::TestWithParam<std::tuple<std::string, unsigned>> {};

TEST_P(UniformExactness, MassesAreOneOverN) {
  const auto& [id, w] = GetParam();
  // Plain Lemire retries with a fresh word and nothing to merge, so its tree
  // grows by 2^W per attempt; stop after whole attempts near 32 bits.
  const unsigned cap = id == "lemire" ? 32 - 32 % w : 48;
  for (uint64_t n = 1; n <= 20; ++n) {
    auto law = enumerate_law(uniform_program(id, w, n), cap);
    std::string why;
    EXPECT_TRUE(law_matches(law, uniform_target(n), &why)) << id << " W=" << w << " n=" << n << ": " << why;
    RecordProperty(id + "_W" + std::to_string(w) + "_n" + std::to_string(n) + "_residual",
                   law.residual.get_str());
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllSamplers, UniformExactness,
    ::testing::Combine(::testing::Values("div", "widening", "lemire-rec", "batch-rec", "fdr", "lemire"),
                       ::testing::Values(6u, 8u)),
    [](const auto& info) {
      std::string s = std::get<0>(info.param) + "_W" + std::to_string(std::get<1>(info.param));
      for (char& c : s) {
        if (c == '-') c = '_';
      }
      return s;
    });
