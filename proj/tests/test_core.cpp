#include <gtest/gtest.h>

#include <random>

#include "hcf/core.hpp"
#include "oracles.hpp"

using namespace hcf;

static GaussRat q(long n, long d) { return GaussRat(Rational(n, d)); }

TEST(Expand, Zero) {
  Expansion e = hcf_expand(GaussRat(0));
  EXPECT_TRUE(e.digits.empty());
  EXPECT_TRUE(e.terminated);
}

TEST(Expand, FiveTwelfths) {
  Expansion e = hcf_expand(q(5, 12));
  EXPECT_EQ(e.digits, parse_digits("2,3,-2"));
  EXPECT_TRUE(e.terminated);
  EXPECT_EQ(oracle::evaluate(e.digits.digits()), q(5, 12));
}

TEST(Expand, SingleGaussianDigit) {
  Expansion e = hcf_expand(parse_gauss_rat("2-i/5"));
  EXPECT_EQ(e.digits, parse_digits("2+i"));
  EXPECT_EQ(gauss_map(parse_gauss_rat("2-i/5")), GaussRat(0));
}

TEST(Expand, OutsideDomain) {
  EXPECT_THROW(hcf_expand(q(3, 2)), Error);
  EXPECT_THROW(hcf_expand(q(1, 2)), Error);
}

TEST(Expand, DepthLimitedIsNotTerminated) {
  Expansion e = hcf_expand(q(5, 12), 2);
  EXPECT_EQ(e.digits, parse_digits("2,3"));
  EXPECT_FALSE(e.terminated);
}

TEST(Expand, MatchesOracleOnRandomPoints) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 3000; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 1000000);
    Expansion e = hcf_expand(z);
    ASSERT_EQ(e.digits.digits(), oracle::expand(z)) << z;
    ASSERT_EQ(evaluate(e.digits), z);
  }
}

TEST(QPair, Examples) {
  QPairTrace t = qpair_of(parse_digits("2,3,-2"));
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.p[1], GaussInt(1));
  EXPECT_EQ(t.p[2], GaussInt(3));
  EXPECT_EQ(t.p[3], GaussInt(-5));
  EXPECT_EQ(t.q[1], GaussInt(2));
  EXPECT_EQ(t.q[2], GaussInt(7));
  EXPECT_EQ(t.q[3], GaussInt(-12));
  EXPECT_EQ(t.q[3] * t.p[2] - t.q[2] * t.p[3], GaussInt(-1));
  QPairTrace e = qpair_of(DigitSeq());
  EXPECT_EQ(e.p[0], GaussInt(0));
  EXPECT_EQ(e.q[0], GaussInt(1));
}

TEST(QPair, ConcatenationIsMatrixProduct) {
  DigitSeq a = parse_digits("2+i,-3,2i"), b = parse_digits("4,-1-2i");
  EXPECT_EQ(qpair(a + b), qpair(a) * qpair(b));
}

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(parse_digits("2+i")), parse_gauss_rat("2-i/5"));
  EXPECT_EQ(evaluate(parse_digits("2,3,-2")), q(5, 12));
  EXPECT_EQ(evaluate(parse_digits("3,-2,-2")), oracle::evaluate(parse_digits("3,-2,-2").digits()));
  EXPECT_EQ(evaluate(parse_digits("-3,2,2")), q(-5, 13));
}

TEST(Evaluate, DegenerateFraction) {
  // (-1+i) + 1/(1+i) = -1/2 + i/2, and (1+i) + 1/(-1/2 + i/2) = 0
  EXPECT_THROW(evaluate(parse_digits("2,1+i,-1+i,1+i")), Error);
}

TEST(Mirror, Examples) {
  EXPECT_TRUE(mirror_check(parse_digits("2,3,-2")));
  EXPECT_EQ(GaussRat::fraction(GaussInt(7), GaussInt(-12)), evaluate(parse_digits("-2,3,2")));
  EXPECT_TRUE(mirror_check(parse_digits("5-2i")));
}

TEST(GaussMap, Examples) {
  EXPECT_EQ(gauss_map(q(5, 12)), q(2, 5));
  EXPECT_THROW(gauss_map(GaussRat(0)), Error);
  Expansion e = hcf_expand(q(5, 12));
  EXPECT_EQ(std::get<GaussRat>(tail_at(e, 3)), GaussRat(0));
  EXPECT_EQ(std::get<GaussRat>(tail_at(e, 1)), q(2, 5));
}

TEST(QPairIdentities, RandomPrefixes) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 1000000);
    Expansion e = hcf_expand(z, 12);
    QPairTrace t = qpair_of(e.digits);
    size_t n = t.size();
    for (size_t k = 1; k <= n; ++k) {
      GaussInt sign = (k % 2 == 0) ? GaussInt(1) : GaussInt(-1);
      ASSERT_EQ(t.q[k] * t.p[k - 1] - t.q[k - 1] * t.p[k], sign);
      ASSERT_TRUE(mirror_check(e.digits.prefix(k)));
      ASSERT_LT(t.q[k - 1].norm(), t.q[k].norm());
      ASSERT_TRUE(bracket_holds(t.q[k].norm(), t.q[k - 1].norm(), e.digits[k - 1].norm()));
      // |z - p/q| <= |q|^-2
      GaussRat d = z - GaussRat::fraction(t.p[k], t.q[k]);
      Rational qn(t.q[k].norm());
      ASSERT_LE(d.norm_sq() * qn * qn, 1);
      for (size_t j = 0; j + 1 < k; ++j) {
        BigInt qa = t.q[j].norm(), qb = qpair(e.digits.suffix_from(j).prefix(k - j)).q.norm();
        ASSERT_TRUE(concat_bound_holds(qa, qb, t.q[k].norm()));
      }
      for (size_t j = 0; j < k; ++j)
        ASSERT_TRUE(phi_power_bound_holds(t.q[k].norm(), t.q[j].norm(), static_cast<unsigned>((k - j) / 2)));
    }
  }
}

TEST(PhiBound, ExactDecision) {
  // phi^2 = 2.618..., so 2.618 * 1 <= 3 but not <= 2
  EXPECT_TRUE(phi_power_bound_holds(3, 1, 1));
  EXPECT_FALSE(phi_power_bound_holds(2, 1, 1));
  // phi^4 = 6.854...
  EXPECT_TRUE(phi_power_bound_holds(7, 1, 2));
  EXPECT_FALSE(phi_power_bound_holds(6, 1, 2));
  EXPECT_TRUE(phi_power_bound_holds(0, 0, 3));
}

TEST(BallExpansion, CertifiedDigitsMatchRationalInside) {
  GaussRat z = parse_gauss_rat("17+5i/103");
  Expansion exact = hcf_expand(z);
  ComplexBall b(z, Rational(1, BigInt(1) << 40), 80);
  Expansion e = hcf_expand(b, 20);
  ASSERT_LE(e.digits.size(), exact.digits.size());
  for (size_t i = 0; i < e.digits.size(); ++i) EXPECT_EQ(e.digits[i], exact.digits[i]);
  EXPECT_TRUE(e.precision_exhausted);
}

TEST(BallExpansion, PiFractionalPart) {
  // pi - 3 lies in the square; digits of a tight ball are certified
  auto src = [](unsigned p) {
    ComplexBall pb = pi_ball(p);
    return ComplexBall(pb.center() - GaussRat(3), pb.radius(), p);
  };
  Expansion e = hcf_expand_adaptive(src, 15);
  ASSERT_GE(e.digits.size(), 15u);
  // nearest-integer CF of pi - 3: 1/0.14159... = 7.0625 -> 7; next 1/0.0625... = 15.99 -> 16
  EXPECT_EQ(e.digits[0], GaussInt(7));
  EXPECT_EQ(e.digits[1], GaussInt(16));
  QPair r = qpair(e.digits);
  ComplexBall pb = src(200);
  GaussRat conv = GaussRat::fraction(r.p, r.q);
  EXPECT_LT((conv - pb.center()).norm_sq() * Rational(r.q.norm()) * Rational(r.q.norm()), 1);
}

TEST(Digits, ParseFormat) {
  DigitSeq s = parse_digits("-2+3i,4");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.str(), "-2+3i,4");
  EXPECT_TRUE(parse_digits("").empty());
  EXPECT_THROW(parse_digits("2,1,3"), Error);
  EXPECT_THROW(parse_digits("2,i"), Error);
  EXPECT_EQ(s.reversed().str(), "4,-2+3i");
  EXPECT_EQ(s.minus().str(), "-2+3i");
}
