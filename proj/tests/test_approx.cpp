#include <gtest/gtest.h>

#include <random>

#include "hcf/approximation.hpp"
#include "oracles.hpp"

using namespace hcf;

TEST(Rate, ClassifyPowerLaws) {
  RateClass a = classify_rate(ApproxRate::parse("x^-3"));
  EXPECT_EQ(a.lower_order.value, 3);
  EXPECT_FALSE(a.tau.infinite);
  EXPECT_EQ(a.tau.value, 0);
  EXPECT_TRUE(a.small_o_x2);

  RateClass b = classify_rate(ApproxRate::parse("(1/32)*x^-2"));
  EXPECT_EQ(b.lower_order.value, 2);
  EXPECT_EQ(b.tau.value, Rational(1, 32));
  EXPECT_FALSE(b.small_o_x2);

  RateClass c = classify_rate(ApproxRate::parse("x^-2*log^-1"));
  EXPECT_EQ(c.lower_order.value, 2);
  EXPECT_EQ(c.tau.value, 0);
  EXPECT_TRUE(c.small_o_x2);

  RateClass d = classify_rate(ApproxRate::parse("x^-1"));
  EXPECT_TRUE(d.tau.infinite);
  EXPECT_FALSE(d.small_o_x2);
}

TEST(Rate, SmallOIffTauZero) {
  for (auto s : {"x^-3", "2*x^-2", "x^-2*log^-1/2", "x^-5/2", "x^-1*log^-3", "7*x^-2"}) {
    RateClass rc = classify_rate(ApproxRate::parse(s));
    EXPECT_EQ(rc.small_o_x2, !rc.tau.infinite && rc.tau.value == 0) << s;
  }
}

TEST(Rate, ParseErrors) {
  EXPECT_THROW(ApproxRate::parse("x^3"), Error);
  EXPECT_THROW(ApproxRate::parse("2"), Error);
  EXPECT_THROW(ApproxRate::parse("-1*x^-2"), Error);
  EXPECT_THROW(ApproxRate::table({{1, 1}, {2, 3}}), Error);
}

TEST(Rate, ExactAndEnclosedEvaluation) {
  ApproxRate r = ApproxRate::parse("(1/32)*x^-2");
  EXPECT_EQ(r.eval(4), RatInterval(Rational(1, 512)));
  EXPECT_EQ(r.eval_at_norm(16), RatInterval(Rational(1, 512)));
  ApproxRate odd = ApproxRate::parse("x^-3");
  RatInterval v = odd.eval_at_norm(2);
  // 2^{-3/2}
  EXPECT_LE(v.lo * v.lo, Rational(1, 8));
  EXPECT_GE(v.hi * v.hi, Rational(1, 8));
  ApproxRate lg = ApproxRate::parse("x^-2*log^-1");
  RatInterval w = lg.eval(Rational(100));
  double ref = 1e-4 / (1 + std::log(100.0));
  EXPECT_LE(to_double(w.lo), ref * (1 + 1e-9));
  EXPECT_GE(to_double(w.hi), ref * (1 - 1e-9));
  EXPECT_LT(to_double(w.width()), ref * 1e-9);
}

TEST(Rate, MonotoneOnGrids) {
  for (auto s : {"x^-4", "(1/32)*x^-2", "x^-2*log^-1", "3*x^-5/2*log^-2"}) {
    ApproxRate r = ApproxRate::parse(s);
    Rational prev_hi = -1;
    for (int i = 1; i < 400; i += 3) {
      RatInterval v = r.eval(Rational(i, 7));
      if (prev_hi >= 0) {
        EXPECT_LE(v.lo, prev_hi) << s << " at " << i;
      }
      prev_hi = v.hi;
    }
  }
}

TEST(Rate, TableStepFunction) {
  ApproxRate t = ApproxRate::table_csv("x,psi\n1,1\n2,1/8\n4,1/64\n");
  EXPECT_EQ(t.eval(Rational(3)), RatInterval(Rational(1, 8)));
  EXPECT_EQ(t.eval(Rational(1, 2)), RatInterval(Rational(1)));
  EXPECT_EQ(t.eval_at_norm(16), RatInterval(Rational(1, 64)));
  EXPECT_EQ(t.eval_at_norm(15), RatInterval(Rational(1, 8)));
  EXPECT_TRUE(t.classify().approximate);
}

TEST(Good, FiveTwelfths) {
  GaussRat z(Rational(5, 12));
  EXPECT_TRUE(is_good_approximation(z, GaussInt(1), GaussInt(2)));
  EXPECT_FALSE(is_good_approximation(z, GaussInt(0), GaussInt(2)));
  EXPECT_TRUE(is_best_approximation(z, GaussInt(-5), GaussInt(-12)));
  EXPECT_TRUE(is_best_approximation(z, GaussInt(0), GaussInt(1)));
}

TEST(Good, ConvergentsOfRandomPoints) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 60; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 100000);
    Expansion e = hcf_expand(z);
    QPairTrace t = qpair_of(e.digits);
    for (size_t n = 1; n <= t.size() && t.q[n].norm() < 3000; ++n)
      ASSERT_TRUE(is_good_approximation(z, t.p[n], t.q[n])) << z << " n=" << n;
  }
}

TEST(Good, ResidueSearchAgreesWithBruteForce) {
  // the brute-force branch is forced by perturbing through a distinct but equal point pair
  std::mt19937_64 rng(33);
  for (int i = 0; i < 300; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 5000);
    std::uniform_int_distribution<int> u(-12, 12);
    GaussInt q(u(rng), u(rng));
    if (q.is_zero()) continue;
    GaussInt p = nearest_gauss_int(GaussRat(q) * z) + GaussInt(u(rng) % 2, 0);
    for (bool best : {false, true}) {
      bool brute = true;
      for (int x = -12; x <= 12; ++x)
        for (int y = -12; y <= 12; ++y) {
          GaussInt qq(x, y);
          if (qq.is_zero() || qq.norm() > q.norm() || (best && qq.norm() == q.norm())) continue;
          GaussRat res = GaussRat(qq) * z - GaussRat(nearest_gauss_int(GaussRat(qq) * z));
          GaussRat tgt = GaussRat(q) * z - GaussRat(p);
          if (best ? res.norm_sq() <= tgt.norm_sq() : res.norm_sq() < tgt.norm_sq()) brute = false;
        }
      ASSERT_EQ(approximation_test(z, p, q, best), brute) << z << " " << p << "/" << q << " best=" << best;
    }
  }
}

TEST(Best, NonConvergentLoses) {
  std::mt19937_64 rng(4);
  int found = 0;
  for (int i = 0; i < 200 && found < 20; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 10000);
    // a random p/q of moderate size that is not a convergent
    GaussInt q(3 + i % 5, 2 + i % 3);
    GaussInt p = nearest_gauss_int(GaussRat(q) * z) + GaussInt(1);
    Expansion e = hcf_expand(z);
    if (legendre_test(e, p, q).is_convergent) continue;
    EXPECT_FALSE(is_best_approximation(z, p, q));
    ++found;
  }
  EXPECT_GT(found, 0);
}

TEST(Good, BallMatchesRational) {
  GaussRat z = parse_gauss_rat("(31+17i)/97");
  Expansion e = hcf_expand(z);
  QPairTrace t = qpair_of(e.digits);
  ComplexBall b(z, Rational(1, BigInt(1) << 80), 120);
  for (size_t n = 1; n < t.size(); ++n) EXPECT_TRUE(is_good_approximation(Point(b), t.p[n], t.q[n]));
  EXPECT_FALSE(is_good_approximation(Point(b), GaussInt(0), GaussInt(2)));
}

TEST(Legendre, Threshold) {
  Threshold th = legendre_threshold();
  EXPECT_EQ(th.t, Rational(1, 2));
  EXPECT_EQ(th.value, Rational(1, 4));
}

TEST(Legendre, ExhaustiveSmallDenominators) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 25; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 1000000);
    Expansion e = hcf_expand(z);
    size_t claimed = 0;
    for (int x = -20; x <= 20; ++x)
      for (int y = -20; y <= 20; ++y) {
        GaussInt q(x, y);
        if (q.is_zero() || q.norm() > 400) continue;
        GaussInt c = nearest_gauss_int(GaussRat(q) * z);
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy) {
            GaussInt p = c + GaussInt(dx, dy);
            if (p.is_zero()) continue;
            if (GaussRat::fraction(p, q) == z) continue;
            LegendreResult r = legendre_test(e, p, q);
            if (r.claim == LegendreClaim::MustBeConvergent) {
              ASSERT_TRUE(r.is_convergent) << z << " " << p << "/" << q;
              ++claimed;
            }
          }
      }
    LegendreScan scan = legendre_scan(z, 400);
    EXPECT_EQ(scan.counterexamples, 0u);
    // the scan sees every q including associates of the exact denominator
    EXPECT_GE(scan.claimed, claimed);
  }
}

TEST(Legendre, FarIsNoClaimAndZeroExcluded) {
  Expansion e = hcf_expand(GaussRat(Rational(5, 12)));
  EXPECT_EQ(legendre_test(e, GaussInt(1), GaussInt(5)).claim, LegendreClaim::NoClaim);
  EXPECT_EQ(legendre_test(e, GaussInt(0), GaussInt(1)).claim, LegendreClaim::NoClaim);
  // |5/12 - 3/7| = 1/84 is not below 1/196
  EXPECT_EQ(legendre_test(e, GaussInt(3), GaussInt(7)).claim, LegendreClaim::NoClaim);
  LegendreResult r = legendre_test(e, GaussInt(-5), GaussInt(-12));
  EXPECT_EQ(r.claim, LegendreClaim::MustBeConvergent);
  EXPECT_TRUE(r.is_convergent);
  EXPECT_EQ(r.index, 3u);
}

TEST(OrderReport, Regimes) {
  Expansion empty = hcf_expand(GaussRat(0));
  EXPECT_TRUE(exact_order_report(empty, ApproxRate::parse("x^-4"), 2).empty());
  // bounded digits: |z - p/q| > 1/((M+2)|q|^2) beats any o(x^-2) rate eventually
  GaussRat z = evaluate(parse_digits("3,3,3,3,3,3,3,3,3,3"));
  Expansion e = hcf_expand(z, 8);
  auto rep = exact_order_report(e, ApproxRate::parse("x^-4"), 2);
  ASSERT_EQ(rep.size(), 8u);
  for (size_t n = 2; n < rep.size(); ++n) EXPECT_EQ(rep[n].regime, OrderRegime::AtOrAbove) << n;
}
