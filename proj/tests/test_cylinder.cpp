#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hcf/cylinder.hpp"
#include "oracles.hpp"

using namespace hcf;

static std::vector<GaussInt> digits_up_to(int M) {
  std::vector<GaussInt> out;
  for (int x = -M; x <= M; ++x)
    for (int y = -M; y <= M; ++y)
      if (x * x + y * y <= M * M && x * x + y * y > 1) out.emplace_back(x, y);
  return out;
}

TEST(Mobius, InversionOfEdges) {
  GenCircle re_half = GenCircle::half_plane(GaussRat(1), Rational(-1, 2), false);  // Re w <= 1/2
  EXPECT_EQ(re_half.push(MobiusMap::inversion()), GenCircle::outside(GaussRat(1), 1, false));
  GenCircle im_half = GenCircle::half_plane(GaussRat(0, 1), Rational(-1, 2), false);  // Im w <= 1/2
  EXPECT_EQ(im_half.push(MobiusMap::inversion()), GenCircle::outside(GaussRat(0, -1), 1, false));
  GenCircle c = GenCircle::disk(GaussRat(Rational(1, 3), Rational(-2, 7)), Rational(1, 9), true);
  EXPECT_EQ(c.push(MobiusMap::identity()), c);
}

TEST(Mobius, BoundaryPointsMapToImageBoundary) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(-5, 5), t(-20, 20);
  int done = 0;
  while (done < 200) {
    MobiusMap M{GaussInt(u(rng), u(rng)), GaussInt(u(rng), u(rng)), GaussInt(u(rng), u(rng)), GaussInt(u(rng), u(rng))};
    GaussInt det = M.det();
    if (!(det == GaussInt(1) || det == GaussInt(-1))) continue;
    GaussRat c(Rational(u(rng), 3), Rational(u(rng), 4));
    Rational r(1 + std::abs(u(rng)), 2);
    GenCircle g = GenCircle::disk(c, r * r, false);
    GenCircle img = g.push(M);
    for (int k = 0; k < 5; ++k) {
      Rational s(t(rng), 7);
      GaussRat on = c + GaussRat(r * (1 - s * s) / (1 + s * s), r * 2 * s / (1 + s * s));
      ASSERT_EQ(g.value(on), 0);
      if (M.is_pole(on)) continue;
      EXPECT_EQ(img.value(M.apply(on)), 0);
    }
    ++done;
  }
}

TEST(Cylinder, LevelOneRegionForTwo) {
  Region r = level1_cylinder_region(GaussInt(2));
  std::vector<GenCircle> want = {
      GenCircle::disk(GaussRat(Rational(1, 3)), Rational(1, 9), false),
      GenCircle::outside(GaussRat(Rational(1, 5)), Rational(1, 25), true),
      GenCircle::outside(GaussRat(0, 1), 1, false),
      GenCircle::outside(GaussRat(0, -1), 1, true),
  };
  std::sort(want.begin(), want.end());
  EXPECT_EQ(r.constraints(), want);
}

TEST(Cylinder, RegionMatchesExpansionPrefix) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1500; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 20000);
    Expansion e = hcf_expand(z);
    size_t n = std::min<size_t>(e.digits.size(), 1 + i % 3);
    if (n == 0) continue;
    DigitSeq u = e.digits.prefix(n);
    ASSERT_TRUE(cylinder_region(u).contains(z)) << z << " " << u;
    // a point whose prefix differs in the last digit is outside
    GaussRat w = oracle::random_gauss_fraction(rng, 20000);
    Expansion f = hcf_expand(w, n);
    if (f.digits != u) {
      ASSERT_FALSE(cylinder_region(u).contains(w)) << w << " " << u;
    }
  }
}

TEST(Prototype, NamedExamples) {
  EXPECT_EQ(prototype_set(parse_digits("2")).constraints(),
            std::vector<GenCircle>{GenCircle::outside(GaussRat(-1), 1, true)});
  EXPECT_EQ(prototype_set(parse_digits("-2")).constraints(),
            std::vector<GenCircle>{GenCircle::outside(GaussRat(1), 1, false)});
  for (const auto& b : digits_up_to(6))
    if (b.norm() >= 8) {
      EXPECT_TRUE(prototype_set(DigitSeq({b})).is_square()) << b;
    }
}

TEST(Prototype, FullnessAgreesWithNormCriterion) {
  for (const auto& b : digits_up_to(6)) {
    bool region_full = prototype_child(Region::square(), b).is_square();
    EXPECT_EQ(region_full, b.norm() >= 8) << b;
    EXPECT_EQ(is_full(DigitSeq({b})) == Fullness::Full, b.norm() >= 8) << b;
  }
  EXPECT_EQ(is_full(parse_digits("3")), Fullness::Full);
  EXPECT_EQ(is_full(parse_digits("2")), Fullness::NotFull);
  EXPECT_EQ(is_full(parse_digits("2+2i")), Fullness::Full);
  EXPECT_EQ(is_full(parse_digits("3,3,3,3,3,3")), Fullness::Full);
}

TEST(Prototype, FastPathsAgreeWithRegions) {
  auto set = digits_up_to(4);
  for (const auto& a : set)
    for (const auto& b : set) {
      DigitSeq s({a, b});
      bool region_full = prototype_child(prototype_child(Region::square(), a), b).is_square();
      ASSERT_EQ(is_full(s) == Fullness::Full, region_full) << s;
    }
}

TEST(Prototype, MemoSoundness) {
  // recompute without the automaton and compare after appending suffixes
  auto set = digits_up_to(3);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<size_t> pick(0, set.size() - 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<GaussInt> d;
    Region r = Region::square();
    size_t len = 1 + i % 4;
    for (size_t k = 0; k < len; ++k) {
      d.push_back(set[pick(rng)]);
      r = prototype_child(r, d.back());
    }
    EXPECT_EQ(prototype_set(DigitSeq(d)), r);
  }
}

TEST(Admissible, RealCriterionAndRegions) {
  EXPECT_EQ(is_admissible(parse_digits("2,-2")), Tri::No);
  EXPECT_EQ(is_admissible(parse_digits("2,2")), Tri::Yes);
  EXPECT_EQ(is_admissible(parse_digits("3,-2")), Tri::Yes);
  for (const auto& b : digits_up_to(5)) EXPECT_EQ(is_admissible(DigitSeq({b})), Tri::Yes);
  // the region engine agrees with the real pattern criterion
  std::vector<std::int64_t> r = {-4, -3, -2, 2, 3, 4};
  int decided = 0;
  for (auto a : r)
    for (auto b : r)
      for (auto c : r) {
        DigitSeq s = DigitSeq::real({a, b, c});
        Region p = prototype_set(s);
        RegionAnalysis an = analyze(p, 8, false);
        bool adm = admissible_real(s);
        if (an.nonempty == Tri::Unknown) continue;
        ++decided;
        EXPECT_EQ(an.nonempty == Tri::Yes, adm) << s;
      }
  EXPECT_GT(decided, 150);
}

TEST(Metrics, SingleDigitThree) {
  CylinderMetrics m = cylinder_metrics(parse_digits("3"), true, 6);
  EXPECT_TRUE(m.diameter_certified);
  EXPECT_LE(m.diameter.hi, Rational(2, 9));
  EXPECT_GT(m.c0_sample, 0);
  ASSERT_TRUE(m.area.has_value());
  RatInterval pi = pi_bounds(64);
  EXPECT_LE(m.area->hi, pi.hi / 81);
  EXPECT_GT(m.area->lo, 0);
}

TEST(Metrics, EmptySequence) {
  CylinderMetrics m = cylinder_metrics(DigitSeq(), true, 2);
  EXPECT_LE(m.diameter.hi * m.diameter.hi, Rational(2) * (1 + Rational(1, 1000000)));
  EXPECT_EQ(m.area->lo, 1);
  EXPECT_EQ(m.area->hi, 1);
}

TEST(Metrics, RegularCylindersSmall) {
  for (const auto& a : digits_up_to(3))
    for (const auto& b : digits_up_to(3)) {
      DigitSeq s({a, b});
      if (is_regular(s) != Tri::Yes) continue;
      CylinderMetrics m = cylinder_metrics(s);
      EXPECT_TRUE(m.diameter_certified) << s;
      EXPECT_GT(m.diameter.lo, 0) << s;
    }
}

TEST(Separation, FullCylinder) {
  EXPECT_TRUE(full_cylinder_separation_check(parse_digits("3"), GaussRat(Rational(-1, 4))));
  EXPECT_TRUE(full_cylinder_separation_check(parse_digits("4"), GaussRat(Rational(-2, 5), Rational(2, 5))));
  EXPECT_THROW(full_cylinder_separation_check(parse_digits("3"), GaussRat(Rational(1, 3))), Error);
  EXPECT_THROW(full_cylinder_separation_check(parse_digits("2"), GaussRat(Rational(-1, 4))), Error);
}

TEST(Separation, RandomOutsidePoints) {
  std::mt19937_64 rng(12);
  auto set = digits_up_to(4);
  for (int i = 0; i < 2000; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 5000);
    DigitSeq u({set[i % set.size()], GaussInt(3)});
    if (is_full(u) != Fullness::Full || in_cylinder(u, z)) continue;
    ASSERT_TRUE(full_cylinder_separation_check(u, z)) << u << " " << z;
  }
}

TEST(GenCircle, BoxPredicatesMatchRationalExtremes) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> co(-40, 40), lvl(0, 6);
  for (int it = 0; it < 4000; ++it) {
    GenCircle g(BigInt(co(rng) / 4), GaussInt(co(rng), co(rng)), BigInt(co(rng)), rng() % 2);
    int L = lvl(rng);
    long n = 1L << L;
    std::uniform_int_distribution<long> cell(0, n - 1);
    long i = cell(rng), j = cell(rng);
    Rect r{Rational(i, n) - Rational(1, 2), Rational(i + 1, n) - Rational(1, 2), Rational(j, n) - Rational(1, 2),
           Rational(j + 1, n) - Rational(1, 2)};
    Extreme s = g.sup(r), f = g.inf(r);
    bool every = s.value < 0 || (s.value == 0 && (!g.strict() || !s.attained));
    bool none = f.value > 0 || (f.value == 0 && (g.strict() || !f.attained));
    ASSERT_EQ(g.holds_everywhere(r), every) << g << " level " << L;
    ASSERT_EQ(g.holds_nowhere(r), none) << g << " level " << L;
  }
}
