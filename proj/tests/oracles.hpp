#pragma once

// Independent reference computations used by the tests. These deliberately avoid the
// library's fast paths: plain loops, nested fractions and brute force.

#include <cstdint>
#include <random>
#include <vector>

#include "hcf/exact.hpp"

namespace oracle {

using hcf::BigInt;
using hcf::GaussInt;
using hcf::GaussRat;
using hcf::Rational;

inline BigInt floor_rat(const Rational& r) {
  BigInt n = hcf::numer(r), d = hcf::denom(r);
  BigInt q = n / d;
  if (q * d > n) q -= 1;
  return q;
}

// Iterate T(z) = 1/z - [1/z] on exact rationals.
inline std::vector<GaussInt> expand(GaussRat z, size_t max_depth = 1000) {
  std::vector<GaussInt> out;
  while (!z.is_zero() && out.size() < max_depth) {
    Rational n = z.norm_sq();
    GaussRat w(z.re() / n, -z.im() / n);
    GaussInt a{floor_rat(w.re() + Rational(1, 2)), floor_rat(w.im() + Rational(1, 2))};
    out.push_back(a);
    z = w - GaussRat(a);
  }
  return out;
}

// [0; a_1, ..., a_n] from the outside in, via the forward recursion on 2x2 products.
inline GaussRat evaluate(const std::vector<GaussInt>& a) {
  GaussRat v(0);
  for (size_t i = a.size(); i-- > 0;) v = GaussRat(1) / (GaussRat(a[i]) + v);
  return v;
}

inline std::int64_t lattice_count(std::int64_t r2) {
  std::int64_t c = 0;
  std::int64_t r = 0;
  while ((r + 1) * (r + 1) <= r2) ++r;
  for (std::int64_t x = -r; x <= r; ++x)
    for (std::int64_t y = -r; y <= r; ++y)
      if (x * x + y * y <= r2) ++c;
  return c;
}

// Random rational point of the fundamental square with denominators up to `den`.
inline GaussRat random_point(std::mt19937_64& rng, std::int64_t den) {
  std::uniform_int_distribution<std::int64_t> dd(1, den);
  std::int64_t d1 = dd(rng), d2 = dd(rng);
  std::uniform_int_distribution<std::int64_t> n1(-d1, d1 - 1), n2(-d2, d2 - 1);
  // numerators in [-d, d) scaled by 1/2 keep the point in [-1/2, 1/2)
  return GaussRat(Rational(n1(rng), 2 * d1), Rational(n2(rng), 2 * d2));
}

// Random point x/d with a Gaussian integer denominator of norm <= max_norm.
inline GaussRat random_gauss_fraction(std::mt19937_64& rng, std::int64_t max_norm) {
  std::int64_t r = 1;
  while ((r + 1) * (r + 1) <= max_norm) ++r;
  std::uniform_int_distribution<std::int64_t> u(-r, r);
  while (true) {
    GaussInt d(u(rng), u(rng));
    if (d.is_zero() || d.norm() > max_norm) continue;
    GaussInt x(u(rng), u(rng));
    GaussRat z = GaussRat::fraction(x, d);
    GaussRat w = z - GaussRat(GaussInt(floor_rat(z.re() + Rational(1, 2)), floor_rat(z.im() + Rational(1, 2))));
    return w;
  }
}

}  // namespace oracle
