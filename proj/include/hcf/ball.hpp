#pragma once

#include "hcf/disk.hpp"

namespace hcf {

// mant * 2^exp
struct Dyadic {
  BigInt mant{0};
  long exp{0};

  Rational to_rational() const {
    if (exp >= 0) return Rational(mant << static_cast<unsigned>(exp));
    return Rational(mant, pow2(static_cast<unsigned>(-exp)));
  }

  enum class Round { Down, Up, Nearest };

  static Dyadic from_rational(const Rational& q, unsigned prec, Round mode) {
    Rational scaled = q * Rational(pow2(prec));
    BigInt m;
    switch (mode) {
      case Round::Down: m = floor(scaled); break;
      case Round::Up: m = ceil(scaled); break;
      case Round::Nearest: m = floor(scaled + Rational(1, 2)); break;
    }
    return {m, -static_cast<long>(prec)};
  }
};

class ComplexBall {
 public:
  ComplexBall() = default;

  // Ball containing the closed disk |z - center| <= radius, center rounded to 2^-prec.
  ComplexBall(const GaussRat& center, const Rational& radius, unsigned prec) : prec_(prec) {
    if (radius < 0) fail(Errc::InvalidArgument, "negative ball radius");
    re_ = Dyadic::from_rational(center.re(), prec, Dyadic::Round::Nearest);
    im_ = Dyadic::from_rational(center.im(), prec, Dyadic::Round::Nearest);
    GaussRat shift = this->center() - center;
    Rational err = shift.is_zero() ? Rational(0) : abs_bounds(shift).hi;
    rad_ = Dyadic::from_rational(radius + err, prec + 8, Dyadic::Round::Up);
  }

  static ComplexBall exact(const GaussRat& z, unsigned prec = 64) { return ComplexBall(z, 0, prec); }

  static ComplexBall from_disk(const Disk& d, unsigned prec) {
    Rational r = d.radius_sq == 0 ? Rational(0) : sqrt_bounds(d.radius_sq, prec + 8).hi;
    return ComplexBall(d.center, r, prec);
  }

  GaussRat center() const { return {re_.to_rational(), im_.to_rational()}; }
  Rational radius() const { return rad_.to_rational(); }
  unsigned precision() const { return prec_; }
  Disk disk() const {
    Rational r = radius();
    return {center(), r * r};
  }

  bool contains(const GaussRat& z) const { return disk().contains(z); }
  bool contains_zero() const { return disk().contains_zero(); }
  bool is_exact() const { return rad_.mant == 0; }

  ComplexBall operator-() const { return from_parts(-center(), radius(), prec_); }
  friend ComplexBall operator+(const ComplexBall& x, const ComplexBall& y) {
    return from_parts(x.center() + y.center(), x.radius() + y.radius(), std::max(x.prec_, y.prec_));
  }
  friend ComplexBall operator-(const ComplexBall& x, const ComplexBall& y) {
    return from_parts(x.center() - y.center(), x.radius() + y.radius(), std::max(x.prec_, y.prec_));
  }
  friend ComplexBall operator*(const ComplexBall& x, const ComplexBall& y) {
    unsigned p = std::max(x.prec_, y.prec_);
    GaussRat c = x.center() * y.center();
    Rational rx = x.radius(), ry = y.radius();
    Rational r = abs_bounds(x.center(), p).hi * ry + abs_bounds(y.center(), p).hi * rx + rx * ry;
    return ComplexBall(c, r, p);
  }
  ComplexBall inverse() const {
    if (contains_zero()) fail(Errc::BallContainsZero, "inverse of a ball containing 0");
    return from_disk(MobiusMap::inversion().image(disk()), prec_);
  }
  friend ComplexBall operator/(const ComplexBall& x, const ComplexBall& y) { return x * y.inverse(); }

  std::string str() const { return "{" + center().str() + " +/- " + radius().str() + "}"; }

 private:
  static ComplexBall from_parts(const GaussRat& c, const Rational& r, unsigned prec) {
    return ComplexBall(c, r, prec);
  }

  Dyadic re_, im_, rad_;
  unsigned prec_{64};
};

// Certified nearest Gaussian integer of every point of the disk, if unique.
inline bool try_nearest_gauss_int(const Disk& d, GaussInt& out) {
  RatInterval r = sqrt_bounds(d.radius_sq);
  auto axis = [&](const Rational& c, BigInt& k) {
    Rational lo = c - r.hi, hi = c + r.hi;
    k = floor(lo + Rational(1, 2));
    return hi < Rational(k) + Rational(1, 2);
  };
  BigInt kr, ki;
  if (!axis(d.center.re(), kr) || !axis(d.center.im(), ki)) return false;
  out = {kr, ki};
  return true;
}

inline GaussInt nearest_gauss_int(const ComplexBall& z) {
  if (z.is_exact()) return nearest_gauss_int(z.center());
  GaussInt g;
  if (!try_nearest_gauss_int(z.disk(), g)) fail(Errc::AmbiguousRounding, "ball straddles a rounding boundary");
  return g;
}

enum class Tri { No, Yes, Unknown };

// Yes: the whole disk lies in the fundamental square; No: it lies entirely outside.
inline Tri disk_in_fundamental_domain(const Disk& d) {
  Rational r = d.radius_sq == 0 ? Rational(0) : sqrt_bounds(d.radius_sq).hi;
  const Rational h(1, 2);
  auto axis = [&](const Rational& c) {
    Rational lo = c - r, hi = c + r;
    if (lo >= -h && hi < h) return Tri::Yes;
    if (hi < -h || lo >= h) return Tri::No;
    return Tri::Unknown;
  };
  Tri a = axis(d.center.re()), b = axis(d.center.im());
  if (a == Tri::No || b == Tri::No) return Tri::No;
  if (a == Tri::Yes && b == Tri::Yes) return Tri::Yes;
  return Tri::Unknown;
}

// Enclosure of pi from Machin's formula.
inline RatInterval pi_bounds(unsigned bits) {
  auto arctan_inv = [&](long x) -> RatInterval {
    Rational x2 = Rational(x) * x;
    Rational term = Rational(1, x);
    Rational sum = 0;
    Rational eps(1, pow2(bits + 8));
    for (long k = 0;; ++k) {
      Rational t = term / (2 * k + 1);
      if (t < eps) {
        // alternating series with decreasing terms: remainder bounded by the first omitted term
        return k % 2 == 0 ? RatInterval(sum, sum + t) : RatInterval(sum - t, sum);
      }
      sum += (k % 2 == 0) ? t : Rational(-t);
      term /= x2;
    }
  };
  RatInterval a = arctan_inv(5), b = arctan_inv(239);
  return {16 * a.lo - 4 * b.hi, 16 * a.hi - 4 * b.lo};
}

inline ComplexBall pi_ball(unsigned bits) {
  RatInterval p = pi_bounds(bits);
  return ComplexBall(GaussRat(p.mid()), p.width() / 2, bits);
}

}  // namespace hcf
