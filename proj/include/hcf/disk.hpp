#pragma once

#include "hcf/exact.hpp"

namespace hcf {

// Closed disk |z - center|^2 <= radius_sq with exact rational data.
struct Disk {
  GaussRat center;
  Rational radius_sq{0};

  bool contains(const GaussRat& z) const { return (z - center).norm_sq() <= radius_sq; }
  bool contains_strictly(const GaussRat& z) const { return (z - center).norm_sq() < radius_sq; }
  // Upper bound on the radius.
  Rational radius_hi(unsigned bits = 64) const { return sqrt_bounds(radius_sq, bits).hi; }
  Rational radius_lo(unsigned bits = 64) const { return sqrt_bounds(radius_sq, bits).lo; }
  bool contains_zero() const { return center.norm_sq() <= radius_sq; }
};

// Bounds on |z| over the disk; lo clamps at zero.
inline RatInterval modulus_bounds(const Disk& d, unsigned bits = 64) {
  RatInterval c = abs_bounds(d.center, bits);
  RatInterval r = sqrt_bounds(d.radius_sq, bits);
  Rational lo = c.lo - r.hi;
  if (lo < 0) lo = 0;
  return {lo, c.hi + r.hi};
}

// z |-> (a z + b) / (c z + d)
struct MobiusMap {
  GaussInt a{1}, b{0}, c{0}, d{1};

  static MobiusMap identity() { return {}; }
  static MobiusMap inversion() { return {GaussInt(0), GaussInt(1), GaussInt(1), GaussInt(0)}; }
  static MobiusMap translation(const GaussInt& t) { return {GaussInt(1), t, GaussInt(0), GaussInt(1)}; }

  GaussInt det() const { return a * d - b * c; }

  // Adjugate; inverse up to the scalar det.
  MobiusMap inverse() const { return {d, -b, -c, a}; }

  friend MobiusMap operator*(const MobiusMap& f, const MobiusMap& g) {
    return {f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d, f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d};
  }
  friend bool operator==(const MobiusMap& f, const MobiusMap& g) {
    return f.a == g.a && f.b == g.b && f.c == g.c && f.d == g.d;
  }

  bool is_pole(const GaussRat& z) const { return (GaussRat(c) * z + GaussRat(d)).is_zero(); }

  GaussRat apply(const GaussRat& z) const {
    GaussRat den = GaussRat(c) * z + GaussRat(d);
    if (den.is_zero()) fail(Errc::DivisionByZero, "Mobius map evaluated at its pole");
    return (GaussRat(a) * z + GaussRat(b)) / den;
  }

  // Exact image of a closed disk; the pole must lie outside the disk.
  Disk image(const Disk& disk) const {
    GaussRat A(a), C(c);
    GaussRat B = A * disk.center + GaussRat(b);
    GaussRat D = C * disk.center + GaussRat(d);
    Rational denom_ = D.norm_sq() - C.norm_sq() * disk.radius_sq;
    if (denom_ <= 0) fail(Errc::BallContainsZero, "disk contains the pole of the map");
    GaussRat center = (B * D.conj() - A * C.conj() * GaussRat(disk.radius_sq)) / GaussRat(denom_);
    Rational det_n = det().norm();
    Rational rsq = disk.radius_sq * det_n / (denom_ * denom_);
    return {center, rsq};
  }
};

}  // namespace hcf
