#pragma once

#include <array>
#include <tuple>

#include "hcf/disk.hpp"

namespace hcf {

// Axis-aligned half-open box [x0, x1) x [y0, y1).
struct Rect {
  Rational x0, x1, y0, y1;

  static Rect unit_square() { return {Rational(-1, 2), Rational(1, 2), Rational(-1, 2), Rational(1, 2)}; }
  bool contains(const GaussRat& z) const { return z.re() >= x0 && z.re() < x1 && z.im() >= y0 && z.im() < y1; }
  GaussRat center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  GaussRat corner() const { return {x0, y0}; }
  Rational width() const { return x1 - x0; }
  Rational area() const { return (x1 - x0) * (y1 - y0); }
  std::array<Rect, 4> split() const {
    Rational xm = (x0 + x1) / 2, ym = (y0 + y1) / 2;
    return {Rect{x0, xm, y0, ym}, Rect{xm, x1, y0, ym}, Rect{x0, xm, ym, y1}, Rect{xm, x1, ym, y1}};
  }
};

// Extreme value of a function over a set, and whether some point attains it.
struct Extreme {
  Rational value;
  bool attained;
  Rational at;  // a maximizer or minimizer when attained
};

inline Extreme quad_extreme(const BigInt& A, const BigInt& P, const Rational& lo, const Rational& hi, bool want_max) {
  auto g = [&](const Rational& t) { return Rational(A) * t * t + Rational(P) * t; };
  Extreme best{g(lo), true, lo};
  auto consider = [&](const Rational& v, bool att, const Rational& at) {
    bool better = want_max ? v > best.value : v < best.value;
    if (better) best = {v, att, at};
    else if (v == best.value && att && !best.attained) best = {v, true, at};
  };
  consider(g(hi), false, hi);
  bool curved = want_max ? A < 0 : A > 0;
  if (curved) {
    Rational v = Rational(-P) / (2 * Rational(A));
    if (v > lo && v < hi) consider(g(v), true, v);
  }
  return best;
}

// Generalized circle constraint A|z|^2 + Re(conj(B) z) + C  <= 0  (or < 0 when strict), integer data.
class GenCircle {
 public:
  enum class Side { InteriorClosed, InteriorOpen, ExteriorClosed, ExteriorOpen };

  GenCircle() = default;
  GenCircle(BigInt A, GaussInt B, BigInt C, bool strict) : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), strict_(strict) {
    normalize();
  }

  static GenCircle from_rational(const Rational& A, const GaussRat& B, const Rational& C, bool strict) {
    BigInt l = 1;
    for (const Rational* r : {&A, &B.re(), &B.im(), &C}) l = boost::multiprecision::lcm(l, denom(*r));
    auto I = [&](const Rational& r) { return BigInt(numer(r) * (l / denom(r))); };
    return GenCircle(I(A), GaussInt(I(B.re()), I(B.im())), I(C), strict);
  }

  // |z - c|^2 < r2 (strict) or <= r2
  static GenCircle disk(const GaussRat& c, const Rational& r2, bool strict) {
    return from_rational(1, GaussRat(-2) * c, c.norm_sq() - r2, strict);
  }
  // |z - c|^2 > r2 (strict) or >= r2
  static GenCircle outside(const GaussRat& c, const Rational& r2, bool strict) {
    return from_rational(-1, GaussRat(2) * c, r2 - c.norm_sq(), strict);
  }
  // Re(conj(n) z) + C <= 0 or < 0
  static GenCircle half_plane(const GaussRat& n, const Rational& C, bool strict) { return from_rational(0, n, C, strict); }

  // The four edges of the fundamental square as constraints.
  static std::array<GenCircle, 4> square_edges() {
    Rational h(1, 2);
    return {half_plane(GaussRat(-1), -h, false), half_plane(GaussRat(1), -h, true),
            half_plane(GaussRat(0, -1), -h, false), half_plane(GaussRat(0, 1), -h, true)};
  }

  const BigInt& A() const { return A_; }
  const GaussInt& B() const { return B_; }
  const BigInt& C() const { return C_; }
  bool strict() const { return strict_; }
  bool is_line() const { return A_ == 0; }

  Rational value(const GaussRat& z) const {
    return Rational(A_) * z.norm_sq() + Rational(B_.re) * z.re() + Rational(B_.im) * z.im() + Rational(C_);
  }
  bool holds(const GaussRat& z) const {
    Rational v = value(z);
    return strict_ ? v < 0 : v <= 0;
  }

  GenCircle negation() const { return GenCircle(-A_, -B_, -C_, !strict_); }

  // Constraint on z obtained by substituting w = M(z) and multiplying by |cz + d|^2.
  GenCircle pullback(const MobiusMap& M) const {
    const GaussInt &a = M.a, &b = M.b, &c = M.c, &d = M.d;
    GaussInt Bc = B_.conj();
    auto re = [](const GaussInt& g) { return g.re; };
    BigInt A2 = A_ * a.norm() + re(Bc * a * c.conj()) + C_ * c.norm();
    GaussInt B2 = GaussInt(2 * A_) * a.conj() * b + B_ * a.conj() * d + Bc * b * c.conj() + GaussInt(2 * C_) * c.conj() * d;
    BigInt C2 = A_ * b.norm() + re(Bc * b * d.conj()) + C_ * d.norm();
    return GenCircle(A2, B2, C2, strict_);
  }
  // Image constraint under z -> M(z).
  GenCircle push(const MobiusMap& M) const { return pullback(M.inverse()); }

  // Extremes over a box.
  Extreme sup(const Rect& r) const { return extreme(r, true); }
  Extreme inf(const Rect& r) const { return extreme(r, false); }
  bool holds_everywhere(const Rect& r) const {
    int sg;
    bool att;
    if (fast_sign(r, true, sg, att)) return sg < 0 || (sg == 0 && (!strict_ || !att));
    Extreme s = sup(r);
    return s.value < 0 || (s.value == 0 && (!strict_ || !s.attained));
  }
  bool holds_nowhere(const Rect& r) const {
    int sg;
    bool att;
    if (fast_sign(r, false, sg, att)) return sg > 0 || (sg == 0 && (strict_ || !att));
    Extreme s = inf(r);
    return s.value > 0 || (s.value == 0 && (strict_ || !s.attained));
  }

  Side side() const {
    bool ext = A_ < 0;
    if (ext) return strict_ ? Side::ExteriorOpen : Side::ExteriorClosed;
    return strict_ ? Side::InteriorOpen : Side::InteriorClosed;
  }
  static const char* side_name(Side s) {
    switch (s) {
      case Side::InteriorClosed: return "interior_closed";
      case Side::InteriorOpen: return "interior_open";
      case Side::ExteriorClosed: return "exterior_closed";
      case Side::ExteriorOpen: return "exterior_open";
    }
    return "?";
  }
  // center and squared radius for proper circles
  GaussRat center() const { return GaussRat(Rational(-B_.re, 2 * A_), Rational(-B_.im, 2 * A_)); }
  Rational radius_sq() const {
    return Rational(B_.norm(), 4 * A_ * A_) - Rational(C_, A_);
  }

  auto tie() const { return std::tie(A_, B_.re, B_.im, C_, strict_); }
  friend bool operator==(const GenCircle& x, const GenCircle& y) { return x.tie() == y.tie(); }
  friend bool operator!=(const GenCircle& x, const GenCircle& y) { return !(x == y); }
  friend bool operator<(const GenCircle& x, const GenCircle& y) { return x.tie() < y.tie(); }

  std::string str() const {
    std::string s = A_.str() + "|z|^2 + Re((" + format_gauss(B_.conj()) + ")z) + " + C_.str() + (strict_ ? " < 0" : " <= 0");
    return s;
  }

 private:
  void normalize() {
    BigInt g = 0;
    for (const BigInt* v : {&A_, &B_.re, &B_.im, &C_}) g = boost::multiprecision::gcd(g, *v);
    if (g == 0) fail(Errc::InvalidArgument, "degenerate constraint");
    if (g != 1) {
      A_ /= g;
      B_.re /= g;
      B_.im /= g;
      C_ /= g;
    }
  }

  // Sign of the extreme over a box with small data and dyadic corners, in 128-bit integers.
  bool fast_sign(const Rect& r, bool want_max, int& sign, bool& attained) const {
    using i128 = __int128;
    auto small = [](const BigInt& v, long lim) {
      return mpz_sizeinbase(v.backend().data(), 2) <= static_cast<size_t>(lim);
    };
    if (!small(A_, 30) || !small(B_.re, 30) || !small(B_.im, 30) || !small(C_, 30)) return false;
    // corners as X / 2^E
    long E = 0;
    std::int64_t num[4];
    long ex[4];
    const Rational* cs[4] = {&r.x0, &r.x1, &r.y0, &r.y1};
    for (int i = 0; i < 4; ++i) {
      const mpq_t& q = cs[i]->backend().data();
      if (!mpz_fits_slong_p(mpq_numref(q)) || !mpz_fits_slong_p(mpq_denref(q))) return false;
      unsigned long d = mpz_get_ui(mpq_denref(q));
      if (d & (d - 1)) return false;
      ex[i] = __builtin_ctzl(d);
      num[i] = mpz_get_si(mpq_numref(q));
      if (ex[i] > 16 || std::llabs(num[i]) > (1L << 20)) return false;
      E = std::max(E, ex[i]);
    }
    i128 X[4];
    for (int i = 0; i < 4; ++i) X[i] = static_cast<i128>(num[i]) << (E - ex[i]);
    i128 D = static_cast<i128>(1) << E;
    i128 A = A_.convert_to<long long>(), C = C_.convert_to<long long>();
    i128 P[2] = {B_.re.convert_to<long long>(), B_.im.convert_to<long long>()};
    // values scaled by D^2 * w with w = 4|A| (or 1 for lines), so the vertex value is an integer
    i128 w = A == 0 ? 1 : 4 * (A < 0 ? -A : A);
    i128 total = C * D * D * w;
    bool att = true;
    for (int ax = 0; ax < 2; ++ax) {
      i128 lo = X[2 * ax], hi = X[2 * ax + 1], p = P[ax];
      auto g = [&](i128 t) { return w * (A * t * t + p * t * D); };
      i128 best = g(lo);
      bool batt = true;
      auto consider = [&](i128 v, bool a) {
        bool better = want_max ? v > best : v < best;
        if (better) {
          best = v;
          batt = a;
        } else if (v == best && a && !batt) {
          batt = true;
        }
      };
      consider(g(hi), false);
      bool curved = want_max ? A < 0 : A > 0;
      if (curved) {
        // vertex t* = -p D / (2A) strictly inside (lo, hi)
        i128 num_v = -p * D, two_a = 2 * A;
        bool inside = A > 0 ? (two_a * lo < num_v && num_v < two_a * hi) : (two_a * lo > num_v && num_v > two_a * hi);
        if (inside) consider(A > 0 ? -p * p * D * D : p * p * D * D, true);
      }
      total += best;
      att = att && batt;
    }
    sign = total > 0 ? 1 : (total < 0 ? -1 : 0);
    attained = att;
    return true;
  }

  Extreme extreme(const Rect& r, bool want_max) const {
    Extreme ex = quad_extreme(A_, B_.re, r.x0, r.x1, want_max);
    Extreme ey = quad_extreme(A_, B_.im, r.y0, r.y1, want_max);
    return {ex.value + ey.value + Rational(C_), ex.attained && ey.attained, 0};
  }

  BigInt A_{0};
  GaussInt B_{0};
  BigInt C_{0};
  bool strict_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const GenCircle& c) { return os << c.str(); }

}  // namespace hcf
