#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "hcf/error.hpp"

namespace hcf {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

template <class Int>
Int floor_div(const Int& a, const Int& b) {
  if (b == 0) fail(Errc::DivisionByZero, "floor_div");
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

template <class Int>
Int ceil_div(const Int& a, const Int& b) {
  return -floor_div<Int>(-a, b);
}

inline BigInt numer(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denom(const Rational& r) { return boost::multiprecision::denominator(r); }
inline BigInt floor(const Rational& r) { return floor_div<BigInt>(numer(r), denom(r)); }
inline BigInt ceil(const Rational& r) { return ceil_div<BigInt>(numer(r), denom(r)); }
inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline BigInt isqrt(const BigInt& n) {
  if (n < 0) fail(Errc::InvalidArgument, "isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

inline BigInt pow2(unsigned e) { return BigInt(1) << e; }

inline BigInt ipow(BigInt b, unsigned e) {
  BigInt r = 1;
  while (e) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline Rational rpow(const Rational& b, int e) {
  if (e < 0) {
    if (b == 0) fail(Errc::DivisionByZero, "rpow");
    return Rational(1) / rpow(b, -e);
  }
  return Rational(ipow(numer(b), static_cast<unsigned>(e)), ipow(denom(b), static_cast<unsigned>(e)));
}

// Approximate base-2 logarithm of |r|, for magnitude decisions only.
inline long approx_log2(const Rational& r) {
  if (r == 0) return 0;
  BigInt n = numer(r);
  if (n < 0) n = -n;
  return static_cast<long>(boost::multiprecision::msb(n)) -
         static_cast<long>(boost::multiprecision::msb(denom(r)));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

inline std::string str(const BigInt& n) { return n.str(); }
inline std::string str(const Rational& r) { return r.str(); }

inline std::string trim(std::string_view s);

// Accepts "n", "-n", "p/q", and finite decimals like "0.25" or "-1.5e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) fail(Errc::ParseError, "empty rational");
  auto slash = s.find('/');
  auto parse_int = [&](const std::string& t) -> BigInt {
    if (t.empty()) fail(Errc::ParseError, "bad integer in '" + s + "'");
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) fail(Errc::ParseError, "bad integer in '" + s + "'");
    for (size_t j = i; j < t.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(t[j]))) fail(Errc::ParseError, "bad integer in '" + s + "'");
    std::string digits = t.substr(i);
    size_t nz = digits.find_first_not_of('0');
    BigInt v(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    return t[0] == '-' ? BigInt(-v) : v;
  };
  if (slash != std::string::npos) {
    BigInt n = parse_int(trim(s.substr(0, slash)));
    BigInt d = parse_int(trim(s.substr(slash + 1)));
    if (d == 0) fail(Errc::DivisionByZero, "rational with zero denominator");
    return Rational(n, d);
  }
  std::string mant = s;
  long exp10 = 0;
  auto e = s.find_first_of("eE");
  if (e != std::string::npos) {
    mant = s.substr(0, e);
    exp10 = static_cast<long>(parse_int(s.substr(e + 1)).convert_to<long long>());
  }
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    std::string frac = mant.substr(dot + 1);
    mant = mant.substr(0, dot) + frac;
    exp10 -= static_cast<long>(frac.size());
    if (mant == "-" || mant == "+" || mant.empty()) fail(Errc::ParseError, "bad decimal '" + s + "'");
  }
  Rational v = parse_int(mant);
  if (exp10 > 0) v *= Rational(ipow(10, static_cast<unsigned>(exp10)));
  if (exp10 < 0) v /= Rational(ipow(10, static_cast<unsigned>(-exp10)));
  return v;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

template <class Int>
struct basic_gauss_int {
  Int re{0};
  Int im{0};

  basic_gauss_int() = default;
  basic_gauss_int(Int r) : re(std::move(r)), im(0) {}
  basic_gauss_int(Int r, Int i) : re(std::move(r)), im(std::move(i)) {}
  template <class T, class = std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, Int>>>
  basic_gauss_int(T r, T i = 0) : re(r), im(i) {}

  Int norm() const { return re * re + im * im; }
  basic_gauss_int conj() const { return {re, -im}; }
  bool is_zero() const { return re == 0 && im == 0; }
  bool is_unit() const { return norm() == 1; }

  basic_gauss_int operator-() const { return {-re, -im}; }
  basic_gauss_int& operator+=(const basic_gauss_int& o) { re += o.re; im += o.im; return *this; }
  basic_gauss_int& operator-=(const basic_gauss_int& o) { re -= o.re; im -= o.im; return *this; }
  basic_gauss_int& operator*=(const basic_gauss_int& o) { return *this = *this * o; }

  friend basic_gauss_int operator+(basic_gauss_int a, const basic_gauss_int& b) { return a += b; }
  friend basic_gauss_int operator-(basic_gauss_int a, const basic_gauss_int& b) { return a -= b; }
  friend basic_gauss_int operator*(const basic_gauss_int& a, const basic_gauss_int& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const basic_gauss_int& a, const basic_gauss_int& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const basic_gauss_int& a, const basic_gauss_int& b) { return !(a == b); }
};

using GaussInt = basic_gauss_int<BigInt>;
using GaussInt64 = basic_gauss_int<std::int64_t>;

inline GaussInt widen(const GaussInt64& g) { return {BigInt(g.re), BigInt(g.im)}; }
inline GaussInt64 narrow(const GaussInt& g) {
  return {g.re.convert_to<std::int64_t>(), g.im.convert_to<std::int64_t>()};
}

// Digit order: norm, then (re, im) lexicographic.
template <class Int>
bool digit_less(const basic_gauss_int<Int>& a, const basic_gauss_int<Int>& b) {
  Int na = a.norm(), nb = b.norm();
  if (na != nb) return na < nb;
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

struct GaussLess {
  template <class Int>
  bool operator()(const basic_gauss_int<Int>& a, const basic_gauss_int<Int>& b) const {
    return digit_less(a, b);
  }
};

// round(x / n) with ties going up, i.e. floor((2x + n) / (2n)), for n > 0.
template <class Int>
Int round_div(const Int& x, const Int& n) {
  return floor_div<Int>(2 * x + n, 2 * n);
}

// Nearest Gaussian integer to a/b under the half-open convention.
template <class Int>
basic_gauss_int<Int> nearest_quotient(const basic_gauss_int<Int>& a, const basic_gauss_int<Int>& b) {
  Int n = b.norm();
  if (n == 0) fail(Errc::DivisionByZero, "nearest_quotient");
  basic_gauss_int<Int> t = a * b.conj();
  return {round_div(t.re, n), round_div(t.im, n)};
}

template <class Int>
bool divides(const basic_gauss_int<Int>& d, const basic_gauss_int<Int>& a) {
  if (d.is_zero()) return a.is_zero();
  basic_gauss_int<Int> t = a * d.conj();
  Int n = d.norm();
  return t.re % n == 0 && t.im % n == 0;
}

template <class Int>
basic_gauss_int<Int> exact_quotient(const basic_gauss_int<Int>& a, const basic_gauss_int<Int>& d) {
  Int n = d.norm();
  if (n == 0) fail(Errc::DivisionByZero, "exact_quotient");
  basic_gauss_int<Int> t = a * d.conj();
  if (t.re % n != 0 || t.im % n != 0) fail(Errc::InvalidArgument, "exact_quotient: not divisible");
  return {t.re / n, t.im / n};
}

template <class Int>
basic_gauss_int<Int> gauss_gcd(basic_gauss_int<Int> a, basic_gauss_int<Int> b) {
  while (!b.is_zero()) {
    basic_gauss_int<Int> r = a - nearest_quotient(a, b) * b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// g = x a + y b with g a gcd of a and b.
template <class Int>
void gauss_xgcd(basic_gauss_int<Int> a, basic_gauss_int<Int> b, basic_gauss_int<Int>& g, basic_gauss_int<Int>& x,
                basic_gauss_int<Int>& y) {
  basic_gauss_int<Int> x0{1, 0}, y0{0, 0}, x1{0, 0}, y1{1, 0};
  while (!b.is_zero()) {
    basic_gauss_int<Int> k = nearest_quotient(a, b);
    basic_gauss_int<Int> r = a - k * b;
    a = std::move(b);
    b = std::move(r);
    basic_gauss_int<Int> x2 = x0 - k * x1, y2 = y0 - k * y1;
    x0 = std::move(x1);
    y0 = std::move(y1);
    x1 = std::move(x2);
    y1 = std::move(y2);
  }
  g = a;
  x = x0;
  y = y0;
}

// Unit u with u*g in {re > 0, im >= 0}; g must be nonzero.
template <class Int>
basic_gauss_int<Int> normalizing_unit(const basic_gauss_int<Int>& g) {
  if (g.re > 0 && g.im >= 0) return {1, 0};
  if (g.re <= 0 && g.im > 0) return {0, -1};
  if (g.re < 0 && g.im <= 0) return {-1, 0};
  return {0, 1};
}

template <class Int>
std::string format_gauss(const basic_gauss_int<Int>& g) {
  auto s = [](const Int& v) {
    if constexpr (std::is_integral_v<Int>) return std::to_string(v);
    else return v.str();
  };
  if (g.im == 0) return s(g.re);
  std::string imag;
  Int a = g.im < 0 ? Int(-g.im) : g.im;
  imag = (a == 1) ? "i" : s(a) + "i";
  if (g.re == 0) return (g.im < 0 ? "-" : "") + imag;
  return s(g.re) + (g.im < 0 ? "-" : "+") + imag;
}

inline std::ostream& operator<<(std::ostream& os, const GaussInt& g) { return os << format_gauss(g); }

// Tokens: "a", "bi", "a+bi", "a-bi", "i", "-i"; optional surrounding parentheses.
inline GaussInt parse_gauss_int(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  if (s.empty()) fail(Errc::ParseError, "empty Gaussian integer");
  auto bad = [&]() { fail(Errc::ParseError, "bad Gaussian integer '" + std::string(text) + "'"); };
  auto parse_signed = [&](const std::string& t, bool allow_empty_mag) -> BigInt {
    size_t i = 0;
    bool neg = false;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) { neg = t[i] == '-'; ++i; }
    std::string mag = t.substr(i);
    if (mag.empty()) {
      if (!allow_empty_mag) bad();
      return neg ? BigInt(-1) : BigInt(1);
    }
    for (char c : mag)
      if (!std::isdigit(static_cast<unsigned char>(c))) bad();
    size_t nz = mag.find_first_not_of('0');
    BigInt v(nz == std::string::npos ? std::string("0") : mag.substr(nz));
    return neg ? BigInt(-v) : v;
  };
  if (s.back() != 'i') return {parse_signed(s, false), BigInt(0)};
  std::string body = s.substr(0, s.size() - 1);
  size_t split = std::string::npos;
  for (size_t j = body.size(); j-- > 1;)
    if (body[j] == '+' || body[j] == '-') { split = j; break; }
  if (split == std::string::npos) return {BigInt(0), parse_signed(body, true)};
  return {parse_signed(body.substr(0, split), false), parse_signed(body.substr(split), true)};
}

class GaussRat {
 public:
  GaussRat() = default;
  GaussRat(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}
  GaussRat(const GaussInt& g) : re_(g.re), im_(g.im) {}
  GaussRat(int v) : re_(v), im_(0) {}

  static GaussRat fraction(const GaussInt& num, const GaussInt& den) {
    BigInt n = den.norm();
    if (n == 0) fail(Errc::DivisionByZero, "Gaussian fraction with zero denominator");
    GaussInt t = num * den.conj();
    return {Rational(t.re, n), Rational(t.im, n)};
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  Rational norm_sq() const { return re_ * re_ + im_ * im_; }
  GaussRat conj() const { return {re_, -im_}; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_gauss_int() const { return denom(re_) == 1 && denom(im_) == 1; }

  GaussRat inverse() const {
    Rational n = norm_sq();
    if (n == 0) fail(Errc::DivisionByZero, "inverse of zero");
    return {re_ / n, -im_ / n};
  }

  GaussRat operator-() const { return {-re_, -im_}; }
  GaussRat& operator+=(const GaussRat& o) { re_ += o.re_; im_ += o.im_; return *this; }
  GaussRat& operator-=(const GaussRat& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
  GaussRat& operator/=(const GaussRat& o) { return *this = *this / o; }
  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) { return a * b.inverse(); }
  friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  // Reduced Gaussian fraction num/den with den in {re > 0, im >= 0}.
  std::pair<GaussInt, GaussInt> reduced() const {
    BigInt d = boost::multiprecision::lcm(denom(re_), denom(im_));
    GaussInt x{numer(re_) * (d / denom(re_)), numer(im_) * (d / denom(im_))};
    if (x.is_zero()) return {GaussInt(0), GaussInt(1)};
    GaussInt g = gauss_gcd(x, GaussInt(d));
    GaussInt n = exact_quotient(x, g), q = exact_quotient(GaussInt(d), g);
    GaussInt u = normalizing_unit(q);
    return {n * u, q * u};
  }
  GaussInt num() const { return reduced().first; }
  GaussInt den() const { return reduced().second; }

  GaussInt to_gauss_int() const {
    if (!is_gauss_int()) fail(Errc::InvalidArgument, "not a Gaussian integer");
    return {numer(re_), numer(im_)};
  }

  std::string str() const {
    auto [n, d] = reduced();
    if (d == GaussInt(1)) return format_gauss(n);
    auto tok = [](const GaussInt& g) {
      return (g.re != 0 && g.im != 0) ? "(" + format_gauss(g) + ")" : format_gauss(g);
    };
    return tok(n) + "/" + tok(d);
  }

  size_t hash() const {
    std::hash<std::string> h;
    return h(re_.str()) * 1000003u ^ h(im_.str());
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline std::ostream& operator<<(std::ostream& os, const GaussRat& z) { return os << z.str(); }

inline GaussRat parse_gauss_rat(std::string_view text) {
  std::string s = trim(text);
  int depth = 0;
  size_t slash = std::string::npos;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == '/' && depth == 0) {
      if (slash != std::string::npos) fail(Errc::ParseError, "bad Gaussian rational '" + s + "'");
      slash = i;
    }
  }
  if (slash == std::string::npos) return GaussRat(parse_gauss_int(s));
  GaussInt n = parse_gauss_int(s.substr(0, slash));
  GaussInt d = parse_gauss_int(s.substr(slash + 1));
  return GaussRat::fraction(n, d);
}

inline Rational nearest_integer(const Rational& x) { return Rational(floor(x + Rational(1, 2))); }

inline GaussInt nearest_gauss_int(const GaussRat& z) {
  return {floor(z.re() + Rational(1, 2)), floor(z.im() + Rational(1, 2))};
}

inline bool in_half_open_unit(const Rational& x) { return x >= Rational(-1, 2) && x < Rational(1, 2); }

inline bool in_fundamental_domain(const GaussRat& z) {
  return in_half_open_unit(z.re()) && in_half_open_unit(z.im());
}

// Closed interval of rationals.
struct RatInterval {
  Rational lo{0};
  Rational hi{0};

  RatInterval() = default;
  RatInterval(Rational v) : lo(v), hi(std::move(v)) {}
  RatInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) fail(Errc::InvalidArgument, "interval with lo > hi");
  }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }

  friend RatInterval operator+(const RatInterval& a, const RatInterval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend RatInterval operator-(const RatInterval& a, const RatInterval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
  RatInterval operator-() const { return {-hi, -lo}; }
  friend RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
  }
  RatInterval inverse() const {
    if (contains_zero()) fail(Errc::DivisionByZero, "inverse of interval containing 0");
    return {Rational(1) / hi, Rational(1) / lo};
  }
  friend RatInterval operator/(const RatInterval& a, const RatInterval& b) { return a * b.inverse(); }
  friend bool operator==(const RatInterval& a, const RatInterval& b) { return a.lo == b.lo && a.hi == b.hi; }

  std::string str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }
};

inline RatInterval hull(const RatInterval& a, const RatInterval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Enclosure of sqrt(x) for x >= 0 with roughly `bits` significant bits.
inline RatInterval sqrt_bounds(const Rational& x, unsigned bits = 64) {
  if (x < 0) fail(Errc::InvalidArgument, "sqrt of negative rational");
  if (x == 0) return {Rational(0), Rational(0)};
  BigInt n = numer(x), d = denom(x);
  BigInt rn = isqrt(n), rd = isqrt(d);
  if (rn * rn == n && rd * rd == d) return RatInterval(Rational(rn, rd));
  long e = approx_log2(x);
  long shift = static_cast<long>(bits) - e / 2;
  if (shift < 0) shift = 0;
  BigInt scale = pow2(static_cast<unsigned>(2 * shift));
  BigInt f = floor(x * Rational(scale));
  BigInt s = isqrt(f);
  BigInt den = pow2(static_cast<unsigned>(shift));
  return {Rational(s, den), Rational(s + 1, den)};
}

inline RatInterval sqrt_bounds(const RatInterval& x, unsigned bits = 64) {
  Rational lo = x.lo < 0 ? Rational(0) : x.lo;
  return {sqrt_bounds(lo, bits).lo, sqrt_bounds(x.hi, bits).hi};
}

inline RatInterval abs_bounds(const GaussRat& z, unsigned bits = 64) { return sqrt_bounds(z.norm_sq(), bits); }

}  // namespace hcf

template <>
struct std::hash<hcf::GaussRat> {
  size_t operator()(const hcf::GaussRat& z) const { return z.hash(); }
};
