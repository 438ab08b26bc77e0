#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "hcf/ball.hpp"
#include "hcf/digits.hpp"

namespace hcf {

// Continuants of a word u: (p(u^-), p(u), q(u^-), q(u)); the empty word has (1, 0, 0, 1).
template <class Int>
struct basic_qpair {
  basic_gauss_int<Int> p_prev{1}, p{0}, q_prev{0}, q{1};

  [[nodiscard]] basic_qpair push(const basic_gauss_int<Int>& a) const { return {p, a * p + p_prev, q, a * q + q_prev}; }

  // Matrix [[p_prev, p], [q_prev, q]] = M(a_1) ... M(a_n) with M(a) = [[0, 1], [1, a]].
  // Concatenation: qpair(uv) = qpair(u) * qpair(v) as matrices.
  friend basic_qpair operator*(const basic_qpair& u, const basic_qpair& v) {
    return {u.p_prev * v.p_prev + u.p * v.q_prev, u.p_prev * v.p + u.p * v.q,
            u.q_prev * v.p_prev + u.q * v.q_prev, u.q_prev * v.p + u.q * v.q};
  }
  friend bool operator==(const basic_qpair& x, const basic_qpair& y) {
    return x.p_prev == y.p_prev && x.p == y.p && x.q_prev == y.q_prev && x.q == y.q;
  }

  // q p_prev - q_prev p, equal to (-1)^n
  basic_gauss_int<Int> det() const { return q * p_prev - q_prev * p; }

  // T_u : w |-> (p_prev w + p) / (q_prev w + q), i.e. [0; v] |-> [0; u v]
  MobiusMap map() const {
    if constexpr (std::is_same_v<Int, BigInt>) return {p_prev, p, q_prev, q};
    else return {widen(p_prev), widen(p), widen(q_prev), widen(q)};
  }
};

using QPair = basic_qpair<BigInt>;
using QPair64 = basic_qpair<std::int64_t>;

inline QPair qpair(const DigitSeq& s) {
  QPair r;
  for (const auto& a : s) r = r.push(a);
  return r;
}

struct QPairTrace {
  // index n holds p_n, q_n; index 0 is the empty word
  std::vector<GaussInt> p, q;
  size_t size() const { return p.size() - 1; }
  QPair at(size_t n) const {
    if (n == 0) return {};
    return {p[n - 1], p[n], q[n - 1], q[n]};
  }
};

inline QPairTrace qpair_of(const DigitSeq& s) {
  QPairTrace t;
  t.p.reserve(s.size() + 1);
  t.q.reserve(s.size() + 1);
  t.p.emplace_back(0);
  t.q.emplace_back(1);
  GaussInt pp(1), qp(0);
  for (const auto& a : s) {
    GaussInt pn = a * t.p.back() + pp, qn = a * t.q.back() + qp;
    pp = t.p.back();
    qp = t.q.back();
    t.p.push_back(std::move(pn));
    t.q.push_back(std::move(qn));
  }
  return t;
}

// [0; a_1, ..., a_m] by nested evaluation from the innermost level.
inline GaussRat evaluate(const DigitSeq& s) {
  GaussRat v(0);
  for (size_t i = s.size(); i-- > 0;) {
    GaussRat den = GaussRat(s[i]) + v;
    if (den.is_zero()) fail(Errc::DegenerateFraction, "vanishing denominator in " + s.str());
    v = den.inverse();
  }
  return v;
}

// [0; u w] for a finite word u followed by a tail value [0; w] = t.
inline GaussRat evaluate_with_tail(const DigitSeq& u, const GaussRat& t) {
  QPair r = qpair(u);
  GaussRat den = GaussRat(r.q_prev) * t + GaussRat(r.q);
  if (den.is_zero()) fail(Errc::DegenerateFraction, "vanishing denominator");
  return (GaussRat(r.p_prev) * t + GaussRat(r.p)) / den;
}

// q_{n-1} / q_n == [0; a_n, ..., a_1]
inline bool mirror_check(const DigitSeq& s) {
  QPair r = qpair(s);
  if (r.q.is_zero()) fail(Errc::DegenerateFraction, "q(u) = 0");
  return GaussRat::fraction(r.q_prev, r.q) == evaluate(s.reversed());
}

// phi^(2m) = F_(2m) phi + F_(2m-1); decides X >= phi^(2m) Y exactly for X, Y >= 0.
inline bool phi_power_bound_holds(const BigInt& X, const BigInt& Y, unsigned m) {
  BigInt f_prev = 1, f = 0;  // F_(-1) = 1, F_0 = 0
  for (unsigned i = 0; i < 2 * m; ++i) {
    BigInt nf = f + f_prev;
    f_prev = f;
    f = nf;
  }
  // X - F_(2m-1) Y >= F_(2m) Y (1 + sqrt5) / 2
  BigInt L = 2 * (X - f_prev * Y) - f * Y;
  if (L < 0) return false;
  return L * L >= 5 * f * f * Y * Y;
}

// (|a| - 1)|q^-| < |q| < (|a| + 1)|q^-| on squared norms X = |q|^2, Y = |q^-|^2, A = |a|^2.
inline bool bracket_holds(const BigInt& X, const BigInt& Y, const BigInt& A) {
  BigInt d = X - (A + 1) * Y;
  return d * d < 4 * A * Y * Y;
}

// |q(a)q(b)|/5 < |q(ab)| < 3|q(a)q(b)| on squared norms.
inline bool concat_bound_holds(const BigInt& na, const BigInt& nb, const BigInt& nab) {
  return na * nb < 25 * nab && nab < 9 * na * nb;
}

using Point = std::variant<GaussRat, ComplexBall>;

struct Expansion {
  Point source;
  DigitSeq digits;
  bool terminated = false;
  // digits stopped early because the ball could no longer be rounded with certainty
  bool precision_exhausted = false;
  unsigned precision = 0;

  bool is_exact() const { return std::holds_alternative<GaussRat>(source); }
  const GaussRat& exact_source() const { return std::get<GaussRat>(source); }
  size_t depth() const { return digits.size(); }
};

inline GaussRat gauss_map(const GaussRat& z) {
  if (z.is_zero()) fail(Errc::DivisionByZero, "Gauss map at 0");
  GaussRat w = z.inverse();
  return w - GaussRat(nearest_gauss_int(w));
}

// Exact expansion of x/d by the Euclid-type loop (x, d) -> (d - a x, x), a = round(d/x).
// Returns true when the remainder reached zero.
template <class Int>
bool expand_fraction(basic_gauss_int<Int> x, basic_gauss_int<Int> d, size_t max_depth,
                     std::vector<basic_gauss_int<Int>>& out) {
  while (!x.is_zero()) {
    if (max_depth != 0 && out.size() >= max_depth) return false;
    basic_gauss_int<Int> a = nearest_quotient(d, x);
    basic_gauss_int<Int> r = d - a * x;
    d = std::move(x);
    x = std::move(r);
    out.push_back(std::move(a));
  }
  return true;
}

// max_depth = 0 expands to termination.
inline Expansion hcf_expand(const GaussRat& z, size_t max_depth = 0) {
  if (!in_fundamental_domain(z)) fail(Errc::OutsideFundamentalDomain, z.str());
  auto [n, d] = z.reduced();
  Expansion e;
  e.source = z;
  std::vector<GaussInt> digits;
  e.terminated = expand_fraction(n, d, max_depth, digits);
  e.digits = DigitSeq(std::move(digits));
  return e;
}

inline Disk gauss_map(const Disk& d, const GaussInt& a) {
  // w |-> 1/w - a
  MobiusMap m{-a, GaussInt(1), GaussInt(1), GaussInt(0)};
  return m.image(d);
}

inline ComplexBall gauss_map(const ComplexBall& z) {
  if (z.is_exact()) return ComplexBall::exact(gauss_map(z.center()), z.precision());
  if (z.contains_zero()) fail(Errc::BallContainsZero, "Gauss map of a ball containing 0");
  Disk inv = MobiusMap::inversion().image(z.disk());
  GaussInt a;
  if (!try_nearest_gauss_int(inv, a)) fail(Errc::AmbiguousRounding, "Gauss map rounding not certified");
  return ComplexBall::from_disk(gauss_map(z.disk(), a), z.precision());
}

inline Expansion hcf_expand(const ComplexBall& z, size_t max_depth) {
  Expansion e;
  e.source = z;
  e.precision = z.precision();
  Disk d = z.disk();
  if (d.radius_sq == 0) {
    Expansion x = hcf_expand(d.center, max_depth);
    x.source = z;
    x.precision = z.precision();
    return x;
  }
  Tri inside = disk_in_fundamental_domain(d);
  if (inside == Tri::No) fail(Errc::OutsideFundamentalDomain, z.str());
  if (inside == Tri::Unknown) fail(Errc::AmbiguousRounding, "ball meets the boundary of the fundamental domain");
  std::vector<GaussInt> digits;
  while (digits.size() < max_depth) {
    if (d.contains_zero()) { e.precision_exhausted = true; break; }
    Disk inv = MobiusMap::inversion().image(d);
    GaussInt a;
    if (!try_nearest_gauss_int(inv, a)) { e.precision_exhausted = true; break; }
    digits.push_back(a);
    d = gauss_map(d, a);
  }
  e.digits = DigitSeq(std::move(digits));
  return e;
}

inline Expansion hcf_expand(const Point& z, size_t max_depth) {
  if (auto r = std::get_if<GaussRat>(&z)) return hcf_expand(*r, max_depth);
  return hcf_expand(std::get<ComplexBall>(z), max_depth);
}

// Retries at doubled precision until max_depth digits are certified.
inline Expansion hcf_expand_adaptive(const std::function<ComplexBall(unsigned)>& source, size_t max_depth,
                                     unsigned start_prec = 64, unsigned cap = 4096) {
  for (unsigned p = start_prec; p <= cap; p *= 2) {
    Expansion e;
    try {
      e = hcf_expand(source(p), max_depth);
    } catch (const Error& err) {
      if (err.code() != Errc::AmbiguousRounding) throw;
      continue;
    }
    if (e.digits.size() >= max_depth || e.terminated) return e;
  }
  fail(Errc::AmbiguousRounding, "precision cap reached before the requested depth");
}

// T^n(z): exact for rational sources, an enclosure for balls.
inline Point tail_at(const Expansion& e, size_t n) {
  if (n > e.digits.size()) fail(Errc::DepthExhausted, "tail beyond expansion depth");
  if (auto r = std::get_if<GaussRat>(&e.source)) {
    GaussRat t = *r;
    for (size_t i = 0; i < n; ++i) t = t.inverse() - GaussRat(e.digits[i]);
    return t;
  }
  const ComplexBall& b = std::get<ComplexBall>(e.source);
  Disk d = b.disk();
  for (size_t i = 0; i < n; ++i) d = gauss_map(d, e.digits[i]);
  return ComplexBall::from_disk(d, b.precision());
}

// Disk enclosing the source point.
inline Disk source_disk(const Point& z) {
  if (auto r = std::get_if<GaussRat>(&z)) return {*r, 0};
  return std::get<ComplexBall>(z).disk();
}

}  // namespace hcf
