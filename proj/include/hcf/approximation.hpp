#pragma once

#include <vector>

#include "hcf/core.hpp"
#include "hcf/rate.hpp"

namespace hcf {

// Nonnegative quantity known through bounds on its square.
struct SquaredBounds {
  Rational lo_sq{0}, hi_sq{0};

  bool exact() const { return lo_sq == hi_sq; }
  // certainly >= v (v >= 0)
  bool ge(const Rational& v) const { return lo_sq >= v * v; }
  bool lt(const Rational& v) const { return hi_sq < v * v; }
  bool gt(const Rational& v) const { return lo_sq > v * v; }
  bool le(const Rational& v) const { return hi_sq <= v * v; }
  RatInterval value(unsigned bits = 64) const { return {sqrt_bounds(lo_sq, bits).lo, sqrt_bounds(hi_sq, bits).hi}; }
};

inline SquaredBounds squared_bounds(const Disk& d, unsigned bits = 96) {
  if (d.radius_sq == 0) return {d.center.norm_sq(), d.center.norm_sq()};
  RatInterval m = modulus_bounds(d, bits);
  return {m.lo * m.lo, m.hi * m.hi};
}

// |q z - p| over the source point.
inline SquaredBounds residual(const Point& z, const GaussInt& p, const GaussInt& q) {
  Disk d = source_disk(z);
  Disk r{GaussRat(q) * d.center - GaussRat(p), Rational(q.norm()) * d.radius_sq};
  return squared_bounds(r);
}

// |z - p/q| over the source point.
inline SquaredBounds distance(const Point& z, const GaussInt& p, const GaussInt& q) {
  SquaredBounds r = residual(z, p, q);
  Rational n(q.norm());
  return {r.lo_sq / n, r.hi_sq / n};
}

namespace detail {

// z = w / d with d a positive integer.
struct ScaledPoint {
  GaussInt w;
  BigInt d;
};

inline ScaledPoint scaled(const GaussRat& z) {
  BigInt d = boost::multiprecision::lcm(denom(z.re()), denom(z.im()));
  return {{numer(z.re()) * (d / denom(z.re())), numer(z.im()) * (d / denom(z.im()))}, d};
}

// Runs f(q', p', |q'w - p'd|^2) on every q' with 0 < N(q') <= max_norm and the p' nearest q'w/d.
template <class Int, class F>
bool for_each_nearest(const basic_gauss_int<Int>& w, const Int& d, const Int& max_norm, F&& f) {
  Int r = 0;
  while ((r + 1) * (r + 1) <= max_norm) ++r;
  for (Int x = -r; x <= r; ++x)
    for (Int y = -r; y <= r; ++y) {
      Int n = x * x + y * y;
      if (n == 0 || n > max_norm) continue;
      basic_gauss_int<Int> qq{x, y};
      basic_gauss_int<Int> t = qq * w;
      basic_gauss_int<Int> pp{floor_div<Int>(2 * t.re + d, 2 * d), floor_div<Int>(2 * t.im + d, 2 * d)};
      basic_gauss_int<Int> e{t.re - pp.re * d, t.im - pp.im * d};
      if (!f(qq, pp, Int(e.re * e.re + e.im * e.im), n)) return false;
    }
  return true;
}

template <class Int>
bool good_or_best(const basic_gauss_int<Int>& w, const Int& d, const basic_gauss_int<Int>& p,
                  const basic_gauss_int<Int>& q, bool best) {
  basic_gauss_int<Int> t = q * w;
  basic_gauss_int<Int> e{t.re - p.re * d, t.im - p.im * d};
  Int target = e.re * e.re + e.im * e.im;
  Int qn = q.norm();
  if (!best)
    return for_each_nearest(w, d, qn, [&](auto&, auto&, const Int& res, const Int&) { return res >= target; });
  return for_each_nearest(w, d, qn, [&](auto&, auto&, const Int& res, const Int& n) {
    return n >= qn || res > target;
  });
}

// z = P/Q reduced. A competitor has residue r = q'P - p'Q with N(r) below the target; r fixes q' mod Q,
// and a short q' is one of the nine translates nearest 0.
template <class Int>
bool residue_search(const basic_gauss_int<Int>& P, const basic_gauss_int<Int>& Q, const Int& T, const Int& qn,
                    bool best) {
  basic_gauss_int<Int> g, x, y;
  gauss_xgcd(P, Q, g, x, y);
  basic_gauss_int<Int> pinv = x * g.conj();
  pinv = pinv - nearest_quotient(pinv, Q) * Q;
  Int r = 0;
  while ((r + 1) * (r + 1) <= T) ++r;
  static const int ks[9][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (Int a = -r; a <= r; ++a)
    for (Int b = -r; b <= r; ++b) {
      Int n = a * a + b * b;
      if (best ? n > T : n >= T) continue;
      basic_gauss_int<Int> t = basic_gauss_int<Int>{a, b} * pinv;
      basic_gauss_int<Int> q0 = t - nearest_quotient(t, Q) * Q;
      for (const auto& k : ks) {
        basic_gauss_int<Int> qq = q0 + basic_gauss_int<Int>{Int(k[0]), Int(k[1])} * Q;
        Int m = qq.norm();
        if (m == 0 || m > qn || (best && m == qn)) continue;
        return false;
      }
    }
  return true;
}

inline bool fits64(const BigInt& v, unsigned bits) {
  BigInt a = v < 0 ? BigInt(-v) : v;
  return a == 0 || boost::multiprecision::msb(a) < bits;
}

}  // namespace detail

// |q'| <= |q| implies |q'z - p'| >= |qz - p| for all p' and all q' != 0.
// For rational z the decision is exact. For balls, ties that are identities (q' = u q, p' = u p)
// are skipped and anything else undecided raises PrecisionExhausted.
inline bool approximation_test(const Point& z, const GaussInt& p, const GaussInt& q, bool best) {
  if (q.is_zero()) fail(Errc::InvalidArgument, "q must be nonzero");
  if (auto r = std::get_if<GaussRat>(&z)) {
    auto [P, Q] = r->reduced();
    BigInt T = (q * P - p * Q).norm(), qn0 = q.norm();
    if (T < qn0) {
      if (detail::fits64(Q.norm(), 40) && detail::fits64(T, 40) && detail::fits64(qn0, 40))
        return detail::residue_search(narrow(P), narrow(Q), T.convert_to<std::int64_t>(),
                                      qn0.convert_to<std::int64_t>(), best);
      return detail::residue_search(P, Q, T, qn0, best);
    }
    detail::ScaledPoint s = detail::scaled(*r);
    auto mag = [](const BigInt& v) { return v < 0 ? BigInt(-v) : v; };
    BigInt big = std::max({mag(s.w.re), mag(s.w.im), s.d, mag(p.re), mag(p.im)});
    BigInt qn = q.norm();
    // products stay below 2^62 when all inputs are below 2^14 in size after multiplication by q'
    if (detail::fits64(big, 14) && detail::fits64(qn, 20)) {
      using I = std::int64_t;
      basic_gauss_int<I> w{s.w.re.convert_to<I>(), s.w.im.convert_to<I>()};
      return detail::good_or_best(w, s.d.convert_to<I>(), narrow(p), narrow(q), best);
    }
    return detail::good_or_best(s.w, s.d, p, q, best);
  }
  const ComplexBall& b = std::get<ComplexBall>(z);
  Disk disk = b.disk();
  SquaredBounds target = residual(z, p, q);
  BigInt qn = q.norm();
  BigInt r = isqrt(qn);
  bool result = true;
  for (BigInt x = -r; x <= r; ++x)
    for (BigInt y = -r; y <= r; ++y) {
      BigInt n = x * x + y * y;
      if (n == 0 || n > qn) continue;
      if (best && n >= qn) continue;
      GaussInt qq{x, y};
      Disk img{GaussRat(qq) * disk.center, Rational(n) * disk.radius_sq};
      RatInterval rad = sqrt_bounds(img.radius_sq);
      BigInt re0 = floor(img.center.re() - rad.hi + Rational(1, 2)), re1 = floor(img.center.re() + rad.hi + Rational(1, 2));
      BigInt im0 = floor(img.center.im() - rad.hi + Rational(1, 2)), im1 = floor(img.center.im() + rad.hi + Rational(1, 2));
      for (BigInt a = re0; a <= re1; ++a)
        for (BigInt c = im0; c <= im1; ++c) {
          GaussInt pp{a, c};
          if (!best && n == qn) {
            // identical residual up to a unit
            bool assoc = false;
            for (GaussInt u : {GaussInt(1), GaussInt(-1), GaussInt(0, 1), GaussInt(0, -1)})
              if (qq == u * q && pp == u * p) assoc = true;
            if (assoc) continue;
          }
          SquaredBounds res = residual(z, pp, qq);
          bool ok = best ? res.lo_sq > target.hi_sq : res.lo_sq >= target.hi_sq;
          bool bad = best ? res.hi_sq <= target.lo_sq : res.hi_sq < target.lo_sq;
          if (bad) return false;
          if (!ok) result = false;
        }
    }
  if (!result) fail(Errc::PrecisionExhausted, "ball too coarse to decide the approximation test");
  return true;
}

inline bool is_good_approximation(const Point& z, const GaussInt& p, const GaussInt& q) {
  return approximation_test(z, p, q, false);
}

inline bool is_best_approximation(const Point& z, const GaussInt& p, const GaussInt& q) {
  return approximation_test(z, p, q, true);
}

// min over t in (0,1) of max(1 - t - t^2, t/2): the crossing point of a decreasing and an
// increasing function, root of t^2 + (3/2) t - 1 = 0.
struct Threshold {
  Rational t, value;
};

inline Threshold legendre_threshold() {
  Rational b(3, 2), c(-1);
  Rational disc = b * b - 4 * c;
  RatInterval s = sqrt_bounds(disc);
  if (s.lo != s.hi) fail(Errc::InvalidArgument, "threshold root is irrational");
  Rational t = (-b + s.lo) / 2;
  Rational v1 = 1 - t - t * t, v2 = t / 2;
  if (v1 != v2) fail(Errc::InvalidArgument, "threshold root check failed");
  return {t, v1};
}

enum class LegendreClaim { MustBeConvergent, NoClaim };

struct LegendreResult {
  LegendreClaim claim = LegendreClaim::NoClaim;
  bool is_convergent = false;
  // index n with p/q = p_n/q_n, when found
  size_t index = 0;
};

inline LegendreResult legendre_test(const Expansion& e, const GaussInt& p, const GaussInt& q) {
  if (q.is_zero()) fail(Errc::InvalidArgument, "q must be nonzero");
  LegendreResult res;
  GaussRat target = GaussRat::fraction(p, q);
  QPairTrace t = qpair_of(e.digits);
  for (size_t n = 1; n <= t.size(); ++n)
    if (GaussRat::fraction(t.p[n], t.q[n]) == target) {
      res.is_convergent = true;
      res.index = n;
      break;
    }
  if (p.is_zero()) return res;
  // |z - p/q| < 1/(4|q|^2)  <=>  |qz - p|^2 * 16 |q|^2 < 1
  SquaredBounds r = residual(e.source, p, q);
  Rational qn(q.norm());
  if (r.hi_sq * 16 * qn < 1) res.claim = LegendreClaim::MustBeConvergent;
  else if (r.lo_sq * 16 * qn >= 1) res.claim = LegendreClaim::NoClaim;
  else fail(Errc::PrecisionExhausted, "cannot decide the Legendre threshold");
  if (res.claim == LegendreClaim::MustBeConvergent && !res.is_convergent) {
    // a convergent beyond the computed depth has |q_n| > |q| only if the expansion ran out
    bool covered = e.terminated || (!t.q.empty() && t.q.back().norm() > q.norm());
    if (!covered) fail(Errc::PrecisionExhausted, "expansion too short to locate the convergent");
  }
  return res;
}

struct LegendreScan {
  size_t checked = 0, claimed = 0, counterexamples = 0;
};

namespace detail {

template <class Int>
void legendre_scan_impl(const basic_gauss_int<Int>& w, const Int& d, const std::vector<basic_gauss_int<Int>>& ps,
                        const std::vector<basic_gauss_int<Int>>& qs, std::int64_t max_norm, LegendreScan& out) {
  std::int64_t r = 0;
  while ((r + 1) * (r + 1) <= max_norm) ++r;
  for (std::int64_t x = -r; x <= r; ++x)
    for (std::int64_t y = -r; y <= r; ++y) {
      std::int64_t n = x * x + y * y;
      if (n == 0 || n > max_norm) continue;
      basic_gauss_int<Int> q{Int(x), Int(y)};
      basic_gauss_int<Int> t = q * w;
      // only the nearest p can satisfy |qz - p| < 1/4
      basic_gauss_int<Int> p{floor_div<Int>(2 * t.re + d, 2 * d), floor_div<Int>(2 * t.im + d, 2 * d)};
      ++out.checked;
      if (p.is_zero()) continue;
      basic_gauss_int<Int> e{t.re - p.re * d, t.im - p.im * d};
      if (!(e.norm() * 16 * Int(n) < d * d)) continue;
      ++out.claimed;
      bool found = false;
      for (size_t k = 1; k < qs.size() && !found; ++k) found = p * qs[k] == q * ps[k];
      if (!found) ++out.counterexamples;
    }
}

}  // namespace detail

// Every nonzero p/q with N(q) <= max_norm inside the 1/(4|q|^2) disk around a rational z is checked
// against the full convergent list.
inline LegendreScan legendre_scan(const GaussRat& z, std::int64_t max_norm) {
  Expansion e = hcf_expand(z);
  QPairTrace t = qpair_of(e.digits);
  detail::ScaledPoint s = detail::scaled(z);
  LegendreScan out;
  auto mag = [](const BigInt& v) { return v < 0 ? BigInt(-v) : v; };
  BigInt big = std::max({mag(s.w.re), mag(s.w.im), s.d});
  if (detail::fits64(big, 22) && max_norm < (1 << 12)) {
    using I = std::int64_t;
    std::vector<basic_gauss_int<I>> ps, qs;
    for (size_t n = 0; n <= t.size(); ++n) {
      ps.push_back(narrow(t.p[n]));
      qs.push_back(narrow(t.q[n]));
    }
    detail::legendre_scan_impl<I>(narrow(s.w), s.d.convert_to<I>(), ps, qs, max_norm, out);
  } else {
    detail::legendre_scan_impl<BigInt>(s.w, s.d, t.p, t.q, max_norm, out);
  }
  return out;
}

enum class OrderRegime { InWindow, AtOrAbove, Below, Undecided };

inline const char* regime_name(OrderRegime r) {
  switch (r) {
    case OrderRegime::InWindow: return "window";
    case OrderRegime::AtOrAbove: return "at_or_above";
    case OrderRegime::Below: return "below";
    case OrderRegime::Undecided: return "undecided";
  }
  return "?";
}

struct OrderEntry {
  size_t n;
  GaussInt p, q;
  OrderRegime regime;
  SquaredBounds dist;
  RatInterval psi;
};

// Classifies |z - p_n/q_n| against [(1 - 1/k) psi(|q_n|), psi(|q_n|)).
inline OrderRegime classify_distance(const SquaredBounds& d, const RatInterval& psi, unsigned k) {
  Rational f = Rational(k - 1, k);
  if (d.ge(psi.hi)) return OrderRegime::AtOrAbove;
  if (d.lt(psi.lo) && d.ge(f * psi.hi)) return OrderRegime::InWindow;
  if (d.lt(f * psi.lo)) return OrderRegime::Below;
  return OrderRegime::Undecided;
}

inline std::vector<OrderEntry> exact_order_report(const Expansion& e, const ApproxRate& rate, unsigned k) {
  if (k < 2) fail(Errc::InvalidArgument, "window index must be >= 2");
  std::vector<OrderEntry> out;
  QPairTrace t = qpair_of(e.digits);
  for (size_t n = 1; n <= t.size(); ++n) {
    SquaredBounds d = distance(e.source, t.p[n], t.q[n]);
    RatInterval psi = rate.eval_at_norm(t.q[n].norm());
    out.push_back({n, t.p[n], t.q[n], classify_distance(d, psi, k), d, psi});
  }
  return out;
}

}  // namespace hcf
