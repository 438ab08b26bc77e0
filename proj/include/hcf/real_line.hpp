#pragma once

#include <algorithm>
#include <functional>
#include <random>

#include "hcf/cylinder.hpp"

namespace hcf {

using RealDigits = std::vector<std::int64_t>;

inline DigitSeq to_digit_seq(const RealDigits& d) { return DigitSeq::real(d); }

inline bool full_real(const RealDigits& d) { return !d.empty() && admissible_real(d) && std::llabs(d.back()) >= 3; }

// Strict upper bound 1/(|w_1| - 1) on |[0; w]|. For complex w_1 the modulus is bounded from below.
inline Rational tail_bound(const DigitSeq& w) {
  if (w.empty()) fail(Errc::InvalidArgument, "tail bound needs a nonempty word");
  Rational m = sqrt_bounds(Rational(w[0].norm()), 64).lo;
  if (w[0].im == 0) m = abs(Rational(w[0].re));
  return 1 / (m - 1);
}

// Real interval with endpoint openness.
struct RealCell {
  Rational lo, hi;
  bool lo_open = false, hi_open = false;

  RatInterval closure() const { return {lo, hi}; }
  Rational width() const { return hi - lo; }
  bool within_half_open_unit_positive() const { return lo >= 0 && (hi < Rational(1, 2) || (hi == Rational(1, 2) && hi_open)); }
  std::string str() const {
    return std::string(lo_open ? "(" : "[") + lo.str() + ", " + hi.str() + (hi_open ? ")" : "]");
  }
};

// Tail set after a last digit d on the real line.
inline RealCell real_prototype(std::int64_t last) {
  if (last == 2) return {0, Rational(1, 2), true, true};
  if (last == -2) return {Rational(-1, 2), 0, false, false};
  return {Rational(-1, 2), Rational(1, 2), false, true};
}

// {x in [-1/2, 1/2) : x has HCF prefix d}, for admissible d.
inline RealCell real_cylinder(const RealDigits& d) {
  if (d.empty()) return real_prototype(3);
  if (!admissible_real(d)) fail(Errc::NotAdmissible, "real sequence is not admissible");
  QPair Q = qpair(to_digit_seq(d));
  MobiusMap T = Q.map();
  RealCell p = real_prototype(d.back());
  Rational a = T.apply(GaussRat(p.lo)).re(), b = T.apply(GaussRat(p.hi)).re();
  // T is monotone on the tail set; decreasing exactly when det < 0
  if (a <= b) return {a, b, p.lo_open, p.hi_open};
  return {b, a, p.hi_open, p.lo_open};
}

// M(x) M(2) M(y) == -M(x+1) M(-2) M(y+1), and the mirror with 2 and -2 swapped, M(x) = [[x,1],[1,0]].
inline bool eq22_identity(std::int64_t x, std::int64_t y, bool mirrored = false) {
  using Mat = std::array<BigInt, 4>;
  auto M = [](const BigInt& v) { return Mat{v, 1, 1, 0}; };
  auto mul = [](const Mat& a, const Mat& b) {
    return Mat{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
  };
  BigInt s = mirrored ? -1 : 1;
  Mat lhs = mul(mul(M(BigInt(x)), M(2 * s)), M(BigInt(y)));
  Mat rhs = mul(mul(M(BigInt(x) + s), M(-2 * s)), M(BigInt(y) + s));
  for (int i = 0; i < 4; ++i)
    if (lhs[i] != -rhs[i]) return false;
  return true;
}

namespace detail {

inline RealDigits reverse_fix_rec(const RealDigits& u) {
  size_t n = u.size();
  size_t m = n;
  for (size_t j = 0; j + 1 < n; ++j)
    if (std::llabs(u[j]) == 2 && u[j] * u[j + 1] < 0) {
      m = j;
      break;
    }
  if (m == n) return u;
  std::int64_t s = u[m] > 0 ? 1 : -1;
  RealDigits head(u.begin(), u.begin() + m);
  head.back() += s;
  RealDigits rest = {-2 * s, u[m + 1] + s};
  rest.insert(rest.end(), u.begin() + m + 2, u.end());
  RealDigits tail = reverse_fix_rec(rest);
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace detail

// Admissible v with [0; u^t w] = [0; v^t w] for every w, |v_j| <= |u_j| + 1 and u_n v_n > 0.
inline RealDigits reverse_fix(const RealDigits& u) {
  if (u.size() < 2) fail(Errc::PreconditionViolated, "reverse_fix needs length >= 2");
  for (auto d : u)
    if (std::llabs(d) < 2) fail(Errc::PreconditionViolated, "digit outside Z \\ {0, +-1}");
  if (u[0] * u[1] <= 0) fail(Errc::PreconditionViolated, "reverse_fix needs u_1 u_2 > 0");
  RealDigits rev(u.rbegin(), u.rend());
  if (!admissible_real(rev)) fail(Errc::PreconditionViolated, "reversed sequence is not admissible");
  return detail::reverse_fix_rec(u);
}

struct BoundedExpansion {
  RatInterval x;
  BigInt t;
  RealDigits alpha, beta;
  RealCell alpha_cell, beta_cell;
  RatInterval sum;  // t + closure(alpha cell) + closure(beta cell)
  std::int64_t bound = 29;
  bool exact = false;  // alpha and beta are the exact values of the finite expansions
  size_t visited = 0;
};

struct DecomposeOptions {
  std::int64_t bound = 29;
  Rational precision{Rational(1, 1 << 20)};
  bool try_exact = true;
  bool require_both = false;  // refine both prefixes to length >= 1
  size_t budget = 2000000;
};

namespace detail {

struct SumSearch {
  RatInterval X;
  const DecomposeOptions& opt;
  BigInt t;
  size_t visited = 0;
  RealDigits alpha, beta;
  RealCell ca, cb;

  static RealCell alpha_root() { return {0, Rational(1, 2), false, true}; }

  RatInterval sum_of(const RealCell& a, const RealCell& b) const {
    return {Rational(t) + a.lo + b.lo, Rational(t) + a.hi + b.hi};
  }

  bool done() const {
    if (opt.require_both && (alpha.empty() || beta.empty())) return false;
    return sum_of(ca, cb).width() <= opt.precision;
  }

  bool run() {
    if (done()) return true;
    if (opt.budget && visited >= opt.budget) fail(Errc::SearchExhausted, "sum decomposition budget exhausted");
    bool pick_alpha;
    if (opt.require_both && alpha.empty()) pick_alpha = true;
    else if (opt.require_both && beta.empty()) pick_alpha = false;
    else pick_alpha = ca.width() >= cb.width();
    RealDigits& seq = pick_alpha ? alpha : beta;
    RealCell& cell = pick_alpha ? ca : cb;
    struct Cand {
      std::int64_t d;
      RealCell c;
      Rational margin;
    };
    std::vector<Cand> cands;
    for (std::int64_t m = 2; m <= opt.bound; ++m)
      for (std::int64_t d : {m, -m}) {
        if (pick_alpha && seq.empty() && d < 0) continue;
        if (!seq.empty() && !(std::llabs(seq.back()) >= 3 || seq.back() * d > 0)) continue;
        ++visited;
        seq.push_back(d);
        RealCell c = real_cylinder(seq);
        seq.pop_back();
        RatInterval S = pick_alpha ? sum_of(c, cb) : sum_of(ca, c);
        if (!S.contains(X)) continue;
        Rational margin = std::min(X.lo - S.lo, S.hi - X.hi) / S.width();
        cands.push_back({d, c, margin});
      }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.margin > b.margin; });
    RealCell saved = cell;
    for (const auto& c : cands) {
      seq.push_back(c.d);
      cell = c.c;
      if (run()) return true;
      seq.pop_back();
    }
    cell = saved;
    return false;
  }
};

inline bool digits_bounded(const DigitSeq& s, std::int64_t bound, RealDigits& out) {
  out = s.real_digits();
  for (auto d : out)
    if (std::llabs(d) > bound) return false;
  return true;
}

}  // namespace detail

// x = t + alpha + beta with alpha in [0, 1/2), alpha and beta with real HCF digits bounded by opt.bound.
inline BoundedExpansion bounded_sum_decompose(const RatInterval& X, const DecomposeOptions& opt = {}) {
  if (opt.bound < 3) fail(Errc::InvalidArgument, "digit bound must be at least 3");
  if (opt.precision <= 0) fail(Errc::InvalidArgument, "precision must be positive");
  BoundedExpansion be;
  be.x = X;
  be.bound = opt.bound;
  if (opt.try_exact && X.width() == 0 && !opt.require_both) {
    const Rational& x = X.lo;
    BigInt t = floor(x + Rational(1, 2));
    for (BigInt tt : {t, BigInt(t - 1)}) {
      Rational r = x - Rational(tt);
      RealDigits d;
      // alpha = 0, beta = r
      if (in_half_open_unit(r) && detail::digits_bounded(hcf_expand(GaussRat(r)).digits, opt.bound, d)) {
        be.t = tt;
        be.beta = d;
        be.alpha_cell = {0, 0};
        be.beta_cell = {r, r};
        be.sum = RatInterval(x);
        be.exact = true;
        return be;
      }
      // alpha = r, beta = 0
      if (r >= 0 && r < Rational(1, 2) && detail::digits_bounded(hcf_expand(GaussRat(r)).digits, opt.bound, d)) {
        be.t = tt;
        be.alpha = d;
        be.alpha_cell = {r, r};
        be.beta_cell = {0, 0};
        be.sum = RatInterval(x);
        be.exact = true;
        return be;
      }
    }
  }
  BigInt f = floor(X.lo);
  size_t visited = 0;
  for (BigInt t : {f, BigInt(f + 1)}) {
    // alpha + beta ranges over [-1/2, 1]
    if (!(X.lo >= Rational(t) - Rational(1, 2) && X.hi <= Rational(t) + 1)) continue;
    detail::SumSearch s{X, opt, t, 0, {}, {}, {}, {}};
    s.visited = visited;
    s.ca = detail::SumSearch::alpha_root();
    s.cb = real_prototype(3);
    if (!s.sum_of(s.ca, s.cb).contains(X)) continue;
    bool ok = s.run();
    visited = s.visited;
    if (ok) {
      be.t = t;
      be.alpha = s.alpha;
      be.beta = s.beta;
      be.alpha_cell = s.ca;
      be.beta_cell = s.cb;
      be.sum = s.sum_of(s.ca, s.cb);
      be.visited = visited;
      return be;
    }
  }
  fail(Errc::SearchExhausted, "no bounded decomposition found for " + X.str());
}

inline BoundedExpansion bounded_sum_decompose(const Rational& x, const DecomposeOptions& opt = {}) {
  return bounded_sum_decompose(RatInterval(x), opt);
}

// Digit bound, alpha range, certified containment and consistency of the stored cells.
inline bool check_bounded_expansion(const BoundedExpansion& be) {
  for (const RealDigits* s : {&be.alpha, &be.beta}) {
    if (!admissible_real(*s)) return false;
    for (auto d : *s)
      if (std::llabs(d) > be.bound || std::llabs(d) < 2) return false;
  }
  if (!be.alpha.empty() && be.alpha[0] < 0) return false;
  if (be.exact) {
    Rational a = be.alpha.empty() ? Rational(0) : evaluate(to_digit_seq(be.alpha)).re();
    Rational b = be.beta.empty() ? Rational(0) : evaluate(to_digit_seq(be.beta)).re();
    if (!(a >= 0 && a < Rational(1, 2))) return false;
    return be.x.width() == 0 && Rational(be.t) + a + b == be.x.lo;
  }
  RealCell a = be.alpha.empty() ? detail::SumSearch::alpha_root() : real_cylinder(be.alpha);
  RealCell b = real_cylinder(be.beta);
  if (!a.within_half_open_unit_positive()) return false;
  RatInterval S{Rational(be.t) + a.lo + b.lo, Rational(be.t) + a.hi + b.hi};
  return S == be.sum && S.contains(be.x);
}

struct AtbWindow {
  Rational zeta, xi;
  BigInt t;
  RealDigits a, b;
  RealDigits alpha, beta;
  // |t + X + Z| over X in T_alpha(D(0,1/2)), Z in T_beta(D(0, sqrt(2)/2)) lies in [sum_lo, sum_hi]
  Rational sum_lo, sum_hi;
  BoundedExpansion expansion;
  unsigned rounds = 0;
};

// Enclosure of |t + [0; alpha w] + z| for |[0; w']| < 1/2 and z in C(beta).
inline RatInterval atb_sum_enclosure(const BigInt& t, const RealDigits& alpha, const RealDigits& beta) {
  Disk X = qpair(to_digit_seq(alpha)).map().image(Disk{GaussRat(0), Rational(1, 4)});
  Disk Z = qpair(to_digit_seq(beta)).map().image(Disk{GaussRat(0), Rational(1, 2)});
  GaussRat c = GaussRat(Rational(t)) + X.center + Z.center;
  Rational r = X.radius_hi(96) + Z.radius_hi(96);
  RatInterval m = abs_bounds(c, 96);
  Rational lo = m.lo - r;
  if (lo < 0) lo = 0;
  return {lo, m.hi + r};
}

inline std::int64_t sign_of(std::int64_t v) { return v > 0 ? 1 : -1; }

// t, a, b with 3 <= t < 1/zeta + 1, a t b full, |a_j| <= 30, |b_j| <= 29, and
// zeta < |z - p(wa)/q(wa)| |q(wa)|^2 < xi on C(w a t b) for every full w.
inline AtbWindow build_atb(const Rational& zeta, const Rational& xi, size_t max_rounds = 40) {
  if (!(zeta > 0 && zeta < xi && xi < Rational(1, 3))) fail(Errc::PreconditionViolated, "need 0 < zeta < xi < 1/3");
  Rational lo = 1 / xi, hi = 1 / zeta;
  Rational target = (lo + hi) / 2;
  DecomposeOptions opt;
  opt.bound = 29;
  opt.try_exact = false;
  opt.require_both = true;
  opt.precision = (hi - lo) / 4;
  for (unsigned round = 1; round <= max_rounds; ++round, opt.precision /= 4) {
    BoundedExpansion be = bounded_sum_decompose(target, opt);
    RatInterval s = atb_sum_enclosure(be.t, be.alpha, be.beta);
    if (!(s.lo > lo && s.hi < hi)) continue;
    AtbWindow w;
    w.zeta = zeta;
    w.xi = xi;
    w.t = be.t;
    w.alpha = be.alpha;
    w.beta = be.beta;
    w.sum_lo = s.lo;
    w.sum_hi = s.hi;
    w.rounds = round;
    RealDigits at = be.alpha;
    at.push_back(3 * sign_of(at.back()));
    std::reverse(at.begin(), at.end());
    w.a = reverse_fix(at);
    w.b = be.beta;
    w.b.push_back(3 * sign_of(w.b.back()));
    w.expansion = std::move(be);
    RealDigits atb = w.a;
    atb.push_back(w.t.convert_to<std::int64_t>());
    atb.insert(atb.end(), w.b.begin(), w.b.end());
    bool ok = w.t >= 3 && Rational(w.t) < hi + 1 && w.a.back() > 0 && full_real(atb);
    for (auto d : w.a) ok = ok && std::llabs(d) <= 30;
    for (auto d : w.b) ok = ok && std::llabs(d) <= 29;
    if (!ok) fail(Errc::PreconditionViolated, "constructed (t, a, b) fails its contract");
    return w;
  }
  fail(Errc::BudgetExceeded, "prefix extension cap reached");
}

inline DigitSeq atb_word(const AtbWindow& w) {
  RealDigits d = w.a;
  d.push_back(w.t.convert_to<std::int64_t>());
  d.insert(d.end(), w.b.begin(), w.b.end());
  return to_digit_seq(d);
}

// |z - p(wa)/q(wa)|^2 |q(wa)|^4, exactly.
inline Rational atb_scaled_distance_sq(const DigitSeq& w, const AtbWindow& atb, const GaussRat& z) {
  QPair Q = qpair(w + to_digit_seq(atb.a));
  Rational qn(Q.q.norm());
  return (z - GaussRat::fraction(Q.p, Q.q)).norm_sq() * qn * qn;
}

struct PadResult {
  DigitSeq v;
  BigInt q_norm;      // |q(u v w)|^2
  double ratio = 0;   // N / |q(u)|, the scale at which the search was run
  size_t visited = 0;
};

// v in {3,4}* with (1 - delta) N <= |q(u v w)| <= N, by depth-first search trying 3 before 4.
// The caller vouches that the word behind Qu is full.
inline PadResult pad_to_window(const QPair& Qu, const Rational& N, const Rational& delta, const DigitSeq& w,
                               size_t budget = 1000000) {
  if (!w.is_real() || !admissible_real(w)) fail(Errc::NotAdmissible, "tail must be an admissible real sequence");
  if (!(delta > 0 && delta < 1)) fail(Errc::InvalidArgument, "delta must lie in (0, 1)");
  if (N <= 0) fail(Errc::InvalidArgument, "N must be positive");
  Rational hi2 = N * N, lo2 = (1 - delta) * (1 - delta) * N * N;
  QPair Qw = qpair(w);
  PadResult res;
  res.ratio = to_double(N) / std::sqrt(to_double(Qu.q.norm()));
  DigitSeq v;
  bool found = false;
  auto hit = [&](const QPair& Q, const DigitSeq& cur) {
    BigInt full = (Q * Qw).q.norm();
    if (Rational(full) >= lo2 && Rational(full) <= hi2) {
      found = true;
      res.v = cur;
      res.q_norm = full;
    }
    return found;
  };
  // block words X^a Y^b and (34)^m Y^b: every count of 3s and 4s is tried once
  {
    const GaussInt three(3), four(4);
    std::vector<std::pair<DigitSeq, GaussInt>> heads;
    for (const auto& [x, y] : {std::pair{three, four}, std::pair{four, three}}) {
      DigitSeq h;
      QPair Q = Qu;
      while (!found && Rational(Q.q.norm()) <= hi2) {
        heads.push_back({h, y});
        h.push_back(x);
        Q = Q.push(x);
      }
    }
    DigitSeq alt;
    QPair Qa = Qu;
    while (Rational(Qa.q.norm()) <= hi2) {
      heads.push_back({alt, three});
      heads.push_back({alt, four});
      alt.push_back(three);
      alt.push_back(four);
      Qa = Qa.push(three).push(four);
    }
    for (const auto& [h, y] : heads) {
      if (found) break;
      QPair Q = Qu * qpair(h);
      DigitSeq cur = h;
      while (Rational(Q.q.norm()) <= hi2) {
        ++res.visited;
        if (hit(Q, cur)) break;
        cur.push_back(y);
        Q = Q.push(y);
      }
    }
  }
  // then seeded random walks: the depth-first order below wastes its budget on permutations
  // of the last digits, which barely move |q|
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  for (size_t walk = 0; walk < 4096 && !found; ++walk) {
    QPair Q = Qu;
    DigitSeq cur;
    while (true) {
      ++res.visited;
      if (Rational(Q.q.norm()) > hi2) break;
      if (hit(Q, cur)) break;
      GaussInt d((rng() & 1) ? 4 : 3);
      cur.push_back(d);
      Q = Q.push(d);
    }
  }
  if (found) return res;
  const size_t walked = res.visited;
  std::function<void(const QPair&)> rec = [&](const QPair& Quv) {
    if (found) return;
    if (budget && res.visited - walked >= budget) return;
    ++res.visited;
    Rational n(Quv.q.norm());
    if (n > hi2) return;
    BigInt full = (Quv * Qw).q.norm();
    if (Rational(full) >= lo2 && Rational(full) <= hi2) {
      found = true;
      res.v = v;
      res.q_norm = full;
      return;
    }
    for (int d : {3, 4}) {
      v.push_back(GaussInt(d));
      rec(Quv.push(GaussInt(d)));
      v.pop_back();
      if (found) return;
    }
  };
  rec(Qu);
  if (!found) fail(Errc::WindowUnreachable, "no {3,4} padding reaches the window at N = " + N.str());
  return res;
}

inline PadResult pad_to_window(const DigitSeq& u, const Rational& N, const Rational& delta, const DigitSeq& w,
                               size_t budget = 1000000) {
  if (is_full(u) != Fullness::Full) fail(Errc::PreconditionViolated, "pad_to_window needs a full prefix");
  return pad_to_window(qpair(u), N, delta, w, budget);
}

}  // namespace hcf
