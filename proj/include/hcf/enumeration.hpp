#pragma once

#include <cmath>
#include <functional>

#include "hcf/cylinder.hpp"
#include "hcf/rate.hpp"

namespace hcf {

// Lattice points with |z|^2 <= R_sq, row by row over the bounding box.
inline BigInt gauss_circle_count(const Rational& R_sq) {
  if (R_sq < 0) fail(Errc::InvalidArgument, "negative squared radius");
  BigInt t = floor(R_sq);
  BigInt r = isqrt(t);
  BigInt n = 0;
  for (BigInt x = -r; x <= r; ++x) n += 2 * isqrt(t - x * x) + 1;
  return n;
}

// Lattice points with |z|^2 < R_sq.
inline BigInt gauss_circle_count_open(const Rational& R_sq) {
  if (R_sq <= 0) return 0;
  BigInt t = floor(R_sq);
  if (Rational(t) == R_sq) t -= 1;
  return gauss_circle_count(Rational(t));
}

inline std::vector<GaussInt> alphabet(long M) {
  if (M < 2) fail(Errc::InvalidArgument, "alphabet needs M >= 2");
  std::vector<GaussInt> out;
  for (long x = -M; x <= M; ++x)
    for (long y = -M; y <= M; ++y) {
      long n = x * x + y * y;
      if (n >= 2 && n <= M * M) out.emplace_back(BigInt(x), BigInt(y));
    }
  std::sort(out.begin(), out.end(), GaussLess());
  return out;
}

inline bool in_alphabet(const DigitSeq& s, long M) {
  for (const auto& b : s)
    if (b.norm() > BigInt(M) * M) return false;
  return true;
}

struct FullFamily {
  long M = 0;
  Rational Q_sq;
  std::vector<DigitSeq> members;
  size_t policy_log = 0;  // crossings with undecided fullness, excluded
  bool budget_exceeded = false;
  size_t visited = 0;
};

namespace detail {

struct DfsNode {
  int id;
  GaussInt q_prev, q;
};

// Extends `prefix` below the crossing threshold; calls on_cross(seq, id) at each admissible crossing.
// Returns false when the budget ran out.
template <class OnCross>
bool crossing_dfs(DigitSeq& seq, const DfsNode& node, const std::vector<GaussInt>& alpha, const Rational& Q_sq,
                  size_t budget, size_t& visited, OnCross&& on_cross) {
  auto& aut = PrototypeAutomaton::global();
  BigInt qn = node.q.norm();
  for (const auto& b : alpha) {
    if (budget && visited >= budget) return false;
    ++visited;
    int id = aut.step(node.id, b);
    if (id == PrototypeAutomaton::kEmpty) continue;
    GaussInt q2 = b * node.q + node.q_prev;
    BigInt n2 = q2.norm();
    // admissible branches have strictly growing |q|
    if (n2 <= qn) continue;
    seq.push_back(b);
    if (Rational(n2) >= Q_sq) {
      on_cross(seq, id);
    } else if (!crossing_dfs(seq, DfsNode{id, node.q, q2}, alpha, Q_sq, budget, visited, on_cross)) {
      seq.pop_back();
      return false;
    }
    seq.pop_back();
  }
  return true;
}

inline void check_threshold(long M, const Rational& Q) {
  if (M < 2) fail(Errc::InvalidArgument, "M must be at least 2");
  if (Q <= 1) fail(Errc::InvalidArgument, "Q must exceed 1");
}

}  // namespace detail

// Gamma_M(Q): full u over I_M with |q(u^-)| < Q <= |q(u)|.
inline FullFamily enumerate_full(long M, const Rational& Q, size_t budget = 0) {
  detail::check_threshold(M, Q);
  FullFamily fam;
  fam.M = M;
  fam.Q_sq = Q * Q;
  auto alpha = alphabet(M);
  auto& aut = PrototypeAutomaton::global();
  DigitSeq seq;
  bool ok = detail::crossing_dfs(seq, {0, GaussInt(0), GaussInt(1)}, alpha, fam.Q_sq, budget, fam.visited,
                                 [&](const DigitSeq& s, int id) {
                                   if (aut.region(id).is_square()) fam.members.push_back(s);
                                 });
  fam.budget_exceeded = !ok;
  return fam;
}

struct RelativeFamily {
  DigitSeq w;
  long M = 0;
  Rational Q_sq;
  std::vector<DigitSeq> suffixes;
  size_t policy_log = 0;
  bool budget_exceeded = false;
  // log of #suffixes / ((M+1)^{24M} |q(w)|^{-4+2/M} #Gamma_M(Q)), when the full family size is supplied
  std::optional<double> log_ratio;
};

inline RelativeFamily enumerate_relative(const DigitSeq& w, long M, const Rational& Q, size_t budget = 0,
                                         std::optional<size_t> gamma_size = std::nullopt) {
  detail::check_threshold(M, Q);
  if (!in_alphabet(w, M)) fail(Errc::InvalidArgument, "prefix not over the alphabet I_M");
  RelativeFamily fam;
  fam.w = w;
  fam.M = M;
  fam.Q_sq = Q * Q;
  auto& aut = PrototypeAutomaton::global();
  int id = aut.id_of(w);
  QPair Qw = qpair(w);
  if (id != PrototypeAutomaton::kEmpty) {
    if (Rational(Qw.q.norm()) >= fam.Q_sq) {
      // only the empty suffix can work
      bool below = w.empty() || Rational(Qw.q_prev.norm()) < fam.Q_sq;
      if (below && aut.region(id).is_square()) fam.suffixes.push_back(DigitSeq());
    } else {
      auto alpha = alphabet(M);
      DigitSeq seq = w;
      size_t visited = 0;
      bool ok = detail::crossing_dfs(seq, {id, Qw.q_prev, Qw.q}, alpha, fam.Q_sq, budget, visited,
                                     [&](const DigitSeq& s, int cid) {
                                       if (aut.region(cid).is_square()) fam.suffixes.push_back(s.suffix_from(w.size()));
                                     });
      fam.budget_exceeded = !ok;
    }
  }
  if (gamma_size && *gamma_size > 0 && !fam.suffixes.empty()) {
    double Md = static_cast<double>(M);
    double lq = 0.5 * log_rational(Rational(Qw.q.norm()));
    double bound = 24 * Md * std::log(Md + 1) + (-4 + 2 / Md) * lq + std::log(static_cast<double>(*gamma_size));
    fam.log_ratio = std::log(static_cast<double>(fam.suffixes.size())) - bound;
  }
  return fam;
}

struct DigitAnnulus {
  DigitSeq u;
  long k = 2;
  ApproxRate rate;
  RatInterval rho;
  std::vector<GaussInt> J1, J2, certified;
  BigInt count_J1, count_J2;  // from lattice counts at the bounding radii (exact mode only)
  RatInterval count_J1_bounds, count_J2_bounds;
  bool counts_exact = true;
  bool listed_all = true;  // J1 and J2 hold every digit of their shells
  // radii of the shells, squared; J1 is lo1 < |b|^2 < hi1, J2 is lo2 < |b|^2 < hi2
  Rational lo1_sq, hi1_sq, lo2_sq, hi2_sq;
  Rational rho_k;
  bool count_bounds_apply = false;  // rho > rho_k
  bool lower_ok = false;            // #J1 > rho^2 / k
  bool upper_ok = false;            // #J2 < 3 pi rho^2
};

struct AnnulusOptions {
  Rational rho_k{12};
  size_t list_cap = 0;  // 0: every digit of J1
  BigInt exact_radius{4096};  // exact counts up to this radius
  BigInt list_radius{128};    // with a cap, shells beyond this radius are sampled, not listed
};

namespace detail {

// b with lo_sq < |b|^2 < hi_sq, in digit order
inline std::vector<GaussInt> lattice_shell(const Rational& lo_sq, const Rational& hi_sq) {
  std::vector<GaussInt> out;
  if (hi_sq <= lo_sq) return out;
  BigInt r = isqrt(floor(hi_sq));
  for (BigInt x = -r; x <= r; ++x) {
    Rational rest = hi_sq - Rational(x * x);
    if (rest <= 0) continue;
    BigInt ry = isqrt(floor(rest));
    for (BigInt y = -ry; y <= ry; ++y) {
      Rational n(x * x + y * y);
      if (n > lo_sq && n < hi_sq && n >= 2) out.emplace_back(x, y);
    }
  }
  std::sort(out.begin(), out.end(), GaussLess());
  return out;
}

inline Rational square_or_zero(const Rational& v) { return v <= 0 ? Rational(0) : v * v; }

// #{lo < |b|^2 < hi} enclosed by pi (R -+ 1)^2 on both radii
inline RatInterval shell_count_bounds(const Rational& lo_sq, const Rational& hi_sq) {
  if (hi_sq <= lo_sq) return RatInterval(Rational(0));
  RatInterval pi = pi_bounds(64);
  RatInterval rl = sqrt_bounds(lo_sq, 64), rh = sqrt_bounds(hi_sq, 64);
  Rational outer_lo = rh.lo > 1 ? pi.lo * (rh.lo - 1) * (rh.lo - 1) : Rational(0);
  Rational outer_hi = pi.hi * (rh.hi + 1) * (rh.hi + 1);
  Rational inner_lo = rl.lo > 1 ? pi.lo * (rl.lo - 1) * (rl.lo - 1) : Rational(0);
  Rational inner_hi = pi.hi * (rl.hi + 1) * (rl.hi + 1);
  Rational lo = outer_lo - inner_hi;
  return {lo < 0 ? Rational(0) : lo, outer_hi - inner_lo};
}

// up to cap digits spread around the middle radius of the shell, each checked exactly
inline std::vector<GaussInt> spread_shell(const Rational& lo_sq, const Rational& hi_sq, size_t cap) {
  std::vector<GaussInt> out;
  if (hi_sq <= lo_sq || cap == 0) return out;
  Rational mid = (lo_sq + hi_sq) / 2;
  BigInt R = isqrt(floor(mid));
  const double two_pi = 6.283185307179586;
  for (size_t j = 0; j < cap; ++j) {
    double th = two_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(cap);
    Rational c = rational_from_double(std::cos(th)), s = rational_from_double(std::sin(th));
    GaussInt b(floor(Rational(R) * c), floor(Rational(R) * s));
    Rational n(b.norm());
    if (n > lo_sq && n < hi_sq && n >= 2) out.push_back(b);
  }
  std::sort(out.begin(), out.end(), GaussLess());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<GaussInt> evenly(const std::vector<GaussInt>& v, size_t cap) {
  if (cap == 0 || v.size() <= cap) return v;
  std::vector<GaussInt> out;
  for (size_t j = 0; j < cap; ++j) out.push_back(v[j * v.size() / cap]);
  return out;
}

}  // namespace detail

inline RatInterval annulus_rho(const QPair& Q, const ApproxRate& rate) {
  BigInt qn = Q.q.norm();
  RatInterval psi = rate.eval_at_norm(qn);
  if (psi.lo <= 0) fail(Errc::PrecisionExhausted, "rate enclosure touches zero");
  return {1 / (Rational(qn) * psi.hi), 1 / (Rational(qn) * psi.lo)};
}

inline RatInterval annulus_rho(const DigitSeq& u, const ApproxRate& rate) { return annulus_rho(qpair(u), rate); }

// The caller vouches that the word behind Q is full.
inline DigitAnnulus digit_annulus(const QPair& Q, long k, const ApproxRate& rate, const AnnulusOptions& opt) {
  if (k < 2) fail(Errc::InvalidArgument, "window index k must be at least 2");
  DigitAnnulus a;
  a.k = k;
  a.rate = rate;
  a.rho = annulus_rho(Q, rate);
  a.rho_k = opt.rho_k;
  if (a.rho.lo <= 6) fail(Errc::RateTooLarge, "rho = " + a.rho.lo.str() + " <= 6");
  Rational kap(k, k - 1);
  a.lo1_sq = (a.rho.hi + 2) * (a.rho.hi + 2);
  a.hi1_sq = detail::square_or_zero(kap * a.rho.lo - 2);
  a.lo2_sq = (a.rho.lo - 2) * (a.rho.lo - 2);
  a.hi2_sq = (kap * a.rho.hi + 2) * (kap * a.rho.hi + 2);
  Rational lim = Rational(opt.exact_radius) * Rational(opt.exact_radius);
  Rational list_lim = Rational(opt.list_radius) * Rational(opt.list_radius);
  a.counts_exact = a.hi2_sq <= lim;
  if (a.counts_exact) {
    auto shell_count = [](const Rational& lo, const Rational& hi) {
      if (hi <= lo) return BigInt(0);
      return BigInt(gauss_circle_count_open(hi) - gauss_circle_count(lo));
    };
    a.count_J1 = shell_count(a.lo1_sq, a.hi1_sq);
    a.count_J2 = shell_count(a.lo2_sq, a.hi2_sq);
    a.count_J1_bounds = RatInterval(Rational(a.count_J1));
    a.count_J2_bounds = RatInterval(Rational(a.count_J2));
  } else {
    a.count_J1_bounds = detail::shell_count_bounds(a.lo1_sq, a.hi1_sq);
    a.count_J2_bounds = detail::shell_count_bounds(a.lo2_sq, a.hi2_sq);
  }
  if (opt.list_cap == 0 || a.hi2_sq <= list_lim) {
    a.J1 = detail::lattice_shell(a.lo1_sq, a.hi1_sq);
    a.J2 = detail::lattice_shell(a.lo2_sq, a.hi2_sq);
    if (opt.list_cap && a.J1.size() > opt.list_cap) {
      a.J1 = detail::evenly(a.J1, opt.list_cap);
      a.J2.clear();
      a.listed_all = false;
    }
  } else {
    a.J1 = detail::spread_shell(a.lo1_sq, a.hi1_sq, opt.list_cap);
    a.listed_all = false;
  }
  a.certified = a.J1;
  a.count_bounds_apply = a.rho.lo > opt.rho_k;
  RatInterval pi = pi_bounds(64);
  a.lower_ok = a.count_J1_bounds.lo * k > a.rho.hi * a.rho.hi;
  a.upper_ok = a.count_J2_bounds.hi < 3 * pi.lo * a.rho.lo * a.rho.lo;
  return a;
}

inline DigitAnnulus digit_annulus(const DigitSeq& u, long k, const ApproxRate& rate, const Rational& rho_k = 12) {
  if (k < 2) fail(Errc::InvalidArgument, "window index k must be at least 2");
  if (is_full(u) != Fullness::Full) fail(Errc::PreconditionViolated, "annulus needs a full prefix");
  AnnulusOptions opt;
  opt.rho_k = rho_k;
  opt.exact_radius = BigInt(1) << 40;
  DigitAnnulus a = digit_annulus(qpair(u), k, rate, opt);
  a.u = u;
  return a;
}

// Membership of b in the annulus: Yes on J1, No outside J2, Unknown on the shell between.
inline Tri annulus_membership(const DigitAnnulus& a, const GaussInt& b) {
  Rational n(b.norm());
  if (n > a.lo1_sq && n < a.hi1_sq) return Tri::Yes;
  if (!(n > a.lo2_sq && n < a.hi2_sq)) return Tri::No;
  return Tri::Unknown;
}

// The bracket |q|^-2 (|b|+2)^-1 < |z - p/q| < |q|^-2 (|b|-2)^-1 on C(ub), compared with the window
// (1-1/k) psi <= . < psi using the enclosure of psi(|q(u)|).
inline bool annulus_bracket_check(const QPair& Q, const GaussInt& b, long k, const ApproxRate& rate) {
  BigInt qn = Q.q.norm();
  RatInterval psi = rate.eval_at_norm(qn);
  RatInterval ab = sqrt_bounds(Rational(b.norm()), 96);
  if (ab.lo <= 2) return false;
  Rational f(k - 1, k);
  bool lower = f * psi.hi * Rational(qn) * (ab.hi + 2) <= 1;
  bool upper = psi.lo * Rational(qn) * (ab.lo - 2) >= 1;
  return lower && upper;
}

inline bool annulus_bracket_check(const DigitSeq& u, const GaussInt& b, long k, const ApproxRate& rate) {
  return annulus_bracket_check(qpair(u), b, k, rate);
}

// Direct certification of the window over an enclosure of C(ub).
inline Tri annulus_window_certify(const DigitSeq& u, const GaussInt& b, long k, const ApproxRate& rate,
                                  unsigned max_depth = 6) {
  QPair Q = qpair(u);
  RatInterval psi = rate.eval_at_norm(Q.q.norm());
  DigitSeq ub = u;
  ub.push_back(b);
  GaussRat c = GaussRat::fraction(Q.p, Q.q);
  return distance_window_on_cylinder(ub, c, Rational(k - 1, k) * psi.hi, psi.lo, max_depth);
}

}  // namespace hcf
