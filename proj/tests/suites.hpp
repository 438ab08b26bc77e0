#pragma once

// Randomized invariant suites shared by the acceptance runner and `hcf verify`.
// Each one counts checks and failures instead of stopping at the first failure.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hcf/approximation.hpp"
#include "hcf/core.hpp"
#include "hcf/cylinder.hpp"
#include "hcf/enumeration.hpp"
#include "hcf/real_line.hpp"
#include "oracle_enum.hpp"
#include "oracles.hpp"

namespace suites {

using namespace hcf;

struct SuiteResult {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  double seconds = 0;
  std::map<std::string, std::string> info;
  std::vector<std::string> first_failures;

  bool ok() const { return failures == 0 && checked > 0; }
  void check(bool c, const std::function<std::string()>& what) {
    ++checked;
    if (c) return;
    ++failures;
    if (first_failures.size() < 5) first_failures.push_back(what());
  }
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::uint64_t size = 0;  // 0 = the suite's default
  std::int64_t qmax = 0;   // for legendre: |q|^2 bound
};

class Timer {
 public:
  explicit Timer(SuiteResult& r) : r_(r), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() { r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  SuiteResult& r_;
  std::chrono::steady_clock::time_point t0_;
};

inline std::vector<GaussInt> digits_up_to(int M) {
  std::vector<GaussInt> out;
  for (int x = -M; x <= M; ++x)
    for (int y = -M; y <= M; ++y)
      if (x * x + y * y <= M * M && x * x + y * y > 1) out.emplace_back(x, y);
  return out;
}

inline std::uint64_t size_or(const SuiteOptions& o, std::uint64_t d) { return o.size ? o.size : d; }

// Expansion prefixes of random points: determinant, mirror formula, growth, digit bracket,
// concatenation bounds; digits and convergents against the plain oracle.
inline SuiteResult qpair_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "qpair";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  std::uint64_t want = size_or(o, 100000), prefixes = 0, points = 0;
  while (prefixes < want) {
    GaussRat z = oracle::random_gauss_fraction(rng, 1000000);
    Expansion e = hcf_expand(z, 12);
    ++points;
    auto ref = oracle::expand(z, 12);
    r.check(ref == e.digits.digits(), [&] { return "digits of " + z.str(); });
    QPairTrace t = qpair_of(e.digits);
    for (size_t k = 1; k <= t.size() && prefixes < want; ++k, ++prefixes) {
      auto where = [&] { return z.str() + " n=" + std::to_string(k); };
      GaussInt sign = k % 2 == 0 ? GaussInt(1) : GaussInt(-1);
      r.check(t.q[k] * t.p[k - 1] - t.q[k - 1] * t.p[k] == sign, where);
      r.check(GaussRat::fraction(t.p[k], t.q[k]) == oracle::evaluate(ref.size() >= k ? std::vector<GaussInt>(ref.begin(), ref.begin() + static_cast<long>(k)) : ref), where);
      // q_{k-1}/q_k against the reversed word
      std::vector<GaussInt> rv(e.digits.begin(), e.digits.begin() + static_cast<long>(k));
      std::reverse(rv.begin(), rv.end());
      r.check(GaussRat::fraction(t.q[k - 1], t.q[k]) == oracle::evaluate(rv), where);
      r.check(t.q[k - 1].norm() < t.q[k].norm(), where);
      r.check(bracket_holds(t.q[k].norm(), t.q[k - 1].norm(), e.digits[k - 1].norm()), where);
      for (size_t j = 1; j < k; ++j) {
        BigInt qa = t.q[j].norm(), qb = qpair(e.digits.suffix_from(j).prefix(k - j)).q.norm();
        // |q(a) q(b)|/5 < |q(ab)| < 3 |q(a) q(b)|, squared
        BigInt prod = qa * qb, nab = t.q[k].norm();
        r.check(prod < 25 * nab && nab < 9 * prod, where);
      }
    }
  }
  r.info["prefixes"] = std::to_string(prefixes);
  r.info["points"] = std::to_string(points);
  return r;
}

// Every p/q with |q|^2 <= qmax inside the 1/(4|q|^2) disk is a convergent; the threshold identity.
inline SuiteResult legendre_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "legendre";
  Timer tm(r);
  std::int64_t qmax = o.qmax ? o.qmax : 1600;
  std::mt19937_64 rng(o.seed);
  Threshold th = legendre_threshold();
  r.check(th.t == Rational(1, 2) && th.value == Rational(1, 4), [] { return "threshold"; });
  // min over t of max(1 - t - t^2, t/2): the two branches meet at t = 1/2, value 1/4
  auto f = [](const Rational& t) {
    Rational a = 1 - t - t * t, b = t / 2;
    return a > b ? a : b;
  };
  r.check(f(Rational(1, 2)) == Rational(1, 4), [] { return "f(1/2)"; });
  for (int i = 0; i <= 1000; ++i) {
    Rational t(i, 1000);
    r.check(f(t) >= Rational(1, 4), [&] { return "f(" + t.str() + ")"; });
  }
  std::uint64_t n = size_or(o, 500), claimed = 0;
  std::int64_t R = 0;
  while ((R + 1) * (R + 1) <= qmax) ++R;
  for (std::uint64_t i = 0; i < n; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 1000000);
    auto digits = oracle::expand(z);
    std::vector<GaussRat> conv;
    for (size_t k = 1; k <= digits.size(); ++k)
      conv.push_back(oracle::evaluate(std::vector<GaussInt>(digits.begin(), digits.begin() + static_cast<long>(k))));
    for (std::int64_t x = -R; x <= R; ++x)
      for (std::int64_t y = -R; y <= R; ++y) {
        std::int64_t qn = x * x + y * y;
        if (qn == 0 || qn > qmax) continue;
        GaussInt q(x, y);
        GaussRat qz = GaussRat(q) * z;
        // only lattice points within 1/2 of qz can qualify
        GaussInt c = nearest_gauss_int(qz);
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy) {
            GaussInt p = c + GaussInt(dx, dy);
            if (p.is_zero()) continue;
            GaussRat pq = GaussRat::fraction(p, q);
            Rational d2 = (z - pq).norm_sq();
            Rational lim = Rational(1, 16 * qn * qn);
            if (!(d2 < lim)) continue;
            ++claimed;
            bool hit = std::find(conv.begin(), conv.end(), pq) != conv.end();
            r.check(hit, [&] { return z.str() + " " + format_gauss(p) + "/" + format_gauss(q); });
          }
      }
    LegendreScan s = legendre_scan(z, qmax);
    r.check(s.counterexamples == 0, [&] { return "scan " + z.str(); });
  }
  r.info["points"] = std::to_string(n);
  r.info["claimed"] = std::to_string(claimed);
  r.info["qmax"] = std::to_string(qmax);
  return r;
}

// Convergents are good approximations, against a brute-force disk search.
inline SuiteResult good_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "good";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  std::uint64_t n = size_or(o, 500), conv = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    GaussRat z = oracle::random_gauss_fraction(rng, 2000);
    Expansion e = hcf_expand(z);
    QPairTrace t = qpair_of(e.digits);
    for (size_t k = 1; k <= t.size(); ++k) {
      ++conv;
      const GaussInt& q = t.q[k];
      GaussRat target = GaussRat(q) * z - GaussRat(t.p[k]);
      Rational tn = target.norm_sq();
      bool good = true;
      std::int64_t qn = q.norm().convert_to<std::int64_t>(), R = 0;
      while ((R + 1) * (R + 1) <= qn) ++R;
      for (std::int64_t x = -R; x <= R && good; ++x)
        for (std::int64_t y = -R; y <= R && good; ++y) {
          if ((x == 0 && y == 0) || x * x + y * y > qn) continue;
          GaussInt qq(x, y);
          GaussRat v = GaussRat(qq) * z;
          GaussRat res = v - GaussRat(nearest_gauss_int(v));
          if (res.norm_sq() < tn) good = false;
        }
      r.check(good, [&] { return "oracle " + z.str() + " n=" + std::to_string(k); });
      r.check(is_good_approximation(z, t.p[k], q), [&] { return "library " + z.str() + " n=" + std::to_string(k); });
    }
  }
  r.info["points"] = std::to_string(n);
  r.info["convergents"] = std::to_string(conv);
  return r;
}

// F_2, F_-2 and F_b for |b| >= 2 sqrt 2 against the closed forms; fullness over I_6.
inline SuiteResult prototype_suite(const SuiteOptions&) {
  SuiteResult r;
  r.name = "prototype";
  Timer tm(r);
  r.check(prototype_set(parse_digits("2")).constraints() == std::vector<GenCircle>{GenCircle::outside(GaussRat(-1), 1, true)},
          [] { return "F_2"; });
  r.check(prototype_set(parse_digits("-2")).constraints() == std::vector<GenCircle>{GenCircle::outside(GaussRat(1), 1, false)},
          [] { return "F_-2"; });
  std::uint64_t big = 0;
  for (const auto& b : digits_up_to(6)) {
    bool norm_full = b.norm() >= 8;
    if (norm_full) {
      ++big;
      r.check(prototype_set(DigitSeq({b})).is_square(), [&] { return "F_" + format_gauss(b); });
    }
    r.check((is_full(DigitSeq({b})) == Fullness::Full) == norm_full, [&] { return "is_full " + format_gauss(b); });
    r.check(oracle::square_full({b}) == norm_full, [&] { return "fold " + format_gauss(b); });
  }
  r.info["digits"] = std::to_string(digits_up_to(6).size());
  r.info["full_digits"] = std::to_string(big);
  return r;
}

inline oracle::SeqSet as_set(const std::vector<DigitSeq>& v) {
  oracle::SeqSet s;
  for (const auto& u : v) s.insert(u.digits());
  return s;
}

// Gamma_M(Q) equals the plain search; relative families equal the filtered family.
inline SuiteResult enumeration_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "enumeration-oracle";
  Timer tm(r);
  oracle::SeqSet g5;
  for (int Q : {5, 10, 20}) {
    FullFamily f = enumerate_full(3, Rational(Q));
    auto want = oracle::gamma(3, Rational(Q * Q));
    r.check(!f.budget_exceeded && as_set(f.members) == want && f.members.size() == want.size(),
            [&] { return "Q=" + std::to_string(Q); });
    r.info["Q" + std::to_string(Q)] = std::to_string(f.members.size()) + "/" + std::to_string(want.size());
    if (Q == 5) g5 = want;
  }
  std::mt19937_64 rng(o.seed);
  auto alpha = alphabet(3);
  std::uint64_t n = size_or(o, 10);
  for (std::uint64_t i = 0; i < n; ++i) {
    DigitSeq w;
    int len = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < len; ++j) w.push_back(alpha[rng() % alpha.size()]);
    RelativeFamily rf = enumerate_relative(w, 3, Rational(5));
    oracle::SeqSet want;
    for (const auto& u : g5)
      if (u.size() >= w.size() && std::equal(w.begin(), w.end(), u.begin())) want.insert(oracle::Seq(u.begin() + static_cast<long>(w.size()), u.end()));
    r.check(as_set(rf.suffixes) == want, [&] { return "w=" + w.str(); });
  }
  return r;
}

inline std::vector<GaussInt> as_gauss(const RealDigits& d) {
  std::vector<GaussInt> v;
  for (auto x : d) v.emplace_back(BigInt(x), BigInt(0));
  return v;
}

// reverse_fix on random eligible words: length, admissibility, digit growth, last sign, and
// equal values of the reversed words under random continuations.
inline SuiteResult rev_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "rev";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> dig(2, 6), sgn(0, 1), len(2, 8), cont(-5, 5);
  std::uint64_t want = size_or(o, 10000), done = 0;
  while (done < want) {
    RealDigits u;
    int n = len(rng);
    for (int j = 0; j < n; ++j) u.push_back(sgn(rng) ? dig(rng) : -dig(rng));
    RealDigits ur(u.rbegin(), u.rend());
    if (u[0] * u[1] <= 0 || !admissible_real(ur)) continue;
    RealDigits v = reverse_fix(u);
    auto where = [&] { return DigitSeq::real(u).str(); };
    r.check(v.size() == u.size(), where);
    r.check(admissible_real(v), where);
    bool grow = v.size() == u.size();
    for (size_t j = 0; grow && j < u.size(); ++j) grow = std::llabs(v[j]) <= std::llabs(u[j]) + 1;
    r.check(grow, where);
    r.check(v.back() * u.back() > 0, where);
    RealDigits vr(v.rbegin(), v.rend());
    auto a0 = as_gauss(ur), b0 = as_gauss(vr);
    for (int k = 0; k < 5; ++k) {
      auto a = a0, b = b0;
      int m = k == 0 ? 0 : 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < m; ++j) {
        GaussInt d;
        do d = GaussInt(cont(rng), cont(rng));
        while (d.norm() < 2);
        a.push_back(d);
        b.push_back(d);
      }
      r.check(oracle::evaluate(a) == oracle::evaluate(b), where);
    }
    ++done;
  }
  r.info["words"] = std::to_string(done);
  return r;
}

// x = t + [0; alpha] + [0; beta] with digits <= 29, alpha in [0, 1/2), certified to 2^-40.
inline SuiteResult sum_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "sum";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  DecomposeOptions opt;
  opt.try_exact = false;
  opt.precision = Rational(1, BigInt(1) << 40);
  std::uint64_t n = size_or(o, 1000), anomalies = 0;
  Rational maxw(0);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t d = 1 + rng() % 1000000007ull;
    Rational x(BigInt(rng() % d), BigInt(d));
    try {
      BoundedExpansion be = bounded_sum_decompose(x, opt);
      auto where = [&] { return x.str(); };
      r.check(check_bounded_expansion(be), where);
      bool small = true;
      for (const RealDigits* s : {&be.alpha, &be.beta})
        for (auto dd : *s) small = small && std::llabs(dd) <= 29;
      r.check(small, where);
      RealCell a = be.alpha.empty() ? detail::SumSearch::alpha_root() : real_cylinder(be.alpha);
      r.check(a.lo >= 0 && a.hi <= Rational(1, 2), where);
      r.check(be.sum.width() <= opt.precision && be.sum.contains(x), where);
      if (be.sum.width() > maxw) maxw = be.sum.width();
    } catch (const Error& e) {
      if (e.code() != Errc::SearchExhausted) throw;
      ++anomalies;
      r.check(false, [&] { return "SearchExhausted at " + x.str(); });
    }
  }
  r.info["points"] = std::to_string(n);
  r.info["search_exhausted"] = std::to_string(anomalies);
  r.info["max_width_log2"] = std::to_string(maxw > 0 ? approx_log2(maxw) : 0);
  return r;
}

// J1 digits against the bracket and the quadtree certificate for random full u.
inline SuiteResult annulus_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "annulus";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  auto alpha = alphabet(4);
  const char* rates[] = {"x^-3", "x^-4", "(1/20)*x^-2", "(1/8)*x^-2", "x^-5/2"};
  std::uint64_t want = size_or(o, 12), done = 0, digits = 0;
  while (done < want) {
    DigitSeq u;
    int len = 1 + static_cast<int>(rng() % 2);
    for (int j = 0; j < len; ++j) u.push_back(alpha[rng() % alpha.size()]);
    if (is_full(u) != Fullness::Full) continue;
    ApproxRate ra = ApproxRate::parse(rates[rng() % 5]);
    long k = 2 + static_cast<long>(rng() % 3);
    RatInterval rho = annulus_rho(u, ra);
    if (rho.lo <= 6 || rho.hi > 40) continue;
    DigitAnnulus a = digit_annulus(u, k, ra);
    auto where = [&] { return u.str() + " k=" + std::to_string(k); };
    for (const auto& b : a.J1) {
      ++digits;
      r.check(annulus_bracket_check(u, b, k, ra), where);
      r.check(is_full(u + DigitSeq({b})) == Fullness::Full, where);
    }
    if (!a.J1.empty()) {
      r.check(annulus_window_certify(u, a.J1.front(), k, ra) == Tri::Yes, where);
      r.check(annulus_window_certify(u, a.J1.back(), k, ra) == Tri::Yes, where);
    }
    r.check(a.J1.size() <= a.J2.size() && BigInt(a.J1.size()) == a.count_J1, where);
    ++done;
  }
  r.info["prefixes"] = std::to_string(done);
  r.info["digits"] = std::to_string(digits);
  return r;
}

// Regular cylinders over I_4 with |q|^2 <= bound: certified diameter <= 2/|q|^2, and the
// smallest lower bound of |C(u)| |q|^2.
inline SuiteResult cylinder_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "cylinder";
  Timer tm(r);
  BigInt bound = o.size ? BigInt(o.size) : BigInt(2500);
  auto alpha = alphabet(4);
  auto& aut = PrototypeAutomaton::global();
  Rational c0(-1);
  std::uint64_t regular = 0;
  std::function<void(const DigitSeq&, const QPair&)> rec = [&](const DigitSeq& s, const QPair& Q) {
    for (const auto& b : alpha) {
      QPair N = Q.push(b);
      if (N.q.norm() > bound) continue;
      DigitSeq t = s;
      t.push_back(b);
      int id = aut.id_of(t);
      if (id == PrototypeAutomaton::kEmpty) continue;
      if (is_regular(t) == Tri::Yes) {
        ++regular;
        CylinderMetrics m = cylinder_metrics(id, N);
        r.check(m.diameter_certified && m.diameter.hi <= m.bound, [&] { return t.str(); });
        if (c0 < 0 || m.c0_sample < c0) c0 = m.c0_sample;
      }
      if (is_admissible(t) != Tri::No) rec(t, N);
    }
  };
  rec(DigitSeq(), QPair());
  r.check(c0 > 0, [] { return "c0 not positive"; });
  r.info["regular"] = std::to_string(regular);
  r.info["c0"] = c0.str();
  r.info["c0_decimal"] = std::to_string(to_double(c0));
  return r;
}

// Triples for tau = 1/32, k = 2..4: t range, fullness, digit sizes, and the window over random full w
// at exact sampled points and by the cylinder quadtree.
inline SuiteResult akbk_suite(const SuiteOptions& o) {
  SuiteResult r;
  r.name = "akbk";
  Timer tm(r);
  std::mt19937_64 rng(o.seed);
  Rational tau(1, 32);
  auto alpha = alphabet(4);
  std::uint64_t per = size_or(o, 100);
  for (long k = 2; k <= 4; ++k) {
    Rational zeta = (1 - Rational(1, 2 * k)) * tau, xi = (1 - Rational(1, 3 * k)) * tau;
    AtbWindow w = build_atb(zeta, xi);
    std::string K = "k=" + std::to_string(k);
    r.check(3 <= w.t && Rational(w.t) < 1 / zeta + 1, [&] { return K + " t=" + w.t.str(); });
    DigitSeq atb = atb_word(w);
    r.check(is_full(atb) == Fullness::Full && oracle::square_full(atb.digits()), [&] { return K + " not full"; });
    bool small = true;
    for (auto d : w.a) small = small && std::llabs(d) <= 30;
    for (auto d : w.b) small = small && std::llabs(d) <= 29;
    r.check(small, [&] { return K + " digit sizes"; });
    r.check(w.sum_lo > 1 / xi && w.sum_hi < 1 / zeta, [&] { return K + " enclosure"; });
    std::uint64_t done = 0;
    while (done < per) {
      DigitSeq u;
      int n = static_cast<int>(rng() % 4);
      for (int j = 0; j < n; ++j) u.push_back(alpha[rng() % alpha.size()]);
      if (is_full(u) != Fullness::Full) continue;
      DigitSeq s = u + atb;
      r.check(is_full(s) == Fullness::Full, [&] { return K + " w=" + u.str(); });
      for (int t = 0; t < 2; ++t) {
        std::vector<GaussInt> v = s.digits();
        for (int j = 0; j <= t; ++j) {
          GaussInt b;
          do b = GaussInt(static_cast<std::int64_t>(rng() % 11) - 5, static_cast<std::int64_t>(rng() % 11) - 5);
          while (b.norm() < 8);
          v.push_back(b);
        }
        Rational d2 = atb_scaled_distance_sq(u, w, oracle::evaluate(v));
        r.check(d2 > zeta * zeta && d2 < xi * xi, [&] { return K + " sample w=" + u.str(); });
      }
      if (done < 3) {
        QPair Q = qpair(u + to_digit_seq(w.a));
        Rational qn(Q.q.norm());
        Tri c = distance_window_on_cylinder(s, GaussRat::fraction(Q.p, Q.q), zeta / qn, xi / qn, 4);
        r.check(c != Tri::No, [&] { return K + " quadtree w=" + u.str(); });
      }
      ++done;
    }
    r.info[K] = "t=" + w.t.str() + " |a|=" + std::to_string(w.a.size()) + " |b|=" + std::to_string(w.b.size());
  }
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static std::vector<std::string> n = {"qpair", "legendre", "good", "prototype", "enumeration-oracle",
                                       "rev", "sum", "akbk", "annulus", "cylinder"};
  return n;
}

inline SuiteResult run_suite(const std::string& name, const SuiteOptions& o) {
  if (name == "qpair") return qpair_suite(o);
  if (name == "legendre") return legendre_suite(o);
  if (name == "good") return good_suite(o);
  if (name == "prototype") return prototype_suite(o);
  if (name == "enumeration-oracle") return enumeration_suite(o);
  if (name == "rev") return rev_suite(o);
  if (name == "sum") return sum_suite(o);
  if (name == "akbk") return akbk_suite(o);
  if (name == "annulus") return annulus_suite(o);
  if (name == "cylinder") return cylinder_suite(o);
  throw std::out_of_range("unknown suite " + name);
}

}  // namespace suites
