#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hcf/real_line.hpp"
#include "hcf/small_o.hpp"

namespace hcf {

struct ScheduleTau {
  ApproxRate rate;
  Rational tau;
  std::optional<Rational> c1;
  long M = 30;
  Rational d_tau;
  std::vector<AtbWindow> triples;  // triples[k-2] for level k
  std::vector<BigInt> n;           // n[0] = 1; 0 means chosen while building
  std::vector<Rational> Q;         // Q[0] unused
  bool Q_given = false;
  BuildMode mode = BuildMode::Desk;
  std::vector<ConditionCheck> report;

  size_t depth() const { return n.size(); }
  const AtbWindow& triple(size_t k) const { return triples.at(k - 2); }
};

struct TauOverrides {
  std::vector<BigInt> n;     // desk; entries equal to 0 are chosen automatically
  std::vector<Rational> Q;   // desk; replaces n_k^{1-1/k}
  std::optional<Rational> c1;
  double log10_cap = 60;
};

inline Rational d_tau_of(const Rational& tau) { return 2 - tau / (1 - 2 * tau); }

namespace detail {

inline bool digits_within(const RealDigits& d, std::int64_t m) {
  for (auto x : d)
    if (x > m || x < -m) return false;
  return true;
}

// x^2 psi(x) strictly inside ((1-1/(3k)) tau, (1+1/(2k)) tau) at both ends of [(1-1/(9k)) n, n]
inline bool nkpsi2_holds(const ApproxRate& r, const Rational& tau, long k, const BigInt& n) {
  Rational lo = (1 - Rational(1, 3 * k)) * tau, hi = (1 + Rational(1, 2 * k)) * tau;
  for (const Rational& x : {(1 - Rational(1, 9 * k)) * Rational(n), Rational(n)}) {
    RatInterval v = r.eval(x);
    if (!(v.lo * x * x > lo && v.hi * x * x < hi)) return false;
  }
  return true;
}

}  // namespace detail

// Conditions that need n_k.
inline std::vector<ConditionCheck> tau_scale_conditions(const ScheduleTau& s, size_t k) {
  std::vector<ConditionCheck> out;
  long kk = static_cast<long>(k);
  const BigInt& nk = s.n[k - 1];
  double L = ln_big(nk), Lp = ln_big(s.n[k - 2]);
  double lM = std::log(static_cast<double>(s.M + 1));
  out.push_back({"nkpsi2", kk, detail::nkpsi2_holds(s.rate, s.tau, kk, nk), 0, 0, "checked at both ends of the window"});
  double need = std::log(3.0) + lM + (k > 2 ? (1 + 1.0 / (kk - 1)) * Lp : 0.0);
  out.push_back({"nk>k-1.scale", kk, L / kk >= need, need, L / kk, "ell_k replaced by the padding search"});
  BigInt tb = qpair(to_digit_seq(RealDigits{s.triple(k).t.convert_to<std::int64_t>()}) + to_digit_seq(s.triple(k).b)).q.norm();
  BigInt lhs = nk * nk, rhs = 1;
  for (long i = 0; i < kk; ++i) rhs *= 9 * tb;
  out.push_back({"nk>k-1.tb", kk, lhs >= rhs, 0.5 * (std::log(9.0) + ln_big(tb)), L / kk, "n_k^(1/k) >= 3|q(t_k b_k)|"});
  double lq = log_rational(s.Q[k - 1]);
  out.push_back({"Qk2", kk, lq >= 5 * s.M * lM, 5 * s.M * lM, lq, "Q_k >= (M+1)^(5M)"});
  return out;
}

inline ScheduleTau schedule_build_tau(const ApproxRate& rate, size_t depth, BuildMode mode, const TauOverrides& ov = {}) {
  RateClass rc = rate.classify();
  if (rc.tau.infinite || rc.tau.value <= 0) fail(Errc::TauOutOfRange, "tau(psi) = " + rc.tau.str() + " is not in (0, inf)");
  if (rc.tau.value > Rational(1, 32)) fail(Errc::TauOutOfRange, "tau = " + rc.tau.value.str() + " exceeds 1/32");
  if (depth < 1) fail(Errc::InvalidArgument, "depth must be at least 1");
  ScheduleTau s;
  s.rate = rate;
  s.tau = rc.tau.value;
  s.c1 = ov.c1;
  s.mode = mode;
  s.M = static_cast<long>(floor(1 / s.tau)) - 2;
  s.d_tau = d_tau_of(s.tau);
  if (s.c1) {
    Rational t0 = 1 / (12 * *s.c1 + 2);
    s.report.push_back({"tau0", 1, s.tau <= t0, to_double(s.tau), to_double(t0), "tau <= 1/(12 c1 + 2)"});
  } else {
    s.report.push_back({"tau0", 1, true, to_double(s.tau), 1.0 / 32, "c1 not given; only tau <= 1/32 checked"});
  }
  for (size_t k = 2; k <= depth; ++k) {
    long kk = static_cast<long>(k);
    AtbWindow w = build_atb((1 - Rational(1, 2 * kk)) * s.tau, (1 - Rational(1, 3 * kk)) * s.tau);
    s.report.push_back({"t<2tau", kk, Rational(w.t) < 2 / s.tau, to_double(Rational(w.t)), to_double(2 / s.tau), ""});
    bool dig = detail::digits_within(w.a, std::min<long>(30, s.M)) && detail::digits_within(w.b, std::min<long>(29, s.M));
    s.report.push_back({"akbk1", kk, dig, 0, 0, "a_k, b_k digits within 30/29 and M"});
    s.triples.push_back(std::move(w));
  }
  double lM = std::log(static_cast<double>(s.M + 1));
  if (mode == BuildMode::Strict) {
    s.n.push_back(1);
    for (size_t k = 2; k <= depth; ++k) {
      double kk = static_cast<double>(k);
      double L = 5 * s.M * lM * kk / (kk - 1);
      if (L / std::log(10.0) > ov.log10_cap)
        fail(Errc::Infeasible, "Q_" + std::to_string(k) + " >= (M+1)^(5M) needs n_k about 10^" +
                                   std::to_string(static_cast<long>(L / std::log(10.0))) + ", beyond the cap");
      s.n.push_back(big_from_log(L));
    }
  } else {
    if (ov.n.size() < depth) fail(Errc::InvalidArgument, "desk mode needs n_1 .. n_depth (0 = automatic)");
    s.n.assign(ov.n.begin(), ov.n.begin() + static_cast<long>(depth));
    if (s.n[0] != 1) fail(Errc::InvalidArgument, "n_1 must be 1");
  }
  s.Q.assign(depth, Rational(1));
  s.Q_given = !ov.Q.empty();
  for (size_t k = 2; k <= depth; ++k) {
    if (s.Q_given) {
      if (ov.Q.size() < depth) fail(Errc::InvalidArgument, "Q override needs Q_1 .. Q_depth");
      s.Q[k - 1] = ov.Q[k - 1];
    } else if (s.n[k - 1] > 0) {
      s.Q[k - 1] = rational_from_double(std::exp((1 - 1.0 / static_cast<double>(k)) * ln_big(s.n[k - 1])));
    } else {
      fail(Errc::InvalidArgument, "automatic n_k needs explicit Q_k");
    }
    if (s.Q[k - 1] <= 1) fail(Errc::InvalidArgument, "Q_" + std::to_string(k) + " must exceed 1");
    if (s.n[k - 1] > 0)
      for (auto& c : tau_scale_conditions(s, k)) s.report.push_back(std::move(c));
  }
  return s;
}

struct LevelAuditTau {
  long k = 0;
  size_t lambda_size = 0, gamma_size = 0, u_used = 0;
  BigInt n_k{0};
  size_t n_retries = 0;
  size_t window_certified = 0, window_failed = 0;
  size_t direct_yes = 0, direct_unknown = 0, direct_no = 0;
  size_t q_cap_ok = 0, q_cap_fail = 0;    // |q(a)| <= n_k^{1+1/k}
  size_t digits_ok = 0, digits_fail = 0;  // digits in I_{2/tau}
  size_t full_certified = 0;
  bool count_identity = false;            // #Lambda_k = #Lambda_{k-1} * branching
  size_t pad_max_len = 0;
};

struct LambdaFamilyTau {
  ScheduleTau schedule;
  CantorTree tree;
  std::vector<std::vector<int>> lambda;  // [1] = {root}
  std::vector<std::vector<DigitSeq>> gamma_used;
  std::vector<LevelAuditTau> audits;
  size_t depth() const { return lambda.size() - 1; }
};

struct BuildOptionsTau {
  size_t budget = 2000000;
  size_t u_cap = 0;
  size_t pad_budget = 1000000;
  size_t direct_checks = 2;
  unsigned direct_depth = 5;
  size_t auto_retries = 64;
};

// Window (1-1/k) psi(|q|) < |z - p/q| < psi(|q|) at the marked prefix, for all z in C(member):
// |z - p/q| |q|^2 lies in (1/sum_hi, 1/sum_lo) by the triple's certificate.
inline bool tau_window_certified(const ApproxRate& rate, const AtbWindow& w, long k, const BigInt& qn) {
  RatInterval psi = rate.eval_at_norm(qn);
  Rational R_lo = psi.lo * Rational(qn), R_hi = psi.hi * Rational(qn);
  return Rational(k - 1, k) * R_hi < 1 / w.sum_hi && 1 / w.sum_lo < R_lo;
}

inline LambdaFamilyTau build_lambda_tau(const ScheduleTau& s, size_t depth, const BuildOptionsTau& opt = {}) {
  if (depth < 1 || depth > s.depth()) fail(Errc::InvalidArgument, "depth outside the schedule");
  LambdaFamilyTau F;
  F.schedule = s;
  F.lambda.assign(depth + 1, {});
  F.gamma_used.assign(depth + 1, {});
  F.lambda[1] = {0};
  F.audits.push_back({});
  F.audits.back().k = 1;
  F.audits.back().lambda_size = 1;
  F.audits.back().count_identity = true;
  Rational two_over_tau = 2 / s.tau;
  for (size_t k = 2; k <= depth; ++k) {
    long kk = static_cast<long>(k);
    LevelAuditTau au;
    au.k = kk;
    const AtbWindow& W = s.triple(k);
    DigitSeq a_k = to_digit_seq(W.a), atb = atb_word(W);
    QPair Qa = qpair(a_k);
    FullFamily G = enumerate_full(s.M, s.Q[k - 1], opt.budget);
    if (G.budget_exceeded) fail(Errc::BudgetExceeded, "Gamma_M(Q_" + std::to_string(k) + ") exceeded the budget");
    au.gamma_size = G.members.size();
    F.gamma_used[k] = evenly_pick(G.members, opt.u_cap);
    au.u_used = F.gamma_used[k].size();
    std::vector<QPair> uq;
    for (const auto& u : F.gamma_used[k]) uq.push_back(qpair(u));
    // scale: user value, or large enough for the |q| cap and for the padding to have room
    BigInt nk = F.schedule.n[k - 1];
    bool automatic = nk == 0;
    if (automatic) {
      BigInt tb = qpair(DigitSeq({GaussInt(W.t)}) + to_digit_seq(W.b)).q.norm();
      BigInt base = 1;
      for (int parent : F.lambda[k - 1])
        for (const auto& Q : uq) base = std::max(base, (F.tree[parent].Q * Q * Qa).q.norm());
      BigInt cap = 1;
      for (long i = 0; i < kk; ++i) cap *= 3 * (isqrt(tb) + 1);
      nk = std::max(cap, (isqrt(base) + 1) * BigInt("1000000000000"));
    }
    struct Pending {
      int parent;
      size_t j;
      PadResult pad;
    };
    std::vector<Pending> pend;
    for (size_t attempt = 0;; ++attempt) {
      pend.clear();
      try {
        for (int parent : F.lambda[k - 1])
          for (size_t j = 0; j < uq.size(); ++j) {
            QPair Qau = F.tree[parent].Q * uq[j];
            pend.push_back({parent, j, pad_to_window(Qau, Rational(nk), Rational(1, 9 * kk), a_k, opt.pad_budget)});
          }
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::WindowUnreachable || !automatic || attempt + 1 >= opt.auto_retries) throw;
        // step by the window width so that consecutive targets overlap
        nk = nk * (9 * kk + 1) / (9 * kk) + 1;
        ++au.n_retries;
      }
    }
    F.schedule.n[k - 1] = nk;
    au.n_k = nk;
    if (!F.schedule.Q_given)
      F.schedule.Q[k - 1] = rational_from_double(std::exp((1 - 1.0 / static_cast<double>(k)) * ln_big(nk)));
    if (automatic)
      for (auto& c : tau_scale_conditions(F.schedule, k)) F.schedule.report.push_back(std::move(c));
    // |q(a)|^2k <= n_k^{2k+2}
    BigInt npow = 1;
    for (long i = 0; i < 2 * kk + 2; ++i) npow *= nk;
    size_t direct_left = opt.direct_checks;
    for (const auto& p : pend) {
      const DigitSeq& u = F.gamma_used[k][p.j];
      DigitSeq ext = u + p.pad.v + atb;
      size_t mark = F.tree[p.parent].length + u.size() + p.pad.v.size() + a_k.size();
      au.pad_max_len = std::max(au.pad_max_len, p.pad.v.size());
      int id = F.tree.add(p.parent, std::move(ext), kk, false, mark);
      F.lambda[k].push_back(id);
      // full parent, full u, {3,4} digits and the full triple word concatenate to a full word
      ++au.full_certified;
      const auto& node = F.tree[id];
      BigInt qpow = 1;
      for (long i = 0; i < kk; ++i) qpow *= node.Q.q.norm();
      if (qpow <= npow) ++au.q_cap_ok;
      else ++au.q_cap_fail;
      bool dig = true;
      for (const auto& d : node.ext) dig = dig && Rational(d.norm()) <= two_over_tau * two_over_tau;
      if (dig) ++au.digits_ok;
      else ++au.digits_fail;
      if (tau_window_certified(s.rate, W, kk, p.pad.q_norm)) ++au.window_certified;
      else ++au.window_failed;
      if (direct_left > 0) {
        --direct_left;
        DigitSeq full = F.tree.sequence(id);
        QPair Qm = qpair(DigitSeq(std::vector<GaussInt>(full.begin(), full.begin() + static_cast<long>(mark))));
        RatInterval psi = s.rate.eval_at_norm(Qm.q.norm());
        Tri t = distance_window_on_cylinder(full, GaussRat::fraction(Qm.p, Qm.q), Rational(kk - 1, kk) * psi.hi, psi.lo,
                                            opt.direct_depth);
        if (t == Tri::Yes) ++au.direct_yes;
        else if (t == Tri::No) ++au.direct_no;
        else ++au.direct_unknown;
      }
    }
    au.lambda_size = F.lambda[k].size();
    au.count_identity = au.lambda_size == F.lambda[k - 1].size() * au.u_used;
    F.audits.push_back(au);
  }
  measure_build(F.tree);
  return F;
}

inline std::vector<DigitSeq> members(const LambdaFamilyTau& F, size_t k) {
  std::vector<DigitSeq> out;
  for (int id : F.lambda.at(k)) out.push_back(F.tree.sequence(id));
  return out;
}

// mu(C(a_hat)) = (children of a_hat) / #Lambda_k and level mass * #Lambda_k = 1, exactly
inline bool tau_measure_identity(const LambdaFamilyTau& F) {
  for (size_t k = 2; k <= F.depth(); ++k) {
    Rational size(static_cast<long>(F.lambda[k].size()));
    for (int id : F.lambda[k])
      if (F.tree[id].mass * size != 1) return false;
    for (int parent : F.lambda[k - 1])
      if (F.tree[parent].mass != Rational(static_cast<long>(F.tree[parent].children.size())) / size) return false;
  }
  return mass_conserved(F.tree);
}

struct ExactnessAudit {
  size_t convergents = 0;
  size_t regime_i = 0, regime_i_failed = 0;
  size_t regime_ii = 0, regime_ii_failed = 0;
  size_t escaped = 0;            // |b| > M away from every marked prefix
  double min_margin_ii = 0;      // min of ((1/tau - 1/4) |q|^2 psi(|q|))^-1 over regime (ii)
  size_t margin_below = 0;       // regime (ii) convergents with margin <= 1 + tau/5
  bool passed() const { return regime_i_failed == 0 && regime_ii_failed == 0 && escaped == 0; }
};

// Every convergent p_n/q_n of the sampled prefix, with next digit b, is checked against
// (i) the window at marked prefixes or (ii) |z - p/q| > (1/tau - 1/4)^-1 |q|^-2 when |b| <= M.
inline ExactnessAudit exactness_audit(const LambdaFamilyTau& F, const SampledPoint& sp) {
  if (sp.chain.empty()) fail(Errc::DepthExhausted, "empty sample");
  const auto& s = F.schedule;
  ExactnessAudit au;
  std::vector<std::pair<size_t, size_t>> marks;  // (length, level)
  for (int id : sp.chain) marks.push_back({F.tree[id].mark, static_cast<size_t>(F.tree[id].level)});
  QPairTrace tr = qpair_of(sp.prefix);
  Rational bound = 1 / s.tau - Rational(1, 4);
  RatInterval half_sqrt2 = sqrt_bounds(Rational(1, 2), 96);
  Rational tau_margin = 1 + s.tau / 5;
  bool first = true;
  for (size_t n = 0; n < sp.prefix.size(); ++n) {
    ++au.convergents;
    const GaussInt& b = sp.prefix[n];
    QPair Q = tr.at(n);
    auto m = std::find_if(marks.begin(), marks.end(), [&](const auto& x) { return x.first == n; });
    if (m != marks.end()) {
      ++au.regime_i;
      if (!tau_window_certified(s.rate, s.triple(m->second), static_cast<long>(m->second), Q.q.norm())) ++au.regime_i_failed;
      continue;
    }
    if (Rational(b.norm()) > Rational(s.M * s.M)) {
      ++au.escaped;
      continue;
    }
    ++au.regime_ii;
    // |b + z' + q_prev/q| <= |b| + sqrt(2)/2 + |q_prev/q| < 1/tau - 1/4
    RatInterval ab = sqrt_bounds(Rational(b.norm()), 96);
    RatInterval ratio = sqrt_bounds(Rational(Q.q_prev.norm()) / Rational(Q.q.norm()), 96);
    if (!(ab.hi + half_sqrt2.hi + ratio.hi < bound)) ++au.regime_ii_failed;
    RatInterval psi = s.rate.eval_at_norm(Q.q.norm());
    Rational margin = 1 / (bound * Rational(Q.q.norm()) * psi.hi);
    double md = to_double(margin);
    if (first || md < au.min_margin_ii) au.min_margin_ii = md;
    first = false;
    if (margin <= tau_margin) ++au.margin_below;
  }
  return au;
}

inline SampledPoint sample_point_tau(const LambdaFamilyTau& F, std::optional<std::uint64_t> seed = std::nullopt) {
  return sample_point(F.tree, seed);
}

}  // namespace hcf
