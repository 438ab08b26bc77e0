#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hcf/cantor.hpp"
#include "hcf/enumeration.hpp"

namespace hcf {

enum class BuildMode { Strict, Desk };

inline std::string mode_name(BuildMode m) { return m == BuildMode::Strict ? "strict" : "desk"; }

inline BuildMode parse_mode(const std::string& s) {
  if (s == "strict") return BuildMode::Strict;
  if (s == "desk") return BuildMode::Desk;
  fail(Errc::InvalidArgument, "mode must be strict or desk, got '" + s + "'");
}

// One evaluated inequality lhs <= rhs, both as natural logs.
struct ConditionCheck {
  std::string name;
  long k = 0;
  bool holds = false;
  double lhs = 0, rhs = 0;
  std::string note;
};

inline double ln_big(const BigInt& n) { return log_rational(Rational(n)); }

// log psi(e^L) for the power-log family, without forming e^L
inline double log_psi_at(const ApproxRate& r, double L) {
  if (r.family() == ApproxRate::Family::Table) return std::log(r.eval_double(std::exp(std::min(L, 700.0))));
  double v = std::log(to_double(r.c())) - to_double(r.lambda()) * L;
  if (r.beta() != 0) v -= to_double(r.beta()) * std::log(L);
  return v;
}

inline BigInt big_from_log(double L) {
  // ceil(e^L), exact enough for a scale choice
  if (L < 50) return BigInt(static_cast<long long>(std::ceil(std::exp(L))));
  double l2 = L / std::log(2.0);
  auto sh = static_cast<unsigned>(std::floor(l2)) - 52;
  double m = std::exp((l2 - sh) * std::log(2.0));
  return (BigInt(static_cast<long long>(std::ceil(m))) << sh);
}

struct ScheduleOx2 {
  ApproxRate rate;
  Rational epsilon;
  Rational lambda;
  long M = 3;
  std::vector<BigInt> n;      // n[0] = n_1 = 1
  std::vector<Rational> Q;    // Q[k-1] = n_k^{1-eps/4}; Q[0] unused
  std::vector<Rational> c_psi_k;  // runtime threshold on rho: max(6, rho_k)
  std::optional<Rational> c1;
  BuildMode mode = BuildMode::Desk;
  Rational rho_k{12};
  std::vector<ConditionCheck> report;

  size_t depth() const { return n.size(); }
  bool all_hold() const {
    for (const auto& c : report)
      if (!c.holds) return false;
    return true;
  }
};

struct ScheduleOverrides {
  std::vector<BigInt> n;
  std::optional<long> M;
  std::optional<Rational> c1;
  double log10_cap = 60;
  Rational rho_k{12};
};

namespace detail {

inline std::vector<ConditionCheck> ox2_conditions(const ScheduleOx2& s, size_t k) {
  double eps = to_double(s.epsilon), lam = to_double(s.lambda);
  double L = ln_big(s.n[k - 1]), Lp = ln_big(s.n[k - 2]);
  double lM = std::log(static_cast<double>(s.M + 1));
  long kk = static_cast<long>(k);
  std::vector<ConditionCheck> out;
  double lp = log_psi_at(s.rate, L);
  out.push_back({"nkpsi.lower", kk, -(lam + eps / 4) * L <= lp, -(lam + eps / 4) * L, lp, ""});
  out.push_back({"nkpsi.upper", kk, lp <= (-lam + eps / 4) * L, lp, (-lam + eps / 4) * L, ""});
  double lp2 = log_psi_at(s.rate, (1 - eps / 3) * L);
  out.push_back({"nkpsi'", kk, lp2 <= (-lam + lam * eps / 2) * L, lp2, (-lam + lam * eps / 2) * L, ""});
  double rhs = std::log(9.0) + lM + lam * Lp;
  out.push_back({"nkeps", kk, eps / 6 * L >= rhs, rhs, eps / 6 * L, "n_k^(eps/6) >= 9(M+1) n_{k-1}^lambda"});
  out.push_back({"nkeps.100", kk, rhs > std::log(100.0), std::log(100.0), rhs, "9(M+1) n_{k-1}^lambda > 100"});
  double need = std::max(5.0 * s.M / (1 - eps / 4) * lM, std::log(static_cast<double>(k)) / (lam * eps));
  out.push_back({"nk>", kk, L >= need, need, L, "c_psi_k part replaced by the runtime rho check"});
  return out;
}

}  // namespace detail

inline ScheduleOx2 schedule_build(const ApproxRate& rate, const Rational& epsilon, size_t depth, BuildMode mode,
                                  const ScheduleOverrides& ov = {}) {
  RateClass rc = rate.classify();
  if (!rc.small_o_x2) fail(Errc::RateNotSmallO, "rate " + rate.str() + " is not o(x^-2)");
  if (rc.lower_order.infinite) fail(Errc::RateNotSmallO, "lower order of " + rate.str() + " is infinite");
  if (epsilon <= 0) fail(Errc::InvalidArgument, "epsilon must be positive");
  if (depth < 1) fail(Errc::InvalidArgument, "depth must be at least 1");
  ScheduleOx2 s;
  s.rate = rate;
  s.epsilon = epsilon;
  s.lambda = rc.lower_order.value;
  s.mode = mode;
  s.c1 = ov.c1;
  s.rho_k = ov.rho_k;
  double eps = to_double(epsilon), lam = to_double(s.lambda);
  if (mode == BuildMode::Strict) {
    if (!ov.c1) fail(Errc::InvalidArgument, "strict mode needs the constant c1");
    s.M = std::max(static_cast<long>(std::ceil(to_double(*ov.c1) * 12)), static_cast<long>(std::ceil(2 / eps)));
    s.n.push_back(1);
    for (size_t k = 2; k <= depth; ++k) {
      double lM = std::log(static_cast<double>(s.M + 1));
      double Lp = ln_big(s.n.back());
      double L = std::max({5.0 * s.M / (1 - eps / 4) * lM, std::log(static_cast<double>(k)) / (lam * eps),
                           6 / eps * (std::log(9.0) + lM + lam * Lp), 1.0});
      for (int it = 0;; ++it) {
        if (L / std::log(10.0) > ov.log10_cap)
          fail(Errc::Infeasible, "n_" + std::to_string(k) + " needs about 10^" +
                                     std::to_string(static_cast<long>(L / std::log(10.0))) + ", beyond the cap 10^" +
                                     std::to_string(static_cast<long>(ov.log10_cap)));
        double lp = log_psi_at(rate, L), lp2 = log_psi_at(rate, (1 - eps / 3) * L);
        bool ok = -(lam + eps / 4) * L <= lp && lp <= (-lam + eps / 4) * L && lp2 <= (-lam + lam * eps / 2) * L;
        if (ok) break;
        L *= 1.05;
      }
      s.n.push_back(big_from_log(L));
    }
  } else {
    if (ov.n.size() < depth) fail(Errc::InvalidArgument, "desk mode needs n_1 .. n_depth");
    s.n.assign(ov.n.begin(), ov.n.begin() + static_cast<long>(depth));
    if (s.n[0] != 1) fail(Errc::InvalidArgument, "n_1 must be 1");
    for (size_t k = 1; k < depth; ++k)
      if (s.n[k] < 2) fail(Errc::InvalidArgument, "n_k must be at least 2 for k >= 2");
    s.M = ov.M.value_or(3);
    if (s.M < 2) fail(Errc::InvalidArgument, "M must be at least 2");
  }
  s.Q.push_back(1);
  s.c_psi_k.push_back(std::max(Rational(6), s.rho_k));
  for (size_t k = 2; k <= depth; ++k) {
    s.Q.push_back(rational_from_double(std::exp((1 - eps / 4) * ln_big(s.n[k - 1]))));
    s.c_psi_k.push_back(std::max(Rational(6), s.rho_k));
    for (auto& c : detail::ox2_conditions(s, k)) s.report.push_back(std::move(c));
  }
  for (size_t k = 2; k <= depth; ++k)
    if (s.Q[k - 1] <= 1) fail(Errc::InvalidArgument, "Q_" + std::to_string(k) + " must exceed 1; raise n_k");
  return s;
}

// Counters for one construction level.
struct LevelAuditOx2 {
  long k = 0;
  size_t lambda_size = 0, prime_size = 0, gamma_size = 0, u_used = 0;
  size_t window_certified = 0, window_failed = 0;
  size_t direct_yes = 0, direct_unknown = 0, direct_no = 0;
  size_t lam_b_ok = 0, lam_b_fail = 0;
  size_t lam_c_ok = 0, lam_c_fail = 0;
  size_t lam_f_ok = 0, lam_f_fail = 0;
  size_t rho_above_threshold = 0, rho_below_threshold = 0;
  size_t full_certified = 0;
  bool separation_in_range = false;
  size_t separation_pairs = 0, separation_certified = 0;
  size_t truncated_parents = 0;  // parents whose annulus list was capped
  Rational min_rho{0};
  Rational max_mass{0};
  double mass_bound_log = 0;  // log n_k^{-4+2 eps}
};

struct LambdaFamilyOx2 {
  ScheduleOx2 schedule;
  CantorTree tree;
  std::vector<std::vector<int>> lambda, lambda_prime;  // indexed by k; [0] unused, [1] = {root}
  std::vector<std::vector<DigitSeq>> gamma_used;
  std::vector<LevelAuditOx2> audits;
  size_t depth() const { return lambda.size() - 1; }
};

struct BuildOptionsOx2 {
  size_t budget = 2000000;
  size_t u_cap = 0;  // 0: all of Gamma_M(Q_k)
  size_t b_cap = 0;  // 0: all of the certified annulus
  size_t direct_checks = 2;
  unsigned direct_depth = 6;
  BigInt exact_radius{1024};
  size_t separation_pairs = 200;
};

inline std::vector<DigitSeq> evenly_pick(const std::vector<DigitSeq>& v, size_t cap) {
  if (cap == 0 || v.size() <= cap) return v;
  std::vector<DigitSeq> out;
  for (size_t j = 0; j < cap; ++j) out.push_back(v[j * v.size() / cap]);
  return out;
}

namespace detail {

// dist(C(x), C(y)) >= |c_x - c_y| - r_x - r_y >= bound
inline bool balls_separated(const CantorNode& x, const CantorNode& y, const Rational& bound) {
  Rational d2 = (node_center(x) - node_center(y)).norm_sq();
  Rational s = bound + node_radius(x) + node_radius(y);
  return d2 >= s * s;
}

inline void separation_audit(const CantorTree& t, const std::vector<int>& ids, const Rational& bound, size_t pairs,
                             LevelAuditOx2& au) {
  if (ids.size() < 2) return;
  std::mt19937_64 rng(ids.size());
  std::uniform_int_distribution<size_t> pick(0, ids.size() - 1);
  for (size_t i = 0; i < pairs; ++i) {
    // neighbours in construction order are the closest candidates; mix in random pairs
    size_t a = i % 2 ? pick(rng) : (i / 2) % (ids.size() - 1);
    size_t b = i % 2 ? pick(rng) : a + 1;
    if (a == b) continue;
    ++au.separation_pairs;
    if (balls_separated(t[ids[a]], t[ids[b]], bound)) ++au.separation_certified;
  }
}

}  // namespace detail

inline LambdaFamilyOx2 build_lambda(const ScheduleOx2& s, size_t depth, const BuildOptionsOx2& opt = {}) {
  if (depth < 1 || depth > s.depth()) fail(Errc::InvalidArgument, "depth outside the schedule");
  LambdaFamilyOx2 F;
  F.schedule = s;
  F.lambda.assign(depth + 1, {});
  F.lambda_prime.assign(depth + 1, {});
  F.gamma_used.assign(depth + 1, {});
  F.lambda[1] = {0};
  F.lambda_prime[1] = {0};
  F.audits.push_back({});
  F.audits.back().k = 1;
  F.audits.back().lambda_size = F.audits.back().prime_size = 1;
  double eps = to_double(s.epsilon), lam = to_double(s.lambda);
  for (size_t k = 2; k <= depth; ++k) {
    LevelAuditOx2 au;
    au.k = static_cast<long>(k);
    FullFamily G = enumerate_full(s.M, s.Q[k - 1], opt.budget);
    if (G.budget_exceeded) fail(Errc::BudgetExceeded, "Gamma_M(Q_" + std::to_string(k) + ") exceeded the budget");
    au.gamma_size = G.members.size();
    F.gamma_used[k] = evenly_pick(G.members, opt.u_cap);
    au.u_used = F.gamma_used[k].size();
    std::vector<QPair> uq;
    for (const auto& u : F.gamma_used[k]) uq.push_back(qpair(u));
    double Ln = ln_big(s.n[k - 1]);
    AnnulusOptions aopt;
    aopt.rho_k = s.rho_k;
    aopt.list_cap = opt.b_cap;
    aopt.exact_radius = opt.exact_radius;
    size_t direct_left = opt.direct_checks;
    bool first_rho = true;
    BigInt max_qn(0);
    for (int parent : F.lambda_prime[k - 1]) {
      for (size_t j = 0; j < F.gamma_used[k].size(); ++j) {
        int a = F.tree.add(parent, F.gamma_used[k][j], static_cast<int>(k), false);
        F.lambda[k].push_back(a);
        // full prefix followed by a full word is full
        ++au.full_certified;
        QPair Qa = F.tree[a].Q;
        BigInt qn = Qa.q.norm();
        if (qn > max_qn) max_qn = qn;
        double lq = 0.5 * ln_big(qn);
        if ((1 - eps / 3) * Ln <= lq && lq <= Ln - std::log(3.0)) ++au.lam_b_ok;
        else ++au.lam_b_fail;
        DigitAnnulus ann;
        try {
          ann = digit_annulus(Qa, static_cast<long>(k), s.rate, aopt);
        } catch (const Error& e) {
          if (e.code() == Errc::RateTooLarge)
            fail(Errc::AnnulusUnavailable, "level " + std::to_string(k) + ": " + e.what());
          throw;
        }
        if (first_rho || ann.rho.lo < au.min_rho) au.min_rho = ann.rho.lo;
        first_rho = false;
        if (ann.rho.lo > s.c_psi_k[k - 1]) ++au.rho_above_threshold;
        else ++au.rho_below_threshold;
        if (!ann.listed_all) ++au.truncated_parents;
        double fl = (2 * lam - 4 - 2 * lam * eps) * Ln, fh = (2 * lam - 4 + 2 * eps) * Ln;
        double clo = ann.count_J1_bounds.lo > 0 ? log_rational(ann.count_J1_bounds.lo) : -1e300;
        double chi = ann.count_J1_bounds.hi > 0 ? log_rational(ann.count_J1_bounds.hi) : -1e300;
        if (fl <= clo && chi <= fh) ++au.lam_f_ok;
        else ++au.lam_f_fail;
        if (ann.J1.empty()) fail(Errc::AnnulusUnavailable, "empty certified annulus at level " + std::to_string(k));
        for (const auto& b : ann.J1) {
          if (annulus_bracket_check(Qa, b, static_cast<long>(k), s.rate)) ++au.window_certified;
          else ++au.window_failed;
          size_t mark = F.tree[a].length;
          int ap = F.tree.add(a, DigitSeq({b}), static_cast<int>(k), true, mark);
          F.lambda_prime[k].push_back(ap);
          // |b| > rho + 2 > 8, so (b) is full
          ++au.full_certified;
          double lqp = 0.5 * ln_big(F.tree[ap].Q.q.norm());
          if ((lam - 1 - lam * eps) * Ln <= lqp && lqp <= (lam - 1 + eps) * Ln) ++au.lam_c_ok;
          else ++au.lam_c_fail;
          if (direct_left > 0) {
            --direct_left;
            Tri t = annulus_window_certify(F.tree.sequence(a), b, static_cast<long>(k), s.rate, opt.direct_depth);
            if (t == Tri::Yes) ++au.direct_yes;
            else if (t == Tri::No) ++au.direct_no;
            else ++au.direct_unknown;
          }
        }
      }
    }
    au.lambda_size = F.lambda[k].size();
    au.prime_size = F.lambda_prime[k].size();
    BigInt nk = s.n[k - 1];
    au.separation_in_range = 9 * Rational(max_qn) <= Rational(nk * nk);
    detail::separation_audit(F.tree, F.lambda_prime[k], Rational(1) / Rational(nk * nk), opt.separation_pairs, au);
    au.mass_bound_log = (-4 + 2 * eps) * Ln;
    F.audits.push_back(au);
  }
  measure_build(F.tree);
  for (size_t k = 2; k <= depth; ++k) {
    Rational mx(0);
    for (int a : F.lambda[k]) mx = std::max(mx, F.tree[a].mass);
    F.audits[k - 1].max_mass = mx;
  }
  return F;
}

inline std::vector<DigitSeq> members(const LambdaFamilyOx2& F, size_t k, bool primed) {
  std::vector<DigitSeq> out;
  for (int id : primed ? F.lambda_prime.at(k) : F.lambda.at(k)) out.push_back(F.tree.sequence(id));
  return out;
}

// Regime of r in the local mass estimate: k with n_{k+1}^-2 <= r < n_k^-2, then (a), (b) or (c).
inline std::string meab_regime(const ScheduleOx2& s, const Rational& r) {
  double eps = to_double(s.epsilon), lam = to_double(s.lambda);
  double lr = log_rational(r);
  for (size_t k = 1; k + 1 <= s.n.size(); ++k) {
    double Lk = ln_big(s.n[k - 1]), Lk1 = ln_big(s.n[k]);
    if (lr >= -2 * Lk1 && lr < -2 * Lk) {
      std::string tag = "k=" + std::to_string(k) + ":";
      if (lr < (-2 + eps) * Lk1) return tag + "a";
      if (lr < (-2 * lam + 2 - 2 * eps) * Lk) return tag + "b";
      return tag + "c";
    }
  }
  return lr >= 0 || (s.n.size() >= 1 && lr >= -2 * ln_big(s.n[0])) ? "above" : "below";
}

inline std::vector<ProbeSample> local_dimension_probe(const LambdaFamilyOx2& F, const SampledPoint& z,
                                                      const std::vector<Rational>& radii) {
  return local_dimension_probe(F.tree, z, radii, [&](const Rational& r) { return meab_regime(F.schedule, r); });
}

}  // namespace hcf
