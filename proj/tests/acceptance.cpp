// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "hcf/dimension.hpp"
#include "suites.hpp"

using namespace hcf;

namespace {

int failed = 0;

void line(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

std::string summary(const suites::SuiteResult& r) {
  std::ostringstream os;
  os << r.checked << " checks, " << r.failures << " failures, " << r.seconds << " s";
  for (const auto& [k, v] : r.info) os << ", " << k << "=" << v;
  for (const auto& f : r.first_failures) os << " [" << f << "]";
  return os.str();
}

void suite(int id, const std::string& title, const std::string& name, suites::SuiteOptions o = {},
           double time_cap = 0) {
  try {
    suites::SuiteResult r = suites::run_suite(name, o);
    bool ok = r.ok() && (time_cap <= 0 || r.seconds <= time_cap);
    line(id, ok, title, summary(r));
  } catch (const std::exception& e) {
    line(id, false, title, std::string("exception: ") + e.what());
  }
}

LambdaFamilyTau tau_family(size_t u_cap) {
  TauOverrides ov;
  ov.n = {BigInt(1), BigInt(0)};
  ov.Q = {Rational(1), Rational(3)};
  ScheduleTau s = schedule_build_tau(ApproxRate::parse("(1/32)*x^-2"), 2, BuildMode::Desk, ov);
  BuildOptionsTau o;
  o.u_cap = u_cap;
  return build_lambda_tau(s, 2, o);
}

void construction_audits() {
  std::ostringstream os;
  bool ok = true;
  try {
    ScheduleOverrides ov;
    ov.n = {BigInt(1), BigInt(4)};
    ScheduleOx2 s = schedule_build(ApproxRate::parse("x^-4"), Rational(1, 5), 2, BuildMode::Desk, ov);
    BuildOptionsOx2 o;
    o.b_cap = 4;
    LambdaFamilyOx2 F = build_lambda(s, 2, o);
    const auto& a = F.audits[1];
    bool so = a.window_failed == 0 && a.window_certified == F.lambda_prime[2].size() && a.direct_no == 0 &&
              mass_conserved(F.tree) && a.u_used == a.gamma_size;
    os << "small-o x^-4 depth 2: Gamma " << a.gamma_size << ", Lambda' " << F.lambda_prime[2].size() << ", window "
       << a.window_certified << "/" << F.lambda_prime[2].size() << ", direct yes/unknown/no " << a.direct_yes << "/"
       << a.direct_unknown << "/" << a.direct_no << ", mass " << (mass_conserved(F.tree) ? "exact" : "BROKEN");
    ok = ok && so;
  } catch (const std::exception& e) {
    os << "small-o exception: " << e.what();
    ok = false;
  }
  try {
    LambdaFamilyTau T = tau_family(16);
    const auto& a = T.audits[1];
    bool members = a.window_failed == 0 && a.window_certified == T.lambda[2].size() && a.q_cap_fail == 0 &&
                   a.digits_fail == 0 && a.direct_no == 0 && a.count_identity;
    size_t points = 0, pass = 0, escaped = 0;
    double margin = 1e300;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      SampledPoint sp = seed == 0 ? sample_point_tau(T) : sample_point_tau(T, seed);
      ExactnessAudit au = exactness_audit(T, sp);
      ++points;
      pass += au.passed();
      escaped += au.escaped;
      margin = std::min(margin, au.min_margin_ii);
    }
    bool meas = tau_measure_identity(T);
    os << "; tau 1/32 depth 2: Lambda " << T.lambda[2].size() << " (n_2 " << a.n_k.str().size() << " digits), window "
       << a.window_certified << "/" << T.lambda[2].size() << ", exactness " << pass << "/" << points
       << " sampled points (escaped " << escaped << ", min regime-ii margin " << margin << "), mass "
       << (meas ? "exact" : "BROKEN");
    ok = ok && members && pass == points && meas;
  } catch (const std::exception& e) {
    os << "; tau exception: " << e.what();
    ok = false;
  }
  line(9, ok, "construction audits", os.str());
}

void dimension_diagnostics() {
  std::ostringstream os;
  bool ok = true;
  try {
    ApproxRate r = ApproxRate::parse("x^-4");
    ScheduleOverrides ov;
    ov.n = {BigInt(1), BigInt(4), BigInt(5), BigInt(6)};
    ScheduleOx2 s = schedule_build(r, Rational(1, 5), 4, BuildMode::Desk, ov);
    BuildOptionsOx2 o;
    o.u_cap = 16;
    o.b_cap = 2;
    LambdaFamilyOx2 F = build_lambda(s, 4, o);
    DimensionReport rep = fit_dimension(box_count(snapshot_of(F), dyadic_scales(0, 5)), r.classify());
    Rational ref = *rep.references.at(0).value;
    bool in_band = rep.slope >= 0.6 && rep.slope <= 2.0;
    os << "small-o depth 4 box slope " << rep.slope << " (residual " << rep.residual << ", "
       << (in_band ? "inside" : "outside") << " [0.6, 2.0]) vs 4/lambda = " << ref.str() << ", counts";
    for (const auto& c : rep.counts) os << " " << c.count;
    ok = ok && ref == 1 && std::isfinite(rep.slope) && rep.counts.size() == 6;
  } catch (const std::exception& e) {
    os << "small-o exception: " << e.what();
    ok = false;
  }
  try {
    LambdaFamilyTau T = tau_family(8);
    std::vector<SampledPoint> pts;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) pts.push_back(sample_point_tau(T, seed));
    std::vector<Rational> radii;
    for (int j = 1; j <= 8; ++j) radii.push_back(Rational(1) / Rational(ipow(BigInt(10), static_cast<unsigned>(j))));
    ExponentSweep sw = local_exponent_sweep(T, pts, radii);
    Rational d = *sw.bands.at(0).value;
    os << "; tau local exponents in [" << sw.liminf_estimate << ", " << sw.limsup_estimate << "] over "
       << pts.size() * radii.size() << " samples vs d_tau = " << d.str();
    ok = ok && d == Rational(59, 30) && sw.samples.size() == pts.size();
  } catch (const std::exception& e) {
    os << "; tau exception: " << e.what();
    ok = false;
  }
  line(11, ok, "dimension diagnostics (reported, not gated)", os.str());
}

}  // namespace

int main() {
  suites::SuiteOptions o;
  o.seed = 20261014;
  suite(1, "Q-pair identities on 1e5 prefixes", "qpair", o, 60);
  suite(2, "Legendre criterion, |q|^2 <= 1600", "legendre", o);
  suite(3, "convergents are good approximations", "good", o);
  suite(4, "prototype sets and fullness on I_6", "prototype", o);
  suite(5, "enumeration against the plain search", "enumeration-oracle", o);
  suite(6, "reversal contracts on 1e4 words", "rev", o);
  suite(7, "bounded sum decomposition on 1e3 points", "sum", o);
  suite(8, "a t b triples for tau = 1/32", "akbk", o);
  construction_audits();
  suite(10, "cylinder diameters, |q|^2 <= 2500 over I_4", "cylinder", o);
  dimension_diagnostics();
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
