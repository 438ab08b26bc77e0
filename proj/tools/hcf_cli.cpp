#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hcf/approximation.hpp"
#include "hcf/cylinder.hpp"
#include "hcf/dimension.hpp"
#include "hcf/enumeration.hpp"
#include "hcf/io.hpp"
#include "hcf/small_o.hpp"
#include "hcf/tau.hpp"
#include "suites.hpp"

using namespace hcf;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kVersion = "0.1.0";

struct UnknownName : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string rate;
  size_t depth = 0;
  std::uint64_t seed = 1;
  size_t budget = 2000000;
  int precision = -1;
  std::string mode = "desk";
  std::string out;
  bool json = false;
};

Globals G;

// decimal rounded to d places, half away from zero
std::string decimal(const Rational& x, int d) {
  bool neg = x < 0;
  Rational a = neg ? Rational(-x) : x;
  BigInt scale = ipow(BigInt(10), static_cast<unsigned>(d));
  BigInt n = numer(a) * scale * 2 + denom(a);
  n /= denom(a) * 2;
  std::string s = n.str();
  if (d > 0) {
    if (s.size() <= static_cast<size_t>(d)) s.insert(0, static_cast<size_t>(d) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<size_t>(d), ".");
  }
  return (neg && n != 0 ? "-" : "") + s;
}

std::string decimal(const GaussRat& z, int d) {
  std::string im = decimal(z.im(), d);
  if (im[0] != '-') im = "+" + im;
  return decimal(z.re(), d) + im + "i";
}

void add_decimal(json& j, const std::string& key, const Rational& x) {
  if (G.precision >= 0) j[key + "_decimal"] = decimal(x, G.precision);
}
void add_decimal(json& j, const std::string& key, const GaussRat& x) {
  if (G.precision >= 0) j[key + "_decimal"] = decimal(x, G.precision);
}

json interval(const RatInterval& r) { return {{"lo", r.lo.str()}, {"hi", r.hi.str()}}; }

json digit_list(const DigitSeq& s) {
  json a = json::array();
  for (const auto& d : s) a.push_back(format_gauss(d));
  return a;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// plain aligned table
void print_table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> w(head.size());
  for (size_t c = 0; c < head.size(); ++c) w[c] = head[c].size();
  for (const auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (size_t c = 0; c < r.size(); ++c) {
      s += r[c] + std::string(w[c] - r[c].size(), ' ');
      if (c + 1 < r.size()) s += "  ";
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    std::cout << s << "\n";
  };
  line(head);
  for (const auto& r : rows) line(r);
}

void print_pairs(const json& j, const std::string& indent = "") {
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      std::cout << indent << k << ":\n";
      print_pairs(v, indent + "  ");
    } else {
      std::cout << indent << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

GaussRat parse_point(const std::string& s) { return parse_gauss_rat(s); }

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- expand / eval / convergents

int cmd_expand(const std::string& ztok) {
  GaussRat z = parse_point(ztok);
  Expansion e = hcf_expand(z, G.depth);
  QPairTrace t = qpair_of(e.digits);
  json steps = json::array();
  std::vector<std::vector<std::string>> rows;
  GaussRat T = z;
  for (size_t n = 1; n <= e.depth(); ++n) {
    T = gauss_map(T);
    QPair Q = t.at(n);
    GaussRat conv = GaussRat::fraction(t.p[n], t.q[n]);
    json s = {{"n", n},
              {"digit", format_gauss(e.digits[n - 1])},
              {"convergent", conv.str()},
              {"p_prev", format_gauss(Q.p_prev)},
              {"p", format_gauss(Q.p)},
              {"q_prev", format_gauss(Q.q_prev)},
              {"q", format_gauss(Q.q)},
              {"T", T.str()}};
    add_decimal(s, "convergent", conv);
    add_decimal(s, "T", T);
    std::vector<std::string> row = {std::to_string(n), s["digit"], s["convergent"],
                                    "(" + format_gauss(Q.p_prev) + ", " + format_gauss(Q.p) + "; " +
                                        format_gauss(Q.q_prev) + ", " + format_gauss(Q.q) + ")",
                                    s["T"]};
    if (G.precision >= 0) row.push_back(s["T_decimal"]);
    rows.push_back(row);
    steps.push_back(s);
  }
  json out = {{"input", z.str()}, {"digits", digit_list(e.digits)}, {"terminated", e.terminated}, {"steps", steps}};
  if (G.json) {
    print_json(out);
  } else if (rows.empty()) {
    std::cout << z.str() << " = [0; ] (empty expansion)\n";
  } else {
    std::cout << z.str() << " = [0; " << e.digits.str() << "]" << (e.terminated ? "" : " ...") << "\n";
    std::vector<std::string> head = {"n", "a_n", "p_n/q_n", "(p_{n-1}, p_n; q_{n-1}, q_n)", "T^n z"};
    if (G.precision >= 0) head.push_back("T^n z ~");
    print_table(head, rows);
  }
  if (!G.out.empty()) write_atomic(G.out, out.dump(2) + "\n");
  return 0;
}

int cmd_eval(const std::string& tok) {
  DigitSeq s = parse_digits(tok);
  GaussRat v = evaluate(s);
  json out = {{"digits", digit_list(s)}, {"value", v.str()}, {"admissible", tri_name(is_admissible(s))}};
  add_decimal(out, "value", v);
  if (G.json) print_json(out);
  else print_pairs(out);
  return 0;
}

int cmd_convergents(const std::string& ztok) {
  GaussRat z = parse_point(ztok);
  Expansion e = hcf_expand(z, G.depth);
  QPairTrace t = qpair_of(e.digits);
  json list = json::array();
  std::vector<std::vector<std::string>> rows;
  for (size_t n = 1; n <= e.depth(); ++n) {
    GaussRat c = GaussRat::fraction(t.p[n], t.q[n]);
    Rational qn(t.q[n].norm());
    Rational d2 = (z - c).norm_sq();
    Rational sc = d2 * qn * qn;
    bool good = is_good_approximation(z, t.p[n], t.q[n]);
    json j = {{"n", n}, {"p", format_gauss(t.p[n])}, {"q", format_gauss(t.q[n])}, {"convergent", c.str()},
              {"q_norm", qn.str()}, {"dist_sq", d2.str()}, {"scaled_dist_sq", sc.str()},
              {"good", good}};
    add_decimal(j, "convergent", c);
    rows.push_back({std::to_string(n), c.str(), qn.str(), sc.str(), good ? "yes" : "no"});
    list.push_back(j);
  }
  if (G.json) print_json({{"input", z.str()}, {"convergents", list}});
  else print_table({"n", "p_n/q_n", "|q_n|^2", "|q_n|^4 |z - p_n/q_n|^2", "good"}, rows);
  return 0;
}

// ---- legendre / cylinder / enumerate / annulus

int cmd_legendre(const std::string& ztok, std::int64_t qmax) {
  Threshold th = legendre_threshold();
  json out = {{"threshold_t", th.t.str()}, {"threshold_value", th.value.str()}};
  int rc = 0;
  if (!ztok.empty()) {
    if (qmax < 1) fail(Errc::InvalidArgument, "--qmax must be positive");
    GaussRat z = parse_point(ztok);
    LegendreScan s = legendre_scan(z, qmax);
    out["input"] = z.str();
    out["qmax"] = qmax;
    out["checked"] = s.checked;
    out["claimed"] = s.claimed;
    out["counterexamples"] = s.counterexamples;
    rc = s.counterexamples == 0 ? 0 : 1;
  }
  if (G.json) print_json(out);
  else print_pairs(out);
  return rc;
}

int cmd_cylinder(const std::string& tok, bool area, unsigned area_depth) {
  DigitSeq s = parse_digits(tok);
  Tri adm = is_admissible(s);
  json out = {{"digits", digit_list(s)}, {"admissible", tri_name(adm)}};
  if (adm == Tri::Yes) {
    out["regular"] = tri_name(is_regular(s));
    out["full"] = fullness_name(is_full(s));
    CylinderMetrics m = cylinder_metrics(s, area, area_depth);
    out["diameter"] = interval(m.diameter);
    out["diameter_certified"] = m.diameter_certified;
    out["bound"] = m.bound.str();
    out["c0_sample"] = m.c0_sample.str();
    add_decimal(out, "c0_sample", m.c0_sample);
    if (m.area) {
      out["area"] = interval(*m.area);
      out["area_depth"] = m.area_depth;
    }
  }
  if (G.json) print_json(out);
  else print_pairs(out);
  return 0;
}

int cmd_enumerate(long M, const std::string& Qtok, const std::string& prefix, bool list) {
  Rational Q = parse_rational(Qtok);
  json out = {{"M", M}, {"Q", Q.str()}};
  std::vector<DigitSeq> seqs;
  if (prefix.empty()) {
    FullFamily f = enumerate_full(M, Q, G.budget);
    out["count"] = f.members.size();
    out["visited"] = f.visited;
    out["policy_log"] = f.policy_log;
    out["budget_exceeded"] = f.budget_exceeded;
    seqs = std::move(f.members);
  } else {
    FullFamily full = enumerate_full(M, Q, G.budget);
    RelativeFamily f = enumerate_relative(parse_digits(prefix), M, Q, G.budget, full.members.size());
    out["prefix"] = f.w.str();
    out["count"] = f.suffixes.size();
    out["policy_log"] = f.policy_log;
    out["budget_exceeded"] = f.budget_exceeded;
    out["gamma_size"] = full.members.size();
    if (f.log_ratio) out["log_ratio"] = *f.log_ratio;
    seqs = std::move(f.suffixes);
  }
  if (list) {
    json a = json::array();
    for (const auto& s : seqs) a.push_back(s.empty() ? std::string("-") : s.str());
    out["members"] = a;
  }
  if (G.json) {
    print_json(out);
  } else {
    json head = out;
    head.erase("members");
    print_pairs(head);
    if (list)
      for (const auto& s : seqs) std::cout << (s.empty() ? std::string("-") : s.str()) << "\n";
  }
  if (out["budget_exceeded"].get<bool>()) fail(Errc::BudgetExceeded, "enumeration stopped at the node budget");
  return 0;
}

int cmd_annulus(const std::string& tok, long k, const std::string& rho_tok) {
  if (G.rate.empty()) fail(Errc::InvalidArgument, "annulus needs --rate");
  ApproxRate rate = ApproxRate::parse(G.rate);
  DigitSeq u = parse_digits(tok);
  DigitAnnulus a = digit_annulus(u, k, rate, parse_rational(rho_tok));
  json out = {{"u", u.str()},
              {"k", k},
              {"rate", rate.str()},
              {"rho", interval(a.rho)},
              {"rho_k", a.rho_k.str()},
              {"J1", {{"lo_sq", a.lo1_sq.str()}, {"hi_sq", a.hi1_sq.str()}, {"listed", a.J1.size()}}},
              {"J2", {{"lo_sq", a.lo2_sq.str()}, {"hi_sq", a.hi2_sq.str()}, {"listed", a.J2.size()}}},
              {"certified", a.certified.size()},
              {"counts_exact", a.counts_exact},
              {"listed_all", a.listed_all},
              {"count_bounds_apply", a.count_bounds_apply},
              {"lower_ok", a.lower_ok},
              {"upper_ok", a.upper_ok}};
  if (a.counts_exact) {
    out["J1"]["count"] = a.count_J1.str();
    out["J2"]["count"] = a.count_J2.str();
  } else {
    out["J1"]["count_bounds"] = interval(a.count_J1_bounds);
    out["J2"]["count_bounds"] = interval(a.count_J2_bounds);
  }
  if (G.json) print_json(out);
  else print_pairs(out);
  return 0;
}

// ---- construct

struct ConstructArgs {
  std::string kind;
  std::string schedule_file;
  std::string n, Q, epsilon = "1/5", c1;
  long M = 0;
  size_t u_cap = 16, b_cap = 4, points = 8;
  double log10_cap = 60;
};

// status of one inequality: holds, or false at a scale the desk run cannot reach
std::string condition_status(bool holds, BuildMode mode) {
  if (holds) return "certified";
  return mode == BuildMode::Desk ? "infeasible-at-desk-scale" : "failed";
}

json condition_json(const ConditionCheck& c, BuildMode mode) {
  return {{"name", c.name}, {"k", c.k},        {"lhs", c.lhs},
          {"rhs", c.rhs},   {"note", c.note},  {"status", condition_status(c.holds, mode)}};
}

json check(const std::string& name, long k, const std::string& status, json detail = json::object()) {
  return {{"name", name}, {"k", k}, {"status", status}, {"detail", std::move(detail)}};
}

std::string pass_or(bool ok, const char* otherwise = "failed") { return ok ? "certified" : otherwise; }

void load_schedule(ConstructArgs& a) {
  if (a.schedule_file.empty()) return;
  json j;
  try {
    j = json::parse(read_file(a.schedule_file));
  } catch (const json::exception& e) {
    fail(Errc::ParseError, "schedule file: " + std::string(e.what()));
  }
  auto list = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    std::string s;
    for (const auto& v : j[key]) s += (s.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
    dst = s;
  };
  auto scalar = [&](const char* key, std::string& dst) {
    if (j.contains(key)) dst = j[key].is_string() ? j[key].get<std::string>() : j[key].dump();
  };
  list("n", a.n);
  list("Q", a.Q);
  scalar("epsilon", a.epsilon);
  scalar("c1", a.c1);
  if (j.contains("M")) a.M = j["M"].get<long>();
  if (j.contains("rate") && G.rate.empty()) G.rate = j["rate"].get<std::string>();
  if (j.contains("depth") && G.depth == 0) G.depth = j["depth"].get<size_t>();
}

std::vector<BigInt> big_list(const std::string& s) {
  std::vector<BigInt> v;
  for (const auto& t : split(s)) {
    Rational r = parse_rational(t);
    if (denom(r) != 1) fail(Errc::ParseError, "n_k must be an integer: " + t);
    v.push_back(numer(r));
  }
  return v;
}

std::vector<Rational> rat_list(const std::string& s) {
  std::vector<Rational> v;
  for (const auto& t : split(s)) v.push_back(parse_rational(t));
  return v;
}

json tree_summary(const CantorTree& t) {
  return {{"nodes", t.size()}, {"mass_conserved", mass_conserved(t)}};
}

int write_run(const fs::path& dir, json manifest, const json& audits, const std::string& dump) {
  fs::create_directories(dir);
  bool failed = false;
  for (const auto& c : manifest["conditions"])
    if (c["status"] == "failed") failed = true;
  for (const auto& c : manifest["checks"])
    if (c["status"] == "failed") failed = true;
  manifest["files"] = {{"audits", "audits.json"}, {"family", "family.txt"}};
  manifest["passed"] = !failed;
  write_atomic(dir / "family.txt", dump);
  write_atomic(dir / "audits.json", audits.dump(2) + "\n");
  manifest["created"] = now_utc();
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  if (G.json) {
    print_json(manifest);
  } else {
    std::cout << "run written to " << dir.string() << "\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : manifest["conditions"])
      rows.push_back({c["name"], std::to_string(c["k"].get<long>()), c["status"]});
    for (const auto& c : manifest["checks"])
      rows.push_back({c["name"], std::to_string(c["k"].get<long>()), c["status"]});
    print_table({"check", "k", "status"}, rows);
  }
  return failed ? 1 : 0;
}

json base_manifest(const ConstructArgs& a, BuildMode mode, size_t depth, const std::string& rate) {
  json cfg = {{"kind", a.kind},      {"rate", rate},          {"depth", depth},    {"mode", mode_name(mode)},
              {"seed", G.seed},      {"budget", G.budget},    {"u_cap", a.u_cap},  {"b_cap", a.b_cap},
              {"points", a.points},  {"log10_cap", a.log10_cap}};
  if (!a.n.empty()) cfg["n"] = split(a.n);
  if (!a.Q.empty()) cfg["Q"] = split(a.Q);
  if (!a.c1.empty()) cfg["c1"] = a.c1;
  if (!a.schedule_file.empty()) cfg["schedule_file"] = a.schedule_file;
  return {{"tool", "hcf"}, {"version", kVersion}, {"config", cfg}};
}

int construct_small_o(ConstructArgs& a, BuildMode mode, size_t depth) {
  ApproxRate rate = ApproxRate::parse(G.rate.empty() ? "x^-4" : G.rate);
  Rational eps = parse_rational(a.epsilon);
  ScheduleOverrides ov;
  ov.n = big_list(a.n.empty() ? "1,4" : a.n);
  if (a.M) ov.M = a.M;
  if (!a.c1.empty()) ov.c1 = parse_rational(a.c1);
  ov.log10_cap = a.log10_cap;
  ScheduleOx2 s = schedule_build(rate, eps, depth, mode, ov);
  BuildOptionsOx2 o;
  o.budget = G.budget;
  o.u_cap = a.u_cap;
  o.b_cap = a.b_cap;
  LambdaFamilyOx2 F = build_lambda(s, depth, o);

  json m = base_manifest(a, mode, depth, rate.str());
  m["config"]["epsilon"] = eps.str();
  m["schedule"] = {{"M", s.M}, {"lambda", s.lambda.str()}, {"n", json::array()}, {"Q", json::array()}};
  for (const auto& n : s.n) m["schedule"]["n"].push_back(n.str());
  for (size_t k = 1; k < s.Q.size(); ++k) m["schedule"]["Q"].push_back(s.Q[k].str());
  m["conditions"] = json::array();
  for (const auto& c : s.report) m["conditions"].push_back(condition_json(c, mode));
  json checks = json::array(), audits = json::array();
  for (const auto& au : F.audits) {
    if (au.k < 2) continue;
    long k = au.k;
    checks.push_back(check("window.1-1/k", k, pass_or(au.window_failed == 0),
                           {{"certified", au.window_certified}, {"failed", au.window_failed}}));
    checks.push_back(check("direct", k, pass_or(au.direct_no == 0),
                           {{"yes", au.direct_yes}, {"unknown", au.direct_unknown}, {"no", au.direct_no}}));
    checks.push_back(check("lambda.b", k, condition_status(au.lam_b_fail == 0, mode), {{"ok", au.lam_b_ok}, {"fail", au.lam_b_fail}}));
    checks.push_back(check("lambda.c", k, condition_status(au.lam_c_fail == 0, mode), {{"ok", au.lam_c_ok}, {"fail", au.lam_c_fail}}));
    checks.push_back(check("lambda.f", k, condition_status(au.lam_f_fail == 0, mode), {{"ok", au.lam_f_ok}, {"fail", au.lam_f_fail}}));
    checks.push_back(check("annulus.rho", k, au.rho_below_threshold == 0 ? "certified" : "out-of-range",
                           {{"above", au.rho_above_threshold}, {"below", au.rho_below_threshold},
                            {"min_rho", au.min_rho.str()}}));
    checks.push_back(check("separation", k,
                           au.separation_in_range ? pass_or(au.separation_certified == au.separation_pairs)
                                                  : "out-of-range",
                           {{"pairs", au.separation_pairs}, {"certified", au.separation_certified}}));
    audits.push_back({{"k", k},
                      {"lambda", au.lambda_size},
                      {"lambda_prime", au.prime_size},
                      {"gamma", au.gamma_size},
                      {"u_used", au.u_used},
                      {"full_certified", au.full_certified},
                      {"truncated_parents", au.truncated_parents},
                      {"max_mass", au.max_mass.str()},
                      {"mass_bound_log", au.mass_bound_log}});
  }
  checks.push_back(check("measure.mass", 0, pass_or(mass_conserved(F.tree))));
  m["checks"] = checks;
  m["tree"] = tree_summary(F.tree);
  json aud = {{"kind", "small-o"}, {"levels", audits}};
  std::string dump = dump_family("small-o", rate.str(), static_cast<int>(depth), F.tree, {{"epsilon", eps.str()}});
  return write_run(G.out.empty() ? "run" : G.out, m, aud, dump);
}

int construct_tau(ConstructArgs& a, BuildMode mode, size_t depth) {
  ApproxRate rate = ApproxRate::parse(G.rate.empty() ? "(1/32)*x^-2" : G.rate);
  TauOverrides ov;
  if (!a.n.empty()) ov.n = big_list(a.n);
  else ov.n.assign(depth, BigInt(0)), ov.n[0] = 1;
  ov.Q = rat_list(a.Q.empty() ? (depth >= 2 ? std::string("1,3") : std::string("1")) : a.Q);
  while (ov.Q.size() < depth) ov.Q.push_back(ov.Q.back() + 1);
  if (!a.c1.empty()) ov.c1 = parse_rational(a.c1);
  ov.log10_cap = a.log10_cap;
  ScheduleTau s = schedule_build_tau(rate, depth, mode, ov);
  BuildOptionsTau o;
  o.budget = G.budget;
  o.u_cap = a.u_cap;
  LambdaFamilyTau F = build_lambda_tau(s, depth, o);

  json m = base_manifest(a, mode, depth, rate.str());
  m["schedule"] = {{"M", s.M}, {"tau", s.tau.str()}, {"d_tau", s.d_tau.str()}, {"triples", json::array()}};
  for (size_t k = 2; k <= depth; ++k) {
    const auto& t = s.triple(k);
    m["schedule"]["triples"].push_back({{"k", k}, {"t", t.t.str()}, {"a", t.a}, {"b", t.b}});
  }
  m["conditions"] = json::array();
  for (const auto& c : s.report) m["conditions"].push_back(condition_json(c, mode));
  json checks = json::array(), audits = json::array();
  for (const auto& au : F.audits) {
    if (au.k < 2) continue;
    long k = au.k;
    checks.push_back(check("akbk.window", k, pass_or(au.window_failed == 0),
                           {{"certified", au.window_certified}, {"failed", au.window_failed}}));
    checks.push_back(check("direct", k, pass_or(au.direct_no == 0),
                           {{"yes", au.direct_yes}, {"unknown", au.direct_unknown}, {"no", au.direct_no}}));
    checks.push_back(check("lamk.q_cap", k, pass_or(au.q_cap_fail == 0), {{"ok", au.q_cap_ok}, {"fail", au.q_cap_fail}}));
    checks.push_back(check("lamk.digits", k, pass_or(au.digits_fail == 0), {{"ok", au.digits_ok}, {"fail", au.digits_fail}}));
    checks.push_back(check("lamk.count", k, pass_or(au.count_identity)));
    audits.push_back({{"k", k},
                      {"lambda", au.lambda_size},
                      {"gamma", au.gamma_size},
                      {"u_used", au.u_used},
                      {"n_k", au.n_k.str()},
                      {"n_retries", au.n_retries},
                      {"full_certified", au.full_certified},
                      {"pad_max_len", au.pad_max_len}});
  }
  json pts = json::array();
  size_t passed = 0;
  for (size_t i = 0; i < a.points; ++i) {
    SampledPoint sp = sample_point_tau(F, G.seed + i);
    ExactnessAudit e = exactness_audit(F, sp);
    passed += e.passed();
    pts.push_back({{"seed", G.seed + i},
                   {"prefix", sp.prefix.str()},
                   {"convergents", e.convergents},
                   {"regime_i", e.regime_i},
                   {"regime_i_failed", e.regime_i_failed},
                   {"regime_ii", e.regime_ii},
                   {"regime_ii_failed", e.regime_ii_failed},
                   {"escaped", e.escaped},
                   {"min_margin_ii", e.min_margin_ii},
                   {"margin_below", e.margin_below},
                   {"passed", e.passed()}});
  }
  checks.push_back(check("exactness", 0, pass_or(passed == a.points), {{"points", a.points}, {"passed", passed}}));
  checks.push_back(check("measure.mass", 0, pass_or(mass_conserved(F.tree) && tau_measure_identity(F))));
  m["checks"] = checks;
  m["tree"] = tree_summary(F.tree);
  json aud = {{"kind", "tau"}, {"levels", audits}, {"points", pts}};
  std::string dump = dump_family("tau", rate.str(), static_cast<int>(depth), F.tree, {{"tau", s.tau.str()}});
  return write_run(G.out.empty() ? "run" : G.out, m, aud, dump);
}

int cmd_construct(ConstructArgs& a) {
  load_schedule(a);
  BuildMode mode = parse_mode(G.mode);
  size_t depth = G.depth ? G.depth : 2;
  if (a.kind == "small-o") return construct_small_o(a, mode, depth);
  if (a.kind == "tau") return construct_tau(a, mode, depth);
  throw UnknownName("unknown construction '" + a.kind + "' (small-o or tau)");
}

// ---- dimension

int cmd_dimension(const std::string& dir, int from, int to, size_t points, const std::string& radii_tok) {
  fs::path p = fs::path(dir) / "family.txt";
  if (!fs::exists(p)) fail(Errc::InvalidArgument, "no family dump in " + dir);
  FamilyDump d = parse_family(read_file(p));
  if (from < 0 || to <= from) fail(Errc::InvalidArgument, "scale exponents need 0 <= from < to");
  CoverSnapshot cover = snapshot_of(d);
  std::optional<RateClass> rc;
  if (!d.rate.empty()) rc = ApproxRate::parse(d.rate).classify();
  DimensionReport rep = fit_dimension(box_count(cover, dyadic_scales(from, to)), rc);

  json counts = json::array();
  for (const auto& c : rep.counts) counts.push_back({{"scale", c.scale.str()}, {"count", c.count}});
  auto refs = [](const std::vector<ReferenceValue>& v) {
    json a = json::array();
    for (const auto& r : v)
      a.push_back({{"name", r.name}, {"value", r.value ? json(r.value->str()) : json(nullptr)}, {"source", r.source}});
    return a;
  };
  json out = {{"kind", d.kind},
              {"rate", d.rate},
              {"level", cover.level},
              {"items", cover.items.size()},
              {"counts", counts},
              {"raw_slope", rep.raw_slope},
              {"slope", rep.slope},
              {"intercept", rep.intercept},
              {"residual", rep.residual},
              {"references", refs(rep.references)}};

  std::string csv = counts_csv(rep.counts);
  if (points > 0) {
    std::vector<Rational> radii = rat_list(radii_tok);
    std::vector<std::vector<ProbeSample>> rows;
    for (size_t i = 0; i < points; ++i) {
      SampledPoint sp = sample_point(d.tree, G.seed + i);
      std::vector<Rational> usable;
      for (const auto& r : radii)
        if (r > 2 * sp.radius) usable.push_back(r);
      if (!usable.empty()) rows.push_back(local_dimension_probe(d.tree, sp, usable));
    }
    if (rows.empty()) fail(Errc::DepthExhausted, "every probe radius is below the resolution of the dump");
    ExponentSweep sw = aggregate_sweep(std::move(rows));
    json samples = json::array();
    csv += "\npoint,r,mass_lo,mass_hi,exponent_lo,exponent_hi,regime\n";
    for (size_t i = 0; i < sw.samples.size(); ++i)
      for (const auto& s : sw.samples[i]) {
        samples.push_back({{"point", i},
                           {"r", s.r.str()},
                           {"mass", interval(s.mass)},
                           {"exponent_lo", s.exponent_lo},
                           {"exponent_hi", s.exponent_hi},
                           {"regime", s.regime}});
        std::ostringstream row;
        row << i << "," << s.r.str() << "," << s.mass.lo.str() << "," << s.mass.hi.str() << "," << s.exponent_lo
            << "," << s.exponent_hi << "," << s.regime << "\n";
        csv += row.str();
      }
    out["sweep"] = {{"samples", samples}, {"liminf_estimate", sw.liminf_estimate}, {"limsup_estimate", sw.limsup_estimate}};
  }
  fs::path od = G.out.empty() ? fs::path(dir) : fs::path(G.out);
  fs::create_directories(od);
  write_atomic(od / "dimension.csv", csv);
  write_atomic(od / "dimension.json", out.dump(2) + "\n");
  if (G.json) {
    print_json(out);
  } else {
    std::cout << "box-count slope " << rep.slope << " (raw " << rep.raw_slope << ", residual " << rep.residual
              << ") over " << rep.counts.size() << " scales, " << cover.items.size() << " balls\n";
    for (const auto& r : rep.references)
      std::cout << "  " << r.name << " = " << (r.value ? r.value->str() : std::string("n/a")) << "\n";
    if (out.contains("sweep"))
      std::cout << "local exponents in [" << out["sweep"]["liminf_estimate"].get<double>() << ", "
                << out["sweep"]["limsup_estimate"].get<double>() << "]\n";
    std::cout << "wrote " << (od / "dimension.csv").string() << " and " << (od / "dimension.json").string() << "\n";
  }
  return 0;
}

// ---- verify

int cmd_verify(const std::string& name, std::uint64_t size, std::int64_t qmax) {
  const auto& names = suites::suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) throw UnknownName("unknown suite '" + name + "'");
  suites::SuiteOptions o;
  o.seed = G.seed;
  o.size = size;
  o.qmax = qmax;
  suites::SuiteResult r = suites::run_suite(name, o);
  json out = {{"suite", r.name},       {"seed", G.seed},      {"checked", r.checked}, {"failures", r.failures},
              {"passed", r.ok()},      {"info", r.info},      {"first_failures", r.first_failures}};
  // wall time is the only nondeterministic field, kept out of the JSON
  if (G.json) print_json(out);
  else {
    print_pairs(out);
    std::cout << "seconds: " << r.seconds << "\n";
  }
  if (!G.out.empty()) write_atomic(G.out, out.dump(2) + "\n");
  return r.ok() ? 0 : 1;
}

bool is_command(const std::string& s) {
  static const std::vector<std::string> names = {"expand",    "eval",    "convergents", "legendre", "cylinder",
                                                 "enumerate", "annulus", "construct",   "dimension", "verify"};
  return std::find(names.begin(), names.end(), s) != names.end();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hurwitz continued fractions: expansions, audits and constructions", "hcf"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--rate", G.rate, "approximation rate, e.g. x^-4 or (1/32)*x^-2");
  app.add_option("--depth", G.depth, "expansion or construction depth (0: default)");
  app.add_option("--seed", G.seed, "seed for every randomized choice");
  app.add_option("--budget", G.budget, "node budget for searches")->check(CLI::PositiveNumber);
  app.add_option("--precision", G.precision, "also print decimals with this many places");
  app.add_option("--mode", G.mode, "strict or desk")->check(CLI::IsMember({"strict", "desk"}));
  app.add_option("--out", G.out, "output file or directory");
  app.add_flag("--json", G.json, "print JSON instead of tables");

  std::string z, digits, prefix, Qtok = "5", rho = "12", radii = "1/10,1/100,1/1000,1/10000", suite;
  std::int64_t qmax = 1600, vqmax = 0;
  std::uint64_t vsize = 0;
  long M = 3, k = 2;
  bool list = false, area = false;
  unsigned area_depth = 6;
  int from = 0, to = 5;
  size_t points = 0;
  ConstructArgs ca;

  auto* expand = app.add_subcommand("expand", "HCF expansion with convergents, Q-pairs and T^n z");
  expand->add_option("z", z, "point of the fundamental domain, e.g. 5/12 or (1+2i)/7")->required();
  auto* eval = app.add_subcommand("eval", "value of a finite digit word");
  eval->add_option("digits", digits, "comma separated digits, '-' for the empty word")->required();
  auto* conv = app.add_subcommand("convergents", "convergents with distances and the good-approximation test");
  conv->add_option("z", z)->required();
  auto* leg = app.add_subcommand("legendre", "Legendre threshold, and an exhaustive scan around z");
  leg->add_option("z", z);
  leg->add_option("--qmax", qmax, "largest |q|^2 scanned");
  auto* cyl = app.add_subcommand("cylinder", "admissibility, regularity, fullness and diameter of a cylinder");
  cyl->add_option("digits", digits)->required();
  cyl->add_flag("--area", area, "bracket the area too");
  cyl->add_option("--area-depth", area_depth);
  auto* en = app.add_subcommand("enumerate", "full words over I_M crossing the Q threshold");
  en->add_option("--M", M, "alphabet bound");
  en->add_option("--Q", Qtok, "threshold Q");
  en->add_option("--prefix", prefix, "enumerate suffixes of this full prefix");
  en->add_flag("--list", list, "print the members");
  auto* ann = app.add_subcommand("annulus", "digit annulus after a prefix");
  ann->add_option("u", digits)->required();
  ann->add_option("--k", k);
  ann->add_option("--rho-k", rho);
  auto* con = app.add_subcommand("construct", "build a small-o or tau family and audit it");
  con->add_option("kind", ca.kind, "small-o or tau")->required();
  con->add_option("--schedule", ca.schedule_file, "JSON file with n, Q, epsilon, M, c1");
  con->add_option("--n", ca.n, "n_1,...,n_depth (tau: 0 picks automatically)");
  con->add_option("--Q", ca.Q, "tau: Q_1,...,Q_depth");
  con->add_option("--epsilon", ca.epsilon);
  con->add_option("--M", ca.M);
  con->add_option("--c1", ca.c1);
  con->add_option("--u-cap", ca.u_cap, "prefixes kept per level (0: all)");
  con->add_option("--b-cap", ca.b_cap, "small-o: annulus digits kept per prefix (0: all)");
  con->add_option("--points", ca.points, "tau: sampled points for the exactness audit");
  con->add_option("--log10-cap", ca.log10_cap);
  auto* dim = app.add_subcommand("dimension", "box counts and local exponents of a constructed run");
  dim->add_option("run", z, "run directory holding family.txt")->required();
  dim->add_option("--from", from, "coarsest dyadic exponent");
  dim->add_option("--to", to, "finest dyadic exponent");
  dim->add_option("--points", points, "sampled points for a local exponent sweep");
  dim->add_option("--radii", radii, "probe radii");
  auto* ver = app.add_subcommand("verify", "run a named invariant suite");
  ver->add_option("suite", suite)->required();
  ver->add_option("--size", vsize, "suite size (0: default)");
  ver->add_option("--qmax", vqmax, "legendre: |q|^2 bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (argc > 1 && argv[1][0] != '-' && !is_command(argv[1])) {
      std::cerr << "hcf: unknown command '" << argv[1] << "'\n";
      return 3;
    }
    app.exit(e);
    return 2;
  }

  try {
    if (*expand) return cmd_expand(z);
    if (*eval) return cmd_eval(digits);
    if (*conv) return cmd_convergents(z);
    if (*leg) return cmd_legendre(z, qmax);
    if (*cyl) return cmd_cylinder(digits, area, area_depth);
    if (*en) return cmd_enumerate(M, Qtok, prefix, list);
    if (*ann) return cmd_annulus(digits, k, rho);
    if (*con) return cmd_construct(ca);
    if (*dim) return cmd_dimension(z, from, to, points, radii);
    if (*ver) return cmd_verify(suite, vsize, vqmax);
  } catch (const UnknownName& e) {
    std::cerr << "hcf: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "hcf: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hcf: internal error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
