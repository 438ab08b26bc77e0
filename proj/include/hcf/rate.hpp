#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "hcf/exact.hpp"

namespace hcf {

// Exact rational from a finite double.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) fail(Errc::InvalidArgument, "non-finite double");
  int e = 0;
  double m = std::frexp(v, &e);
  // m * 2^53 is an integer
  auto mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r(mi);
  if (e > 0) r *= Rational(pow2(static_cast<unsigned>(e)));
  if (e < 0) r /= Rational(pow2(static_cast<unsigned>(-e)));
  return r;
}

// Natural log of a positive rational, accurate to ~1e-15 relative even for huge values.
inline double log_rational(const Rational& x) {
  if (x <= 0) fail(Errc::InvalidArgument, "log of a non-positive rational");
  auto log_int = [](const BigInt& n) {
    size_t bits = boost::multiprecision::msb(n) + 1;
    if (bits <= 1000) return std::log(n.convert_to<double>());
    unsigned shift = static_cast<unsigned>(bits - 60);
    BigInt top = n >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
  };
  return log_int(numer(x)) - log_int(denom(x));
}

// 2^k * [lo, hi] with rational lo, hi from a natural-log enclosure [L - err, L + err].
inline RatInterval exp_enclosure(double L, double err) {
  double k = std::floor(L / std::log(2.0));
  double f = L - k * std::log(2.0);
  double lo = std::exp(f - err) * (1 - 1e-15), hi = std::exp(f + err) * (1 + 1e-15);
  Rational scale = k >= 0 ? Rational(pow2(static_cast<unsigned>(k))) : Rational(1, pow2(static_cast<unsigned>(-k)));
  return {rational_from_double(lo) * scale, rational_from_double(hi) * scale};
}

struct ExtReal {
  bool infinite = false;
  Rational value{0};
  bool approximate = false;

  static ExtReal inf() { return {true, 0, false}; }
  std::string str() const { return infinite ? std::string("inf") : value.str(); }
};

struct RateClass {
  ExtReal lower_order;
  ExtReal tau;
  bool small_o_x2 = false;
  bool approximate = false;
};

class ApproxRate {
 public:
  enum class Family { PowerLog, Table };

  static ApproxRate power_log(Rational c, Rational lambda, Rational beta = 0) {
    if (c <= 0) fail(Errc::InvalidArgument, "rate coefficient must be positive");
    if (lambda < 0 || beta < 0) fail(Errc::InvalidArgument, "rate exponents must be non-negative");
    ApproxRate r;
    r.family_ = Family::PowerLog;
    r.c_ = std::move(c);
    r.lambda_ = std::move(lambda);
    r.beta_ = std::move(beta);
    return r;
  }

  // Step function through (x_i, y_i): psi = y_i on [x_i, x_{i+1}), y_0 below x_0.
  static ApproxRate table(std::vector<std::pair<Rational, Rational>> pts) {
    if (pts.empty()) fail(Errc::InvalidArgument, "empty rate table");
    for (size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].first <= 0 || pts[i].second <= 0) fail(Errc::InvalidArgument, "rate table entries must be positive");
      if (i && pts[i].first <= pts[i - 1].first) fail(Errc::InvalidArgument, "rate table x must increase");
      if (i && pts[i].second > pts[i - 1].second) fail(Errc::InvalidArgument, "rate table psi must not increase");
    }
    ApproxRate r;
    r.family_ = Family::Table;
    r.table_ = std::move(pts);
    return r;
  }

  static ApproxRate table_csv(const std::string& text) {
    std::vector<std::pair<Rational, Rational>> pts;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      auto comma = line.find(',');
      if (comma == std::string::npos) fail(Errc::ParseError, "rate table line needs two columns: " + line);
      std::string a = trim(line.substr(0, comma)), b = trim(line.substr(comma + 1));
      if (!a.empty() && std::isalpha(static_cast<unsigned char>(a[0]))) continue;  // header
      pts.emplace_back(parse_rational(a), parse_rational(b));
    }
    return table(std::move(pts));
  }

  // "c*x^-L", "c*x^-L*log^-B", "x^-3", "(1/32)*x^-2", or "table:<csv path>".
  static ApproxRate parse(const std::string& spec) {
    std::string s;
    for (char ch : spec)
      if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.rfind("table:", 0) == 0) {
      std::ifstream f(s.substr(6));
      if (!f) fail(Errc::ParseError, "cannot read rate table " + s.substr(6));
      std::stringstream buf;
      buf << f.rdbuf();
      ApproxRate r = table_csv(buf.str());
      r.spec_ = s;
      return r;
    }
    Rational c = 1, lambda = 0, beta = 0;
    bool have_x = false;
    size_t start = 0;
    while (start <= s.size()) {
      size_t star = s.find('*', start);
      std::string tok = s.substr(start, star == std::string::npos ? std::string::npos : star - start);
      if (tok.empty()) fail(Errc::ParseError, "bad rate spec '" + spec + "'");
      auto exponent = [&](const std::string& t, size_t at) {
        std::string e = t.substr(at);
        if (e.size() >= 2 && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
        if (e.empty() || e[0] != '-') fail(Errc::ParseError, "rate exponents are written as ^-value: '" + t + "'");
        return parse_rational(e.substr(1));
      };
      if (tok.rfind("x^", 0) == 0) {
        lambda = exponent(tok, 2);
        have_x = true;
      } else if (tok.rfind("log^", 0) == 0) {
        beta = exponent(tok, 4);
      } else {
        std::string t = tok;
        if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
        c *= parse_rational(t);
      }
      if (star == std::string::npos) break;
      start = star + 1;
    }
    if (!have_x) fail(Errc::ParseError, "rate spec needs an x^-L factor: '" + spec + "'");
    ApproxRate r = power_log(c, lambda, beta);
    r.spec_ = spec;
    return r;
  }

  Family family() const { return family_; }
  const Rational& c() const { return c_; }
  const Rational& lambda() const { return lambda_; }
  const Rational& beta() const { return beta_; }
  const std::vector<std::pair<Rational, Rational>>& table_points() const { return table_; }

  std::string str() const {
    if (!spec_.empty()) return spec_;
    if (family_ == Family::Table) return "table(" + std::to_string(table_.size()) + " points)";
    std::string s = c_.str() + "*x^-" + lambda_.str();
    if (beta_ != 0) s += "*log^-" + beta_.str();
    return s;
  }

  bool exact_values() const { return family_ == Family::Table || (beta_ == 0 && denom(lambda_) == 1); }

  // Enclosure of psi(x) for x > 0.
  RatInterval eval(const Rational& x) const {
    if (x <= 0) fail(Errc::InvalidArgument, "rate evaluated at non-positive x");
    if (family_ == Family::Table) return RatInterval(table_value([&](const Rational& xi) { return xi <= x; }));
    if (beta_ == 0 && denom(lambda_) == 1) {
      int l = numer(lambda_).convert_to<int>();
      return RatInterval(c_ / rpow(x, l));
    }
    return from_log(log_rational(x));
  }

  // Enclosure of psi(sqrt(N)) for an integer N >= 1, i.e. psi(|q|) with N = |q|^2.
  RatInterval eval_at_norm(const BigInt& N) const {
    if (N <= 0) fail(Errc::InvalidArgument, "rate evaluated at non-positive norm");
    if (family_ == Family::Table)
      return RatInterval(table_value([&](const Rational& xi) { return xi <= 0 || xi * xi <= Rational(N); }));
    if (beta_ == 0 && denom(lambda_) == 1) {
      int l = numer(lambda_).convert_to<int>();
      Rational base = c_ / rpow(Rational(N), l / 2);
      if (l % 2 == 0) return RatInterval(base);
      RatInterval s = sqrt_bounds(Rational(N), 96);
      return {base / s.hi, base / s.lo};
    }
    return from_log(0.5 * log_rational(Rational(N)));
  }

  double eval_double(double x) const {
    if (family_ == Family::Table) return to_double(eval(rational_from_double(x)).lo);
    double lx = std::log(x);
    double v = to_double(c_) * std::exp(-to_double(lambda_) * lx);
    if (beta_ != 0 && x > 1) v *= std::pow(1 + lx, -to_double(beta_));
    return v;
  }

  RateClass classify() const {
    RateClass rc;
    if (family_ == Family::PowerLog) {
      rc.lower_order.value = lambda_;
      if (lambda_ < 2) rc.tau = ExtReal::inf();
      else if (lambda_ == 2 && beta_ == 0) rc.tau.value = c_;
      else rc.tau.value = 0;
      rc.small_o_x2 = !rc.tau.infinite && rc.tau.value == 0;
      return rc;
    }
    // Tables: liminf of -log psi / log x and the max of x^2 psi over the upper half of the grid.
    rc.approximate = rc.lower_order.approximate = rc.tau.approximate = true;
    size_t from = table_.size() / 2;
    double lam = INFINITY, tau = 0;
    bool decreasing = true;
    double prev = INFINITY;
    for (size_t i = from; i < table_.size(); ++i) {
      double x = to_double(table_[i].first), y = to_double(table_[i].second);
      if (x > 1) lam = std::min(lam, -std::log(y) / std::log(x));
      double t = x * x * y;
      tau = std::max(tau, t);
      if (t >= prev) decreasing = false;
      prev = t;
    }
    if (std::isfinite(lam)) rc.lower_order.value = rational_from_double(lam);
    else {
      rc.lower_order = ExtReal::inf();
      rc.lower_order.approximate = true;
    }
    rc.tau.value = rational_from_double(tau);
    double last = to_double(table_.back().first * table_.back().first * table_.back().second);
    rc.small_o_x2 = decreasing && last < 1e-3 * tau;
    return rc;
  }

 private:
  template <class Pred>
  Rational table_value(Pred at_or_below) const {
    Rational v = table_.front().second;
    for (const auto& [xi, yi] : table_) {
      if (!at_or_below(xi)) break;
      v = yi;
    }
    return v;
  }

  RatInterval from_log(double log_x) const {
    double lx = std::max(log_x, 0.0);
    double L = log_rational(c_) - to_double(lambda_) * log_x;
    if (beta_ != 0) L -= to_double(beta_) * std::log1p(lx);
    double err = 1e-12 * (1 + std::fabs(L) + std::fabs(to_double(lambda_) * log_x));
    return exp_enclosure(L, err);
  }

  Family family_ = Family::PowerLog;
  Rational c_{1}, lambda_{0}, beta_{0};
  std::vector<std::pair<Rational, Rational>> table_;
  std::string spec_;
};

inline RateClass classify_rate(const ApproxRate& r) { return r.classify(); }

}  // namespace hcf
