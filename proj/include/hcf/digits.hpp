#pragma once

#include <initializer_list>
#include <vector>

#include "hcf/exact.hpp"

namespace hcf {

inline bool is_digit(const GaussInt& g) { return g.norm() > 1; }

inline const GaussInt& check_digit(const GaussInt& g) {
  if (!is_digit(g)) fail(Errc::InvalidArgument, "digit must avoid 0, +-1, +-i: " + format_gauss(g));
  return g;
}

class DigitSeq {
 public:
  DigitSeq() = default;
  DigitSeq(std::vector<GaussInt> digits) : d_(std::move(digits)) {
    for (const auto& g : d_) check_digit(g);
  }
  DigitSeq(std::initializer_list<GaussInt> digits) : DigitSeq(std::vector<GaussInt>(digits)) {}

  static DigitSeq real(const std::vector<std::int64_t>& digits) {
    std::vector<GaussInt> v;
    v.reserve(digits.size());
    for (auto x : digits) v.emplace_back(BigInt(x), BigInt(0));
    return DigitSeq(std::move(v));
  }

  size_t size() const { return d_.size(); }
  bool empty() const { return d_.empty(); }
  const GaussInt& operator[](size_t i) const { return d_[i]; }
  const GaussInt& back() const { return d_.back(); }
  const std::vector<GaussInt>& digits() const { return d_; }
  auto begin() const { return d_.begin(); }
  auto end() const { return d_.end(); }

  void push_back(const GaussInt& g) { d_.push_back(check_digit(g)); }
  void pop_back() { d_.pop_back(); }

  DigitSeq prefix(size_t n) const { return DigitSeq(std::vector<GaussInt>(d_.begin(), d_.begin() + std::min(n, d_.size())), 0); }
  DigitSeq suffix_from(size_t n) const { return DigitSeq(std::vector<GaussInt>(d_.begin() + std::min(n, d_.size()), d_.end()), 0); }
  // u^-: drop the last digit
  DigitSeq minus() const { return empty() ? DigitSeq() : prefix(size() - 1); }
  DigitSeq reversed() const { return DigitSeq(std::vector<GaussInt>(d_.rbegin(), d_.rend()), 0); }
  bool starts_with(const DigitSeq& w) const {
    if (w.size() > size()) return false;
    for (size_t i = 0; i < w.size(); ++i)
      if (d_[i] != w.d_[i]) return false;
    return true;
  }
  bool is_real() const {
    for (const auto& g : d_)
      if (g.im != 0) return false;
    return true;
  }
  std::vector<std::int64_t> real_digits() const {
    std::vector<std::int64_t> v;
    for (const auto& g : d_) {
      if (g.im != 0) fail(Errc::InvalidArgument, "sequence is not real");
      v.push_back(g.re.convert_to<std::int64_t>());
    }
    return v;
  }

  friend DigitSeq operator+(const DigitSeq& a, const DigitSeq& b) {
    std::vector<GaussInt> v = a.d_;
    v.insert(v.end(), b.d_.begin(), b.d_.end());
    return DigitSeq(std::move(v), 0);
  }
  friend bool operator==(const DigitSeq& a, const DigitSeq& b) { return a.d_ == b.d_; }
  friend bool operator!=(const DigitSeq& a, const DigitSeq& b) { return !(a == b); }
  // Order of the enumeration: digit by digit in digit order, shorter prefix first.
  friend bool operator<(const DigitSeq& a, const DigitSeq& b) {
    return std::lexicographical_compare(a.d_.begin(), a.d_.end(), b.d_.begin(), b.d_.end(), GaussLess{});
  }

  std::string str() const {
    std::string s;
    for (size_t i = 0; i < d_.size(); ++i) {
      if (i) s += ",";
      s += format_gauss(d_[i]);
    }
    return s;
  }

 private:
  DigitSeq(std::vector<GaussInt> digits, int) : d_(std::move(digits)) {}
  std::vector<GaussInt> d_;
};

inline std::ostream& operator<<(std::ostream& os, const DigitSeq& s) { return os << "(" << s.str() << ")"; }

// Comma separated tokens, e.g. "2,3,-2" or "-2+3i,4"; "" or "()" is the empty word.
inline DigitSeq parse_digits(std::string_view text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  if (s.empty() || s == "-" ) return {};
  std::vector<GaussInt> v;
  size_t start = 0;
  while (true) {
    size_t comma = s.find(',', start);
    std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    GaussInt g = parse_gauss_int(tok);
    if (!is_digit(g)) fail(Errc::ParseError, "not a digit: '" + trim(tok) + "'");
    v.push_back(g);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return DigitSeq(std::move(v));
}

}  // namespace hcf

template <>
struct std::hash<hcf::DigitSeq> {
  size_t operator()(const hcf::DigitSeq& s) const {
    size_t h = 1469598103934665603ull;
    for (const auto& g : s) {
      h ^= std::hash<std::string>{}(g.re.str()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= std::hash<std::string>{}(g.im.str()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};
