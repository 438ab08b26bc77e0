#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hcf/core.hpp"
#include "hcf/error.hpp"
#include "hcf/rate.hpp"

namespace hcf {

// One node of a nested family: the word is the parent's word followed by ext.
struct CantorNode {
  int parent = -1;
  int level = 1;
  bool primed = false;
  DigitSeq ext;
  QPair Q;
  Rational mass{0};
  std::vector<int> children;
  size_t length = 0;
  size_t mark = 0;  // length of the designated convergent inside the word, 0 if none
};

class CantorTree {
 public:
  CantorTree() {
    nodes_.emplace_back();
    nodes_[0].mass = 1;
  }

  int add(int parent, DigitSeq ext, int level, bool primed, size_t mark = 0) {
    CantorNode n;
    n.parent = parent;
    n.level = level;
    n.primed = primed;
    n.Q = nodes_.at(parent).Q * qpair(ext);
    n.length = nodes_[parent].length + ext.size();
    n.ext = std::move(ext);
    n.mark = mark;
    nodes_.push_back(std::move(n));
    int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[parent].children.push_back(id);
    return id;
  }

  const CantorNode& operator[](int id) const { return nodes_.at(id); }
  CantorNode& at(int id) { return nodes_.at(id); }
  size_t size() const { return nodes_.size(); }
  const std::vector<CantorNode>& nodes() const { return nodes_; }

  DigitSeq sequence(int id) const {
    std::vector<int> path;
    for (int v = id; v > 0; v = nodes_[v].parent) path.push_back(v);
    DigitSeq s;
    for (auto it = path.rbegin(); it != path.rend(); ++it)
      for (const auto& d : nodes_[*it].ext) s.push_back(d);
    return s;
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].children.empty()) out.push_back(static_cast<int>(i));
    return out;
  }

  std::vector<int> at_level(int level, bool primed) const {
    std::vector<int> out;
    for (size_t i = 1; i < nodes_.size(); ++i)
      if (nodes_[i].level == level && nodes_[i].primed == primed) out.push_back(static_cast<int>(i));
    return out;
  }

 private:
  std::vector<CantorNode> nodes_;
};

// Uniform split: each child gets the parent's mass over the sibling count.
inline void measure_build(CantorTree& t) {
  for (size_t i = 0; i < t.size(); ++i) {
    const auto& kids = t[static_cast<int>(i)].children;
    if (kids.empty()) continue;
    Rational m = t[static_cast<int>(i)].mass / Rational(static_cast<long>(kids.size()));
    for (int c : kids) t.at(c).mass = m;
  }
}

inline const Rational& measure_of(const CantorTree& t, int id) { return t[id].mass; }

// exact sum of children == parent at every inner node, and leaves sum to 1
inline bool mass_conserved(const CantorTree& t) {
  Rational leaves(0);
  for (size_t i = 0; i < t.size(); ++i) {
    const auto& n = t[static_cast<int>(i)];
    if (n.children.empty()) {
      leaves += n.mass;
      continue;
    }
    Rational s(0);
    for (int c : n.children) s += t[c].mass;
    if (s != n.mass) return false;
  }
  return leaves == 1 && t[0].mass == 1;
}

// Closed ball D(p/q, 2/|q|^2) around the cylinder of a node.
inline GaussRat node_center(const CantorNode& n) { return GaussRat::fraction(n.Q.p, n.Q.q); }
inline Rational node_radius(const CantorNode& n) { return Rational(2) / Rational(n.Q.q.norm()); }

struct SampledPoint {
  std::vector<int> chain;  // root excluded
  DigitSeq prefix;
  GaussRat center;
  Rational radius;
};

namespace detail {
struct SeqOrder {
  bool operator()(const DigitSeq& a, const DigitSeq& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), GaussLess());
  }
};
}  // namespace detail

// seed empty: the lexicographically least chain
inline SampledPoint sample_point(const CantorTree& t, std::optional<std::uint64_t> seed = std::nullopt) {
  if (t.size() < 2) fail(Errc::DepthExhausted, "family has no members below the root");
  std::mt19937_64 rng(seed.value_or(0));
  SampledPoint sp;
  int v = 0;
  while (!t[v].children.empty()) {
    const auto& kids = t[v].children;
    int pick = kids.front();
    if (seed) {
      pick = kids[std::uniform_int_distribution<size_t>(0, kids.size() - 1)(rng)];
    } else {
      for (int c : kids)
        if (detail::SeqOrder()(t[c].ext, t[pick].ext)) pick = c;
    }
    sp.chain.push_back(pick);
    v = pick;
  }
  sp.prefix = t.sequence(v);
  sp.center = node_center(t[v]);
  sp.radius = node_radius(t[v]);
  return sp;
}

struct ProbeSample {
  Rational r;
  RatInterval mass;
  double exponent_lo = 0, exponent_hi = 0;  // log mu / log r over the mass interval
  std::string regime;
  size_t undecided = 0;
};

namespace detail {

// d <= s with d^2 = dist_sq, s possibly negative
inline bool dist_at_most(const Rational& dist_sq, const Rational& s) { return s >= 0 && dist_sq <= s * s; }
inline bool dist_above(const Rational& dist_sq, const Rational& s) { return s < 0 || dist_sq > s * s; }

inline void ball_mass(const CantorTree& t, int v, const GaussRat& z, const Rational& eps, const Rational& r,
                      Rational& lo, Rational& hi, size_t& undecided) {
  const auto& n = t[v];
  Rational rad = v == 0 ? Rational(1) : node_radius(n);
  Rational d2 = (node_center(n) - z).norm_sq();
  if (dist_at_most(d2, r - rad - eps)) {
    lo += n.mass;
    hi += n.mass;
    return;
  }
  if (dist_above(d2, r + rad + eps)) return;
  if (n.children.empty()) {
    hi += n.mass;
    ++undecided;
    return;
  }
  for (int c : n.children) ball_mass(t, c, z, eps, r, lo, hi, undecided);
}

}  // namespace detail

// mu(B(z, r)) bracketed over the tree, for z known to lie in the sampled ball
inline std::vector<ProbeSample> local_dimension_probe(const CantorTree& t, const SampledPoint& z,
                                                      const std::vector<Rational>& radii,
                                                      const std::function<std::string(const Rational&)>& tag = {}) {
  std::vector<ProbeSample> out;
  for (const auto& r : radii) {
    if (r <= 0) fail(Errc::InvalidArgument, "probe radius must be positive");
    if (r <= 2 * z.radius) fail(Errc::DepthExhausted, "radius " + r.str() + " below the resolution of the built depth");
    ProbeSample s;
    s.r = r;
    Rational lo(0), hi(0);
    detail::ball_mass(t, 0, z.center, z.radius, r, lo, hi, s.undecided);
    s.mass = {lo, hi};
    double lr = log_rational(r);
    auto expo = [&](const Rational& m) {
      if (m <= 0) return std::numeric_limits<double>::infinity();
      return std::abs(lr) < 1e-300 ? 0.0 : log_rational(m) / lr;
    };
    if (lr < 0) {
      s.exponent_lo = expo(hi);
      s.exponent_hi = expo(lo);
    } else {
      s.exponent_lo = s.exponent_hi = 0;
    }
    if (tag) s.regime = tag(r);
    out.push_back(std::move(s));
  }
  return out;
}

struct CoverBall {
  GaussRat center;
  Rational radius;
};

inline std::vector<CoverBall> cover_of(const CantorTree& t, const std::vector<int>& ids) {
  std::vector<CoverBall> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back({node_center(t[id]), node_radius(t[id])});
  return out;
}

}  // namespace hcf
