#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "hcf/core.hpp"
#include "hcf/region.hpp"

namespace hcf {

// Real sequences: |a_n| >= 3 or a_n a_{n+1} > 0 at every adjacent pair.
inline bool admissible_real(const std::vector<std::int64_t>& a) {
  for (size_t n = 0; n + 1 < a.size(); ++n)
    if (!(std::llabs(a[n]) >= 3 || a[n] * a[n + 1] > 0)) return false;
  return true;
}

inline bool admissible_real(const DigitSeq& s) {
  if (!s.is_real()) fail(Errc::InvalidArgument, "admissible_real needs a real sequence");
  return admissible_real(s.real_digits());
}

namespace detail {
inline bool fits_i32(const BigInt& v) { return v > -(1 << 19) && v < (1 << 19); }
}  // namespace detail

// w -> 1/(w + b)
inline MobiusMap shifted_inversion(const GaussInt& b) { return {GaussInt(0), GaussInt(1), GaussInt(1), b}; }

inline Region prototype_child(const Region& parent, const GaussInt& b) {
  return parent.pullback(shifted_inversion(b));
}

// Finite automaton of prototype sets: state 0 is the square, transitions append one digit.
class PrototypeAutomaton {
 public:
  static constexpr int kEmpty = -1;

  struct State {
    Region region;
    // filled lazily
    bool analyzed = false;
    RegionAnalysis analysis;
    CellCover cover;
    std::vector<GaussRat> spread;  // members of the region far apart from each other
  };

  PrototypeAutomaton() {
    states_.push_back(std::make_unique<State>());
    index_.emplace(Region::square().key(), 0);
  }

  static PrototypeAutomaton& global() {
    static PrototypeAutomaton a;
    return a;
  }

  int step(int id, const GaussInt& b) {
    if (id == kEmpty) return kEmpty;
    bool small = id < (1 << 24) && detail::fits_i32(b.re) && detail::fits_i32(b.im);
    std::uint64_t dk = small ? pack(id, b) : 0;
    if (small) {
      std::shared_lock lk(mu_);
      auto it = next_.find(dk);
      if (it != next_.end()) return it->second;
    }
    Region parent;
    {
      std::shared_lock lk(mu_);
      parent = states_[id]->region;
    }
    Region child = prototype_child(parent, b);
    std::unique_lock lk(mu_);
    int cid = kEmpty;
    if (!child.empty_by_constraint()) {
      auto [it, fresh] = index_.emplace(child.key(), static_cast<int>(states_.size()));
      if (fresh) {
        states_.push_back(std::make_unique<State>());
        states_.back()->region = std::move(child);
      }
      cid = it->second;
    }
    if (small) next_[dk] = cid;
    return cid;
  }

  int id_of(const DigitSeq& s) {
    int id = 0;
    for (const auto& b : s) {
      id = step(id, b);
      if (id == kEmpty) break;
    }
    return id;
  }

  Region region(int id) {
    if (id == kEmpty) return Region::empty_region();
    std::shared_lock lk(mu_);
    return states_[id]->region;
  }

  // Analysis of a state with a shared cover for later containment queries.
  const State& state(int id, unsigned depth = 7) {
    std::unique_lock lk(mu_);
    State& st = *states_.at(id);
    if (!st.analyzed) {
      st.analysis = analyze_constraints(st.region.constraints(), square_cells(), depth, true, 1 << 16, &st.cover);
      if (st.region.is_square()) {
        st.analysis = {Tri::Yes, Tri::Yes, GaussRat(0), 0};
        st.cover.cells = {Cell{Rect::unit_square(), true}};
      }
      st.spread = spread_points(st.region);
      st.analyzed = true;
    }
    return st;
  }

  size_t size() const {
    std::shared_lock lk(mu_);
    return states_.size();
  }

 private:
  static std::vector<GaussRat> spread_points(const Region& r) {
    std::vector<GaussRat> members;
    const int n = 16;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        GaussRat z(Rational(2 * i - n, 2 * n) + Rational(1, 4 * n), Rational(2 * j - n, 2 * n) + Rational(1, 4 * n));
        if (i == 0 && j == 0) z = GaussRat(Rational(-1, 2), Rational(-1, 2));
        if (r.contains(z)) members.push_back(z);
      }
    if (members.empty()) return members;
    // extremes in eight directions
    std::vector<GaussRat> out;
    const int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& d : dirs) {
      const GaussRat* best = &members[0];
      Rational bv = d[0] * best->re() + d[1] * best->im();
      for (const auto& m : members) {
        Rational v = d[0] * m.re() + d[1] * m.im();
        if (v > bv) {
          bv = v;
          best = &m;
        }
      }
      if (std::find(out.begin(), out.end(), *best) == out.end()) out.push_back(*best);
    }
    return out;
  }

  mutable std::shared_mutex mu_;
  std::vector<std::unique_ptr<State>> states_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::uint64_t, int> next_;

  // injective for |re|, |im| < 2^19 and id < 2^24
  static std::uint64_t pack(int id, const GaussInt& b) {
    auto u = [](const BigInt& v) { return static_cast<std::uint64_t>(v.convert_to<std::int64_t>() + (1 << 19)); };
    return (static_cast<std::uint64_t>(id) << 40) | (u(b.re) << 20) | u(b.im);
  }
};

inline Region prototype_set(const DigitSeq& s) {
  auto& a = PrototypeAutomaton::global();
  return a.region(a.id_of(s));
}

enum class Fullness { Full, NotFull, Unknown };

inline const char* fullness_name(Fullness f) {
  return f == Fullness::Full ? "full" : f == Fullness::NotFull ? "not_full" : "unknown";
}

inline Fullness is_full(const DigitSeq& s) {
  if (s.empty()) return Fullness::Full;
  if (s.size() == 1 && s[0].norm() >= 8) return Fullness::Full;
  if (s.is_real() && std::llabs(s.back().re.convert_to<long long>()) >= 3 && admissible_real(s)) return Fullness::Full;
  return prototype_set(s).is_square() ? Fullness::Full : Fullness::NotFull;
}

inline const char* tri_name(Tri t) { return t == Tri::Yes ? "yes" : t == Tri::No ? "no" : "unknown"; }

inline Tri is_admissible(const DigitSeq& s) {
  if (s.size() <= 1) return Tri::Yes;
  if (s.is_real()) return admissible_real(s) ? Tri::Yes : Tri::No;
  auto& a = PrototypeAutomaton::global();
  int id = a.id_of(s);
  if (id == PrototypeAutomaton::kEmpty) return Tri::No;
  Tri t = a.state(id).analysis.nonempty;
  return t;
}

inline Tri is_regular(const DigitSeq& s) {
  auto& a = PrototypeAutomaton::global();
  int id = a.id_of(s);
  if (id == PrototypeAutomaton::kEmpty) return Tri::No;
  return a.state(id).analysis.interior;
}

// T_u: [0; v] -> [0; u v]
inline MobiusMap cylinder_map(const DigitSeq& s) { return qpair(s).map(); }

inline Region cylinder_region(const DigitSeq& s) {
  Region proto = prototype_set(s);
  if (proto.empty_by_constraint()) fail(Errc::NotAdmissible, "empty cylinder (" + s.str() + ")");
  return proto.pullback(cylinder_map(s).inverse());
}

inline Region level1_cylinder_region(const GaussInt& b) { return cylinder_region(DigitSeq({b})); }

// z in C(u) exactly, for rational z
inline bool in_cylinder(const DigitSeq& s, const GaussRat& z) {
  Expansion e = hcf_expand(z, s.size());
  return e.digits == s;
}

// Constraint on the prototype: |x| <= |1 + (q_prev/q) x|, i.e. |T_u(x) - p/q| <= |q|^-2.
inline GenCircle convergent_disk_constraint(const QPair& Q) {
  BigInt A = Q.q.norm() - Q.q_prev.norm();
  GaussInt B = GaussInt(-2) * Q.q * Q.q_prev.conj();
  return GenCircle(A, B, -Q.q.norm(), false);
}

struct CylinderMetrics {
  RatInterval diameter;
  bool diameter_certified = false;  // diameter <= 2/|q|^2 proven
  Rational bound;                   // 2/|q|^2
  Rational c0_sample;               // diameter lower bound * |q|^2
  std::optional<RatInterval> area;
  unsigned area_depth = 0;
};

// Metrics from an automaton state and the Q-pair of the sequence reaching it.
inline CylinderMetrics cylinder_metrics(int id, const QPair& Q, bool with_area = false, unsigned area_depth = 6) {
  auto& aut = PrototypeAutomaton::global();
  if (id == PrototypeAutomaton::kEmpty) fail(Errc::NotAdmissible, "empty cylinder");
  const auto& st = aut.state(id);
  if (st.analysis.nonempty == Tri::No) fail(Errc::NotAdmissible, "empty cylinder");
  bool root = Q.q == GaussInt(1) && Q.q_prev == GaussInt(0);
  MobiusMap T = Q.map();
  CylinderMetrics m;
  Rational qn(Q.q.norm());
  m.bound = 2 / qn;
  GenCircle g = convergent_disk_constraint(Q);
  Tri within = root ? Tri::No : region_within(st.region, g, st.cover.cells, 12);
  Rational hi;
  if (within == Tri::Yes) {
    m.diameter_certified = true;
    hi = m.bound;
  } else {
    Disk d = T.image(Disk{GaussRat(0), Rational(1, 2)});
    hi = 2 * d.radius_hi();
  }
  // |T x - T y| = |x - y| / (|q + q_prev x| |q + q_prev y|) since |det T| = 1
  Rational lo2 = 0;
  std::vector<Rational> den;
  GaussRat qq(Q.q), qp(Q.q_prev);
  for (const auto& x : st.spread) den.push_back((qq + qp * x).norm_sq());
  for (size_t i = 0; i < den.size(); ++i)
    for (size_t j = i + 1; j < den.size(); ++j)
      lo2 = std::max(lo2, (st.spread[i] - st.spread[j]).norm_sq() / (den[i] * den[j]));
  Rational lo = lo2 == 0 ? Rational(0) : sqrt_bounds(lo2).lo;
  if (root) hi = sqrt_bounds(Rational(2)).hi;
  m.diameter = {lo, std::max(lo, hi)};
  m.c0_sample = lo * qn;
  if (with_area) {
    CellCover cv;
    if (st.region.is_square()) cv.cells = {Cell{Rect::unit_square(), true}};
    analyze_constraints(st.region.constraints(), square_cells(), area_depth, true, 1 << 18, &cv);
    if (st.region.is_square()) {
      // split the square to the requested depth for the Jacobian bounds
      std::vector<Cell> cur = {Cell{Rect::unit_square(), true}};
      for (unsigned k = 0; k < area_depth; ++k) {
        std::vector<Cell> nx;
        for (auto& c : cur)
          for (auto& r : c.box.split()) nx.push_back({r, true});
        cur.swap(nx);
      }
      cv.cells = cur;
    }
    Rational in = 0, out = 0;
    Rational qp(Q.q_prev.norm());
    for (const auto& c : cv.cells) {
      // |q + q_prev x|^2 = |q_prev|^2 |x - zeta|^2 with zeta = -q/q_prev
      Rational jlo = 1, jhi = 1;
      if (qp != 0) {
        GaussRat zeta = GaussRat::fraction(-Q.q, Q.q_prev);
        auto clamp = [](const Rational& v, const Rational& a, const Rational& b) { return v < a ? a : (v > b ? b : v); };
        Rational dx = zeta.re() - clamp(zeta.re(), c.box.x0, c.box.x1), dy = zeta.im() - clamp(zeta.im(), c.box.y0, c.box.y1);
        Rational dmin = (dx * dx + dy * dy) * qp;
        Rational fx = std::max(abs(zeta.re() - c.box.x0), abs(zeta.re() - c.box.x1));
        Rational fy = std::max(abs(zeta.im() - c.box.y0), abs(zeta.im() - c.box.y1));
        Rational dmax = (fx * fx + fy * fy) * qp;
        jlo = 1 / (dmax * dmax);
        jhi = 1 / (dmin * dmin);
      } else {
        jlo = jhi = 1 / (qn * qn);
      }
      out += c.box.area() * jhi;
      if (c.inside) in += c.box.area() * jlo;
    }
    m.area = RatInterval{in, out};
    m.area_depth = area_depth;
  }
  return m;
}

inline CylinderMetrics cylinder_metrics(const DigitSeq& s, bool with_area = false, unsigned area_depth = 6) {
  int id = PrototypeAutomaton::global().id_of(s);
  if (id == PrototypeAutomaton::kEmpty) fail(Errc::NotAdmissible, "empty cylinder (" + s.str() + ")");
  return cylinder_metrics(id, qpair(s), with_area, area_depth);
}

// |z - p/q| > 1/(3|q|^2) for a full u and a point z of the square outside C(u).
inline bool full_cylinder_separation_check(const DigitSeq& u, const GaussRat& z) {
  if (is_full(u) != Fullness::Full) fail(Errc::PreconditionViolated, "sequence is not full");
  if (!in_fundamental_domain(z)) fail(Errc::OutsideFundamentalDomain, z.str());
  if (in_cylinder(u, z)) fail(Errc::PreconditionViolated, "point lies in the cylinder");
  QPair Q = qpair(u);
  GaussRat d = z - GaussRat::fraction(Q.p, Q.q);
  Rational qn(Q.q.norm());
  // |d|^2 * 9 |q|^4 > 1
  return d.norm_sq() * 9 * qn * qn > 1;
}

// Is lo <= |z - c| < hi for every z in C(s)? C(s) is enclosed by the images of closed cells of the
// prototype cover under T_s; undecided cells are split up to max_depth times.
inline Tri distance_window_on_cylinder(const DigitSeq& s, const GaussRat& c, const Rational& lo, const Rational& hi,
                                       unsigned max_depth = 6) {
  auto& aut = PrototypeAutomaton::global();
  int id = aut.id_of(s);
  if (id == PrototypeAutomaton::kEmpty) return Tri::Yes;
  const Region& reg = aut.state(id).region;
  MobiusMap T = cylinder_map(s);
  std::vector<Rect> cur = {Rect::unit_square()};
  for (unsigned depth = 0; !cur.empty(); ++depth) {
    std::vector<Rect> next;
    for (const Rect& r : cur) {
      if (detail::classify_cell(reg.constraints(), r) == 0) continue;
      Rational w = r.width();
      Disk img = T.image(Disk{r.center(), w * w / 2});
      Rational dc2 = (img.center - c).norm_sq();
      Rational rh = img.radius_hi(96);
      bool lower = lo <= 0 || (lo + rh) * (lo + rh) <= dc2;
      bool upper = hi > rh && dc2 < (hi - rh) * (hi - rh);
      if (lower && upper) continue;
      GaussRat m = r.center();
      if (reg.contains(m)) {
        Rational d2 = (T.apply(m) - c).norm_sq();
        if (d2 < lo * lo || d2 >= hi * hi) return Tri::No;
      }
      if (depth == max_depth) return Tri::Unknown;
      for (const Rect& sub : r.split()) next.push_back(sub);
    }
    cur.swap(next);
  }
  return Tri::Yes;
}

// Three-valued test of a constraint over a closed disk.
inline Tri holds_on_disk(const GenCircle& c, const Disk& d) {
  if (d.radius_sq == 0) return c.holds(d.center) ? Tri::Yes : Tri::No;
  RatInterval rho = sqrt_bounds(d.radius_sq, 96);
  Rational lo, hi;
  if (c.is_line()) {
    Rational v = c.value(d.center);
    RatInterval bn = sqrt_bounds(Rational(c.B().norm()), 96);
    lo = v - bn.hi * rho.hi;
    hi = v + bn.hi * rho.hi;
  } else {
    // f = A |z - center|^2 - A r^2
    Rational A(c.A());
    GaussRat cc = c.center();
    Rational k = -A * c.radius_sq();
    RatInterval dist = sqrt_bounds((d.center - cc).norm_sq(), 96);
    Rational near = dist.lo - rho.hi;
    if (near < 0) near = 0;
    Rational far = dist.hi + rho.hi;
    Rational a = A * near * near + k, b = A * far * far + k;
    lo = std::min(a, b);
    hi = std::max(a, b);
  }
  bool strict = c.strict();
  if (strict ? hi < 0 : hi <= 0) return Tri::Yes;
  if (strict ? lo >= 0 : lo > 0) return Tri::No;
  return Tri::Unknown;
}

// Cylinder membership of a ball: Yes when the disk is certainly inside, No when certainly outside.
inline Tri disk_in_region(const Region& r, const Disk& d) {
  Tri sq = disk_in_fundamental_domain(d);
  if (sq == Tri::No) return Tri::No;
  bool all = sq == Tri::Yes;
  for (const auto& c : r.constraints()) {
    Tri t = holds_on_disk(c, d);
    if (t == Tri::No) return Tri::No;
    if (t != Tri::Yes) all = false;
  }
  if (r.empty_by_constraint()) return Tri::No;
  return all ? Tri::Yes : Tri::Unknown;
}

}  // namespace hcf
