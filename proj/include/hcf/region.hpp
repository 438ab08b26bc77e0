#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "hcf/ball.hpp"
#include "hcf/circle.hpp"

namespace hcf {

// The fundamental square intersected with finitely many generalized-circle constraints.
class Region {
 public:
  Region() = default;

  static Region square() { return Region(); }
  static Region empty_region() {
    Region r;
    r.empty_ = true;
    return r;
  }

  // Adds a constraint, dropping it when the whole square satisfies it.
  void add(const GenCircle& c) {
    if (empty_) return;
    Rect sq = Rect::unit_square();
    if (c.holds_everywhere(sq)) return;
    if (c.holds_nowhere(sq)) {
      empty_ = true;
      cons_.clear();
      return;
    }
    auto it = std::lower_bound(cons_.begin(), cons_.end(), c);
    if (it != cons_.end() && *it == c) return;
    cons_.insert(it, c);
  }

  bool empty_by_constraint() const { return empty_; }
  bool is_square() const { return !empty_ && cons_.empty(); }
  const std::vector<GenCircle>& constraints() const { return cons_; }

  bool contains(const GaussRat& z) const {
    if (empty_ || !in_fundamental_domain(z)) return false;
    for (const auto& c : cons_)
      if (!c.holds(z)) return false;
    return true;
  }

  // Image of the region data under a pullback: { z in square : M(z) in this region }.
  Region pullback(const MobiusMap& M) const {
    if (empty_) return empty_region();
    Region r;
    for (const auto& e : GenCircle::square_edges()) r.add(e.pullback(M));
    for (const auto& c : cons_) r.add(c.pullback(M));
    return r;
  }

  std::string key() const {
    if (empty_) return "empty";
    std::string s;
    for (const auto& c : cons_) {
      s += c.A().str() + ',' + c.B().re.str() + ',' + c.B().im.str() + ',' + c.C().str() + (c.strict() ? "s" : "n") + ';';
    }
    return s;
  }

  friend bool operator==(const Region& a, const Region& b) { return a.empty_ == b.empty_ && a.cons_ == b.cons_; }
  friend bool operator!=(const Region& a, const Region& b) { return !(a == b); }

 private:
  std::vector<GenCircle> cons_;
  bool empty_ = false;
};

struct Cell {
  Rect box;
  bool inside;  // every point of the box lies in the set
};

// Quadtree classification of a constraint set restricted to the square.
struct CellCover {
  std::vector<Cell> cells;  // all boxes not excluded at the final depth
  unsigned depth = 0;
  bool empty() const { return cells.empty(); }
};

struct RegionAnalysis {
  Tri nonempty = Tri::Unknown;
  Tri interior = Tri::Unknown;
  std::optional<GaussRat> witness;
  unsigned depth = 0;
};

namespace detail {

// 0: excluded; 1: inside; 2: undecided.
inline int classify_cell(const std::vector<GenCircle>& cons, const Rect& r) {
  bool all = true;
  for (const auto& c : cons) {
    if (c.holds_nowhere(r)) return 0;
    if (all && !c.holds_everywhere(r)) all = false;
  }
  return all ? 1 : 2;
}

inline bool satisfies(const std::vector<GenCircle>& cons, const GaussRat& z) {
  for (const auto& c : cons)
    if (!c.holds(z)) return false;
  return true;
}

}  // namespace detail

// Refines `start` (boxes assumed to cover the set) until `max_depth` further levels or until the question
// asked by `stop` is settled. Inside boxes are kept without further splitting.
inline RegionAnalysis analyze_constraints(const std::vector<GenCircle>& cons, std::vector<Cell> start,
                                          unsigned max_depth, bool need_interior, size_t cell_cap = 1 << 16,
                                          CellCover* cover = nullptr) {
  RegionAnalysis res;
  std::vector<Cell> cur;
  for (auto& c : start) {
    if (c.inside) {
      cur.push_back(c);
      continue;
    }
    int k = detail::classify_cell(cons, c.box);
    if (k) cur.push_back({c.box, k == 1});
  }
  for (unsigned depth = 0;; ++depth) {
    res.depth = depth;
    if (cur.empty()) {
      res.nonempty = res.interior = Tri::No;
      break;
    }
    for (const auto& c : cur) {
      if (c.inside) {
        res.interior = res.nonempty = Tri::Yes;
        if (!res.witness) res.witness = c.box.center();
      } else if (!res.witness) {
        GaussRat m = c.box.center();
        if (detail::satisfies(cons, m)) {
          res.witness = m;
          res.nonempty = Tri::Yes;
        }
      }
    }
    bool settled = need_interior ? res.interior == Tri::Yes : res.nonempty == Tri::Yes;
    if (settled || depth == max_depth || cur.size() * 4 > cell_cap) break;
    std::vector<Cell> next;
    for (const auto& c : cur) {
      if (c.inside) {
        next.push_back(c);
        continue;
      }
      for (const Rect& s : c.box.split()) {
        int k = detail::classify_cell(cons, s);
        if (k) next.push_back({s, k == 1});
      }
    }
    cur.swap(next);
  }
  if (cover) {
    cover->cells = cur;
    cover->depth = res.depth;
  }
  return res;
}

inline std::vector<Cell> square_cells() { return {Cell{Rect::unit_square(), false}}; }

inline RegionAnalysis analyze(const Region& r, unsigned max_depth = 8, bool need_interior = true) {
  if (r.empty_by_constraint()) return {Tri::No, Tri::No, std::nullopt, 0};
  if (r.is_square()) return {Tri::Yes, Tri::Yes, GaussRat(0), 0};
  return analyze_constraints(r.constraints(), square_cells(), max_depth, need_interior);
}

// Is every point of the region inside the constraint g? Decided as emptiness of region and not-g.
inline Tri region_within(const Region& r, const GenCircle& g, const std::vector<Cell>& start, unsigned max_depth = 10) {
  if (r.empty_by_constraint()) return Tri::Yes;
  if (g.holds_everywhere(Rect::unit_square())) return Tri::Yes;
  // first a whole-box test per starting cell
  bool all = true;
  for (const auto& c : start)
    if (!g.holds_everywhere(c.box)) {
      all = false;
      break;
    }
  if (all) return Tri::Yes;
  std::vector<GenCircle> cons = r.constraints();
  cons.push_back(g.negation());
  RegionAnalysis a = analyze_constraints(cons, [&] {
    // cells inside the region are not inside not-g, so they are restarted as undecided
    std::vector<Cell> s;
    for (const auto& c : start) s.push_back({c.box, false});
    return s;
  }(), max_depth, false);
  if (a.nonempty == Tri::No) return Tri::Yes;
  if (a.nonempty == Tri::Yes) return Tri::No;
  return Tri::Unknown;
}

inline Tri region_within(const Region& r, const GenCircle& g, unsigned max_depth = 10) {
  return region_within(r, g, square_cells(), max_depth);
}

// Lebesgue measure bounds from a cover.
inline RatInterval cover_area(const CellCover& cv) {
  Rational in = 0, out = 0;
  for (const auto& c : cv.cells) {
    out += c.box.area();
    if (c.inside) in += c.box.area();
  }
  return {in, out};
}

}  // namespace hcf
