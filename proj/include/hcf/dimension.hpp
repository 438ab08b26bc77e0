#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "hcf/cantor.hpp"
#include "hcf/small_o.hpp"
#include "hcf/tau.hpp"

namespace hcf {

struct CoverSnapshot {
  int level = 0;
  std::vector<CoverBall> items;
};

inline CoverSnapshot make_snapshot(int level, std::vector<CoverBall> items) {
  std::set<std::pair<Rational, Rational>> seen;
  for (const auto& b : items) {
    if (b.radius <= 0) fail(Errc::InvalidArgument, "cover radius must be positive");
    if (!seen.insert({b.center.re(), b.center.im()}).second)
      fail(Errc::InvalidArgument, "cover has two balls with center " + b.center.str());
  }
  return {level, std::move(items)};
}

inline CoverSnapshot snapshot_of(const CantorTree& t, const std::vector<int>& ids, int level) {
  return make_snapshot(level, cover_of(t, ids));
}

// finest nodes of a small-o family: Lambda'_depth
inline CoverSnapshot snapshot_of(const LambdaFamilyOx2& F) {
  int d = static_cast<int>(F.depth());
  return snapshot_of(F.tree, F.lambda_prime.at(static_cast<size_t>(d)), d);
}

inline CoverSnapshot snapshot_of(const LambdaFamilyTau& F) {
  int d = static_cast<int>(F.depth());
  return snapshot_of(F.tree, F.lambda.at(static_cast<size_t>(d)), d);
}

struct ScaleCount {
  Rational scale;
  std::uint64_t count = 0;
};

namespace detail {

inline std::int64_t cell_index(const Rational& x, const Rational& s, std::int64_t n) {
  BigInt f = floor(x / s);
  if (f < 0) return 0;
  if (f >= n) return n - 1;
  return f.convert_to<std::int64_t>();
}

}  // namespace detail

// Cells of the grid with corner -1/2 - i/2 and side s met by the bounding box of some ball,
// restricted to the unit square. 1/s must be an integer.
inline std::vector<ScaleCount> box_count(const CoverSnapshot& cover, const std::vector<Rational>& scales) {
  std::vector<ScaleCount> out;
  Rational half(1, 2);
  for (const auto& s : scales) {
    if (s <= 0 || s > 1) fail(Errc::InvalidArgument, "scale must lie in (0, 1]");
    Rational inv = 1 / s;
    if (denom(inv) != 1) fail(Errc::InvalidArgument, "scale " + s.str() + " does not tile the unit square");
    std::int64_t n = numer(inv).convert_to<std::int64_t>();
    if (n > (std::int64_t(1) << 31)) fail(Errc::InvalidArgument, "scale too fine");
    std::unordered_set<std::uint64_t> cells;
    for (const auto& b : cover.items) {
      Rational x0 = b.center.re() - b.radius + half, x1 = b.center.re() + b.radius + half;
      Rational y0 = b.center.im() - b.radius + half, y1 = b.center.im() + b.radius + half;
      if (x1 < 0 || y1 < 0 || x0 > 1 || y0 > 1) continue;
      std::int64_t i0 = detail::cell_index(x0, s, n), i1 = detail::cell_index(x1, s, n);
      std::int64_t j0 = detail::cell_index(y0, s, n), j1 = detail::cell_index(y1, s, n);
      for (std::int64_t i = i0; i <= i1; ++i)
        for (std::int64_t j = j0; j <= j1; ++j)
          cells.insert(static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint64_t>(j));
    }
    out.push_back({s, cells.size()});
  }
  return out;
}

inline std::vector<Rational> dyadic_scales(int from, int to) {
  if (from > to || from < 0) fail(Errc::InvalidArgument, "bad dyadic range");
  std::vector<Rational> out;
  for (int j = from; j <= to; ++j) out.push_back(Rational(1) / Rational(BigInt(1) << j));
  return out;
}

struct ReferenceValue {
  std::string name;
  std::optional<Rational> value;  // empty when the rate does not determine it
  std::string source;
};

struct DimensionReport {
  std::vector<ScaleCount> counts;
  double raw_slope = 0;
  double slope = 0;  // clamped to [0, 2]
  double intercept = 0;
  double residual = 0;  // rms of the fit
  std::vector<ReferenceValue> references;
};

// min(4/lambda, 2), 2 and d_tau from the rate class, exactly
inline std::vector<ReferenceValue> dimension_references(const RateClass& rc) {
  std::vector<ReferenceValue> out;
  ReferenceValue h{"hausdorff_small_o", std::nullopt, "min(4/lambda, 2) for psi = o(x^-2)"};
  if (rc.small_o_x2) {
    if (rc.lower_order.infinite) h.value = Rational(0);
    else if (rc.lower_order.value <= 2) h.value = Rational(2);
    else h.value = Rational(4 / rc.lower_order.value);
  }
  out.push_back(h);
  out.push_back({"packing", Rational(2), "packing dimension of the exact set"});
  ReferenceValue d{"d_tau", std::nullopt, "2 - tau/(1 - 2 tau) for 0 < tau <= 1/32"};
  if (!rc.tau.infinite && rc.tau.value > 0 && rc.tau.value <= Rational(1, 32)) d.value = d_tau_of(rc.tau.value);
  out.push_back(d);
  return out;
}

// least squares of log N against -log s
inline DimensionReport fit_dimension(std::vector<ScaleCount> counts, const std::optional<RateClass>& rc = std::nullopt) {
  if (counts.size() < 3) fail(Errc::DegenerateScales, "need at least 3 scales");
  std::sort(counts.begin(), counts.end(), [](const ScaleCount& a, const ScaleCount& b) { return a.scale > b.scale; });
  for (size_t i = 1; i < counts.size(); ++i)
    if (counts[i].scale == counts[i - 1].scale) fail(Errc::DegenerateScales, "repeated scale " + counts[i].scale.str());
  for (const auto& c : counts)
    if (c.count == 0) fail(Errc::DegenerateScales, "empty count at scale " + c.scale.str());
  if (counts.front().scale < 10 * counts.back().scale) fail(Errc::DegenerateScales, "scales span less than a decade");
  std::vector<double> x, y;
  for (const auto& c : counts) {
    x.push_back(-log_rational(c.scale));
    y.push_back(std::log(static_cast<double>(c.count)));
  }
  double n = static_cast<double>(x.size()), sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  DimensionReport r;
  r.raw_slope = sxy / sxx;
  r.intercept = my - r.raw_slope * mx;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (r.intercept + r.raw_slope * x[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  r.slope = std::clamp(r.raw_slope, 0.0, 2.0);
  r.counts = std::move(counts);
  if (rc) r.references = dimension_references(*rc);
  return r;
}

struct ExponentSweep {
  std::vector<std::vector<ProbeSample>> samples;  // per point, per radius
  double liminf_estimate = 0;  // smallest lower exponent over all samples
  double limsup_estimate = 0;  // largest upper exponent
  std::vector<ReferenceValue> bands;
};

inline ExponentSweep aggregate_sweep(std::vector<std::vector<ProbeSample>> samples) {
  ExponentSweep s;
  bool first = true;
  for (const auto& row : samples)
    for (const auto& p : row) {
      if (first || p.exponent_lo < s.liminf_estimate) s.liminf_estimate = p.exponent_lo;
      if (first || p.exponent_hi > s.limsup_estimate) s.limsup_estimate = p.exponent_hi;
      first = false;
    }
  s.samples = std::move(samples);
  return s;
}

inline ExponentSweep local_exponent_sweep(const LambdaFamilyOx2& F, const std::vector<SampledPoint>& points,
                                          const std::vector<Rational>& radii) {
  std::vector<std::vector<ProbeSample>> rows;
  for (const auto& z : points) rows.push_back(local_dimension_probe(F, z, radii));
  ExponentSweep s = aggregate_sweep(std::move(rows));
  const auto& sc = F.schedule;
  s.bands.push_back({"liminf_band", 4 / sc.lambda - 6 * sc.lambda * sc.epsilon, "4/lambda - 6 lambda eps"});
  s.bands.push_back({"limsup_band", 2 - 2 * sc.epsilon, "2 - 2 eps"});
  return s;
}

inline ExponentSweep local_exponent_sweep(const LambdaFamilyTau& F, const std::vector<SampledPoint>& points,
                                          const std::vector<Rational>& radii) {
  std::vector<std::vector<ProbeSample>> rows;
  for (const auto& z : points) rows.push_back(local_dimension_probe(F.tree, z, radii));
  ExponentSweep s = aggregate_sweep(std::move(rows));
  s.bands.push_back({"d_tau", F.schedule.d_tau, "2 - tau/(1 - 2 tau)"});
  return s;
}

}  // namespace hcf
