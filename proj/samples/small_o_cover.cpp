// Build a desk-scale small-o family for psi = x^-4 and box-count its finest cover.
#include <iostream>

#include "hcf/dimension.hpp"

int main() {
  using namespace hcf;
  ApproxRate r = ApproxRate::parse("x^-4");
  ScheduleOverrides ov;
  ov.n = {BigInt(1), BigInt(4), BigInt(5)};
  ScheduleOx2 s = schedule_build(r, Rational(1, 5), 3, BuildMode::Desk, ov);
  BuildOptionsOx2 o;
  o.u_cap = 8;
  o.b_cap = 4;
  LambdaFamilyOx2 F = build_lambda(s, 3, o);
  for (const auto& a : F.audits)
    if (a.k >= 2)
      std::cout << "level " << a.k << ": " << a.prime_size << " balls, window " << a.window_certified << " certified, "
                << a.window_failed << " failed\n";
  std::cout << "mass conserved: " << (mass_conserved(F.tree) ? "yes" : "no") << "\n";
  DimensionReport d = fit_dimension(box_count(snapshot_of(F), dyadic_scales(0, 6)), r.classify());
  for (const auto& c : d.counts) std::cout << "  s = " << c.scale << "  N = " << c.count << "\n";
  std::cout << "slope " << d.slope << " against " << d.references[0].name << " = " << d.references[0].value->str() << "\n";
}
