// Expand a Gaussian rational and print its convergents with their scaled errors.
#include <iostream>

#include "hcf/approximation.hpp"

int main(int argc, char** argv) {
  using namespace hcf;
  GaussRat z = parse_gauss_rat(argc > 1 ? argv[1] : "(3+5i)/17");
  Expansion e = hcf_expand(z);
  QPairTrace t = qpair_of(e.digits);
  std::cout << z << " = [0; " << e.digits.str() << "]\n";
  for (size_t n = 1; n <= e.depth(); ++n) {
    GaussRat c = GaussRat::fraction(t.p[n], t.q[n]);
    Rational qn(t.q[n].norm());
    Rational err = (z - c).norm_sq() * qn * qn;
    std::cout << n << "  " << c << "  |q|^4|z-p/q|^2 = " << err << (is_good_approximation(z, t.p[n], t.q[n]) ? "  good" : "")
              << "\n";
  }
}
