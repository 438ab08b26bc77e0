// Count full words over I_M crossing the threshold Q, and list a few.
#include <iostream>

#include "hcf/enumeration.hpp"

int main(int argc, char** argv) {
  using namespace hcf;
  long M = argc > 1 ? std::stol(argv[1]) : 3;
  Rational Q = parse_rational(argc > 2 ? argv[2] : "10");
  FullFamily f = enumerate_full(M, Q);
  std::cout << "M = " << M << ", Q = " << Q << ": " << f.members.size() << " full words, " << f.visited
            << " nodes visited\n";
  for (size_t i = 0; i < f.members.size() && i < 8; ++i) {
    const auto& w = f.members[i];
    std::cout << "  " << w << "  |q|^2 = " << qpair(w).q.norm() << "\n";
  }
}
