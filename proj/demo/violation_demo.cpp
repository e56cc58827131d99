// Prints the multiplicativity verdict around the operator-norm threshold and
// the minimal violating k for a few finite p.

#include <cstdio>

#include "freecp/freelimits.hpp"

int main() {
  using namespace freecp;
  std::printf("%4s %12s %12s %12s %s\n", "k", "(4/k)^2", "1/k+1/k^2", "margin", "violated");
  for (int k = 12; k <= 20; ++k) {
    const ViolationReport v = multiplicativity_verdict(k, SchattenIndex::infinity());
    std::printf("%4d %12.6f %12.6f %12.3e %s\n", k, v.single_upper * v.single_upper, v.pair_lower, v.margin,
                v.violated ? "yes" : "no");
  }
  std::printf("\n%6s %s\n", "p", "first violating k (scan to 1e6)");
  for (double p : {1.5, 2.0, 3.0, 5.0, 10.0}) {
    const ViolationScan s = scan_multiplicativity(SchattenIndex::finite(p), 2, 1000000);
    if (s.first_violating) {
      std::printf("%6.2f %lld\n", p, static_cast<long long>(*s.first_violating));
    } else {
      std::printf("%6.2f none\n", p);
    }
  }
  const ViolationScan moe = scan_moe_gap(2, 1000000);
  std::printf("\nentropy gap positive for some k <= 1e6: %s\n", moe.first_violating ? "yes" : "no");
  std::printf("entropy gap at k = 486751282: %.3e\n", moe_gap_value(486751282.0));
  return 0;
}
