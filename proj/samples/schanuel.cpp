// Rational points of P^1 and P(1,2) by height, against kappa B^{|w|}.
#include <cmath>
#include <cstdio>

#include "avgrank/wps.hpp"

int main() {
  using namespace avgrank;
  for (const auto& w : {WeightVector({1, 1}), WeightVector({1, 2})}) {
    const double kappa = leading_constant(w, FieldInvariants::rationals());
    std::printf("w=(%d,%d) kappa=%.10f\n", w[0], w[1], kappa);
    for (double B : {10.0, 100.0, 1000.0}) {
      const i64 n = count_points(w, B);
      std::printf("  B=%-6g count=%-10lld ratio=%.5f\n", B, static_cast<long long>(n),
                  static_cast<double>(n) / (kappa * std::pow(B, w.total())));
    }
  }
}
