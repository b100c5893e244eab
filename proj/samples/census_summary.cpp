// Census size at a few heights against 4/zeta(10) B^{5/6}.
#include <cmath>
#include <cstdio>

#include "avgrank/census.hpp"

int main() {
  using namespace avgrank;
  for (i64 B : {1'000, 100'000, 10'000'000}) {
    const Census c(B);
    const double pred = census_constant() * std::pow(static_cast<double>(B), 5.0 / 6);
    std::printf("B=%-10lld curves=%-9lld predicted=%.1f ratio=%.5f\n", static_cast<long long>(B),
                static_cast<long long>(c.size()), pred, static_cast<double>(c.size()) / pred);
  }
}
