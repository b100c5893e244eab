// Share of each Kodaira type at p among curves of height <= B.
#include <cstdio>
#include <cstdlib>

#include "avgrank/census.hpp"

int main(int argc, char** argv) {
  using namespace avgrank;
  const i64 p = argc > 1 ? std::atoll(argv[1]) : 5;
  const i64 B = argc > 2 ? std::atoll(argv[2]) : 1'000'000;
  const auto st = local_statistics(Census(B), p);
  std::printf("p=%lld B=%lld curves=%lld\n", static_cast<long long>(p), static_cast<long long>(B),
              static_cast<long long>(st.total));
  for (const auto& [type, n] : st.by_kodaira)
    std::printf("%-6s %10lld  %.6f\n", to_string(type).c_str(), static_cast<long long>(n),
                static_cast<double>(n) / static_cast<double>(st.total));
}
