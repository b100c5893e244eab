#pragma once

// Point counts of y^2 = x^3 + A x + b over F_p by character sums.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "avgrank/arith.hpp"

namespace avgrank {

/// Quadratic character of F_p tabulated once (p odd prime).
class LegendreTable {
 public:
  explicit LegendreTable(i64 p) : p_(p), chi_(static_cast<std::size_t>(p), -1) {
    if (p < 3 || !is_prime(static_cast<u64>(p))) throw std::invalid_argument("LegendreTable: p must be an odd prime");
    chi_[0] = 0;
    for (i64 x = 1; x < p; ++x) chi_[static_cast<std::size_t>(x * x % p)] = 1;
  }

  i64 prime() const { return p_; }
  int operator()(i64 a) const { return chi_[static_cast<std::size_t>(mod(a, p_))]; }
  int reduced(i64 r) const { return chi_[static_cast<std::size_t>(r)]; }

 private:
  i64 p_;
  std::vector<std::int8_t> chi_;
};

/// p + 1 - #E(F_p) = -sum_x chi(x^3 + A x + b). For a singular reduction
/// this is still p + 1 - #(points of the cubic), i.e. +1 / -1 / 0 for a
/// split node / nonsplit node / cusp.
inline i64 trace_of_frobenius(i64 A, i64 b, const LegendreTable& chi) {
  const i64 p = chi.prime();
  const i64 a = mod(A, p), c = mod(b, p);
  i64 s = 0;
  for (i64 x = 0; x < p; ++x) s += chi.reduced(static_cast<i64>((static_cast<i128>(x) * x % p * x + a * x + c) % p));
  return -s;
}

/// #E(F_p) including the point at infinity, by listing every (x, y).
inline i64 count_points_naive(i64 A, i64 b, i64 p) {
  std::vector<i64> roots(static_cast<std::size_t>(p), 0);
  for (i64 y = 0; y < p; ++y) ++roots[static_cast<std::size_t>(y * y % p)];
  i64 n = 1;
  for (i64 x = 0; x < p; ++x) n += roots[static_cast<std::size_t>(mod(x * x % p * x + mod(A, p) * x + mod(b, p), p))];
  return n;
}

/// Traces for all (A, b) mod p, indexed A * p + b, in O(p^3): for each A the
/// multiset of x^3 + A x is tabulated and correlated with chi.
inline std::vector<std::int32_t> trace_table(const LegendreTable& chi) {
  const i64 p = chi.prime();
  std::vector<std::int32_t> out(static_cast<std::size_t>(p * p));
  std::vector<i64> hist(static_cast<std::size_t>(p));
  for (i64 A = 0; A < p; ++A) {
    std::fill(hist.begin(), hist.end(), 0);
    for (i64 x = 0; x < p; ++x) ++hist[static_cast<std::size_t>((x * x % p * x + A * x) % p)];
    for (i64 c = 0; c < p; ++c) {
      i64 s = 0;
      for (i64 v = 0; v < p; ++v) {
        const i64 h = hist[static_cast<std::size_t>(v)];
        if (h == 0) continue;
        i64 u = v + c;
        if (u >= p) u -= p;
        s += h * chi.reduced(u);
      }
      out[static_cast<std::size_t>(A * p + c)] = static_cast<std::int32_t>(-s);
    }
  }
  return out;
}

}  // namespace avgrank
