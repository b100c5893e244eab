#pragma once

// Class numbers of imaginary quadratic orders, the Hurwitz class number in
// the normalization for which Deuring's count
//   #{(b, c) in F_q^2 : disc != 0, a_q = a} = (q - 1) H(a^2 - 4q)
// holds exactly, and the class-number moment sums over |a| <= 2 sqrt(q).

#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/frobenius.hpp"

namespace avgrank {

inline void require_negative_discriminant(i64 D) {
  if (D >= 0) throw std::invalid_argument("discriminant must be negative");
  const i64 r = mod(D, 4);
  if (r != 0 && r != 1) throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
}

/// Number of reduced primitive forms (a, b, c), b^2 - 4ac = D, |b| <= a <= c,
/// b >= 0 whenever |b| = a or a = c.
inline i64 class_number(i64 D) {
  require_negative_discriminant(D);
  const i64 absD = -D;
  i64 h = 0;
  for (i64 a = 1; 3 * a * a <= absD; ++a) {
    for (i64 b = -a + 1; b <= a; ++b) {
      const i64 num = b * b - D;
      if (num % (4 * a) != 0) continue;
      const i64 c = num / (4 * a);
      if (c < a) continue;
      if (b < 0 && c == a) continue;
      if (std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
      ++h;
    }
  }
  return h;
}

/// #O^x for the order of discriminant D.
inline int unit_count(i64 D) {
  if (D == -3) return 6;
  if (D == -4) return 4;
  return 2;
}

/// sum over orders O' containing O of h(O') / #O'^x; the orders are the
/// discriminants D / f^2 that are still 0 or 1 mod 4.
inline Rational hurwitz_H(i64 D) {
  require_negative_discriminant(D);
  Rational H(0);
  for (i64 f = 1; f * f <= -D; ++f) {
    if (D % (f * f) != 0) continue;
    const i64 d = D / (f * f);
    const i64 r = mod(d, 4);
    if (r != 0 && r != 1) continue;
    H += Rational(class_number(d), unit_count(d));
  }
  return H;
}

/// Memoized hurwitz_H; concurrent readers, exclusive insertion.
class HurwitzCache {
 public:
  Rational operator()(i64 D) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(D); it != table_.end()) return it->second;
    }
    const Rational v = hurwitz_H(D);
    std::unique_lock lock(mutex_);
    table_.emplace(D, v);
    return v;
  }

 private:
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<i64, Rational> table_;
};

inline i64 hasse_bound(i64 q) { return isqrt(4 * q); }

/// Map a -> #{(b, c) in F_q^2 : 4b^3 + 27c^2 != 0, a_q(E_{b,c}) = a}.
inline std::map<i64, i64> deuring_distribution(i64 q) {
  if (q < 5 || !is_prime(static_cast<u64>(q))) throw std::invalid_argument("deuring: q must be a prime >= 5");
  const LegendreTable chi(q);
  const auto traces = trace_table(chi);
  std::map<i64, i64> out;
  for (i64 b = 0; b < q; ++b) {
    for (i64 c = 0; c < q; ++c) {
      if ((4 * b * b % q * b + 27 * c * c) % q == 0) continue;
      ++out[traces[static_cast<std::size_t>(b * q + c)]];
    }
  }
  return out;
}

inline i64 deuring_count(i64 q, i64 a) {
  if (q < 5 || !is_prime(static_cast<u64>(q))) throw std::invalid_argument("deuring_count: q must be a prime >= 5");
  if (a * a > 4 * q) throw std::domain_error("deuring_count: |a| exceeds the Hasse bound");
  const auto dist = deuring_distribution(q);
  const auto it = dist.find(a);
  return it == dist.end() ? 0 : it->second;
}

/// q = p^n with p >= 5; returns {p, n}.
inline std::pair<i64, int> prime_power_split(i64 q) {
  if (q < 5) throw std::invalid_argument("q must be a prime power p^n with p >= 5");
  const auto f = factor(q);
  if (f.factors.size() != 1 || f.factors[0].prime < 5)
    throw std::invalid_argument("q must be a prime power p^n with p >= 5");
  return {f.factors[0].prime, f.factors[0].exponent};
}

/// Value taken for the degenerate term a^2 = 4q (q a square): the extended
/// Hurwitz value H(0) = -1/12, halved like every other value here.
inline Rational hurwitz_H_zero() { return Rational(-1, 24); }

struct ClassNumberSums {
  Rational S0, S1, S2;
};

/// S_j = sum_{|a| <= 2 sqrt q} a^j H(a^2 - 4q), j = 0, 1, 2.
inline ClassNumberSums class_number_sums(i64 q) {
  prime_power_split(q);
  ClassNumberSums s{Rational(0), Rational(0), Rational(0)};
  const i64 m = hasse_bound(q);
  for (i64 a = -m; a <= m; ++a) {
    const i64 D = a * a - 4 * q;
    const Rational H = D == 0 ? hurwitz_H_zero() : hurwitz_H(D);
    s.S0 += H;
    s.S1 += H * a;
    s.S2 += H * (a * a);
  }
  return s;
}

/// (1/2) sum_{d d' = q} max(d, d')
inline Rational half_sum_max_divisors(i64 q) {
  i64 s = 0;
  for (i64 d = 1; d <= q; ++d)
    if (q % d == 0) s += std::max(d, q / d);
  return Rational(s, 2);
}

/// sum_{d d' = q} min(d, d')^3
inline i64 sum_min_divisor_cubes(i64 q) {
  i64 s = 0;
  for (i64 d = 1; d <= q; ++d)
    if (q % d == 0) s += checked_pow(std::min(d, q / d), 3);
  return s;
}

}  // namespace avgrank
