#pragma once

// Exact integer utilities, rationals and zeta evaluators shared by every
// other module. Everything here is pure and reentrant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace avgrank {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

using Rational = boost::rational<i64>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---------------------------------------------------------------------------
// Checked arithmetic

inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("i64 addition overflow");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("i64 multiplication overflow");
  return r;
}

inline i64 narrow(i128 v) {
  if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
    throw std::overflow_error("value does not fit in 64 bits");
  return static_cast<i64>(v);
}

inline i64 checked_pow(i64 base, unsigned exp) {
  i64 r = 1;
  for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

/// Largest x >= 0 with x*x <= n.
inline i64 isqrt(i64 n) {
  if (n < 0) throw std::domain_error("isqrt of negative value");
  auto x = static_cast<i64>(std::sqrt(static_cast<long double>(n)));
  while (x > 0 && static_cast<i128>(x) * x > n) --x;
  while (static_cast<i128>(x + 1) * (x + 1) <= n) ++x;
  return x;
}

/// Largest x >= 0 with x^3 <= n (n >= 0).
inline i64 icbrt(i64 n) {
  if (n < 0) throw std::domain_error("icbrt of negative value");
  auto x = static_cast<i64>(std::cbrt(static_cast<long double>(n)));
  auto cube = [](i64 v) { return static_cast<i128>(v) * v * v; };
  while (x > 0 && cube(x) > n) --x;
  while (cube(x + 1) <= n) ++x;
  return x;
}

inline i64 mod(i64 a, i64 m) {
  const i64 r = a % m;
  return r < 0 ? r + m : r;
}

/// Inverse of a modulo m (gcd(a, m) = 1).
inline i64 mod_inverse(i64 a, i64 m) {
  i64 old_r = mod(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    const i64 q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) throw std::domain_error("mod_inverse: not invertible");
  return mod(old_s, m);
}

inline bool is_square(i64 n) {
  if (n < 0) return false;
  const i64 r = isqrt(n);
  return r * r == n;
}

// ---------------------------------------------------------------------------
// Primality and factorization

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// Brent's variant of Pollard rho; n is odd, composite.
inline u64 pollard_rho(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

}  // namespace detail

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (detail::miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

struct PrimePower {
  i64 prime;
  int exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  i64 n = 1;
  std::vector<PrimePower> factors;  // strictly increasing primes

  i64 product() const {
    i64 r = 1;
    for (const auto& f : factors) r = checked_mul(r, checked_pow(f.prime, static_cast<unsigned>(f.exponent)));
    return r;
  }
};

inline Factorization factor(i64 n) {
  if (n <= 0) throw std::invalid_argument("factor: n must be positive");
  Factorization out;
  out.n = n;
  std::vector<u64> primes;
  u64 m = static_cast<u64>(n);
  for (u64 p = 2; p < 1000 && p * p <= m; p += (p == 2 ? 1 : 2)) {
    while (m % p == 0) {
      primes.push_back(p);
      m /= p;
    }
  }
  std::vector<u64> stack;
  if (m > 1) stack.push_back(m);
  while (!stack.empty()) {
    const u64 v = stack.back();
    stack.pop_back();
    if (v == 1) continue;
    if (is_prime(v)) {
      primes.push_back(v);
      continue;
    }
    const u64 d = detail::pollard_rho(v);
    stack.push_back(d);
    stack.push_back(v / d);
  }
  std::sort(primes.begin(), primes.end());
  for (u64 p : primes) {
    if (!out.factors.empty() && out.factors.back().prime == static_cast<i64>(p))
      ++out.factors.back().exponent;
    else
      out.factors.push_back({static_cast<i64>(p), 1});
  }
  return out;
}

/// Exponent of the prime p in n. Throws for n = 0 (the valuation is infinite).
inline int valuation(i64 n, i64 p) {
  if (n == 0) throw std::domain_error("valuation of zero is infinite");
  if (p < 2) throw std::invalid_argument("valuation: p must be prime");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// Valuation with v(0) reported as `cap`; results are clamped to `cap`.
inline int valuation_capped(i128 n, i64 p, int cap) {
  if (n == 0) return cap;
  int v = 0;
  while (v < cap && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline int moebius(i64 n) {
  if (n < 1) throw std::invalid_argument("moebius: n must be positive");
  int sign = 1;
  for (const auto& f : factor(n).factors) {
    if (f.exponent > 1) return 0;
    sign = -sign;
  }
  return sign;
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(i64 a, i64 p) {
  const u64 r = static_cast<u64>(mod(a, p));
  if (r == 0) return 0;
  return detail::powmod(r, static_cast<u64>(p - 1) / 2, static_cast<u64>(p)) == 1 ? 1 : -1;
}

/// Kronecker symbol (D/n) for n >= 1.
inline int kronecker(i64 D, i64 n) {
  if (n < 1) throw std::invalid_argument("kronecker: n must be positive");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    const i64 r = mod(D, 8);
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  if (n == 1) return result;
  for (const auto& f : factor(n).factors) {
    const int l = legendre(D, f.prime);
    if (l == 0) return 0;
    if (l < 0 && f.exponent % 2 == 1) result = -result;
  }
  return result;
}

/// Primes in [lo, hi] by a plain sieve of Eratosthenes.
inline std::vector<i64> primes_between(i64 lo, i64 hi) {
  std::vector<i64> out;
  if (hi < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(hi) + 1, false);
  for (i64 p = 2; p <= hi; ++p) {
    if (composite[static_cast<std::size_t>(p)]) continue;
    if (p >= lo) out.push_back(p);
    for (i64 q = p * p; q <= hi; q += p) composite[static_cast<std::size_t>(q)] = true;
  }
  return out;
}

inline bool is_squarefree(i64 n) {
  if (n == 0) return false;
  for (const auto& f : factor(n < 0 ? -n : n).factors)
    if (f.exponent > 1) return false;
  return true;
}

/// Fundamental discriminant of a quadratic field (D != 1).
inline bool is_fundamental_discriminant(i64 D) {
  if (D == 0 || D == 1) return false;
  const i64 r = mod(D, 4);
  if (r == 1) return is_squarefree(D);
  if (r != 0) return false;
  const i64 m = D / 4;
  const i64 rm = mod(m, 4);
  return (rm == 2 || rm == 3) && is_squarefree(m);
}

/// Compensated floating-point summation.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

// ---------------------------------------------------------------------------
// Zeta values

struct ZetaValue {
  int s = 2;
  double value = 0.0;
  i64 truncation = 0;
  double error_bound = 0.0;
};

/// Riemann zeta at an integer s >= 2. The tail sum_{n>N} n^-s lies in
/// [(N+1)^{1-s}/(s-1), N^{1-s}/(s-1)]; the midpoint is added and half the
/// interval width is the reported bound.
inline ZetaValue zeta_q(int s, double precision = 1e-12) {
  if (s < 2) throw std::domain_error("zeta_q: s must be >= 2");
  if (!(precision > 0)) throw std::invalid_argument("zeta_q: precision must be positive");
  auto width = [s](long double N) {
    return (std::pow(N, 1.0L - s) - std::pow(N + 1, 1.0L - s)) / (s - 1) / 2;
  };
  i64 N = 1;
  while (width(static_cast<long double>(N)) > precision * 0.25L) N *= 2;
  long double sum = 0;
  for (i64 n = N; n >= 1; --n) sum += std::pow(static_cast<long double>(n), -s);
  const long double lo = std::pow(static_cast<long double>(N + 1), 1.0L - s) / (s - 1);
  const long double hi = std::pow(static_cast<long double>(N), 1.0L - s) / (s - 1);
  ZetaValue z;
  z.s = s;
  z.value = static_cast<double>(sum + (lo + hi) / 2);
  z.truncation = N;
  // Rounding of the partial sum in long double stays far below the target.
  z.error_bound = static_cast<double>((hi - lo) / 2) + 1e-16 * static_cast<double>(sum);
  return z;
}

/// Dedekind zeta of the quadratic field of fundamental discriminant D,
/// evaluated as zeta(s) * L(s, chi_D). The character sum is bounded by |D|,
/// so partial summation gives |tail of L| <= |D| N^-s.
inline ZetaValue zeta_quadratic(i64 D, int s, double precision = 1e-12) {
  if (!is_fundamental_discriminant(D)) throw std::invalid_argument("zeta_quadratic: D is not a fundamental discriminant");
  if (s < 2) throw std::domain_error("zeta_quadratic: s must be >= 2");
  const ZetaValue z = zeta_q(s, precision / 4);
  const long double absD = static_cast<long double>(D < 0 ? -D : D);
  i64 N = std::max<i64>(
      static_cast<i64>(absD),
      static_cast<i64>(std::ceil(std::pow(absD * 4 / precision, 1.0L / s))));
  // chi_D is periodic mod |D|; tabulate one period.
  const i64 period = static_cast<i64>(absD);
  std::vector<int> chi(static_cast<std::size_t>(period));
  for (i64 n = 1; n <= period; ++n) chi[static_cast<std::size_t>(n % period)] = kronecker(D, n);
  long double L = 0;
  for (i64 n = N; n >= 1; --n) {
    const int c = chi[static_cast<std::size_t>(n % period)];
    if (c != 0) L += c * std::pow(static_cast<long double>(n), -s);
  }
  const long double L_err = absD * std::pow(static_cast<long double>(N), -s);
  ZetaValue out;
  out.s = s;
  out.value = static_cast<double>(z.value * L);
  out.truncation = N;
  out.error_bound = static_cast<double>(z.error_bound * (L + L_err) + z.value * L_err) + 1e-15;
  return out;
}

}  // namespace avgrank
