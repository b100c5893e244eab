#pragma once

// Rational points of weighted projective space P(w) over Q: scaling
// content, normalization, height, enumeration under congruence conditions,
// and the leading constant of the point count over a number field.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/lattice.hpp"

namespace avgrank {

struct WpsPoint {
  WeightVector weights;
  std::vector<i64> coords;
  double height = 0;

  friend bool operator==(const WpsPoint& a, const WpsPoint& b) {
    return a.weights == b.weights && a.coords == b.coords;
  }
};

/// prod_p p^{min_i floor(v_p(x_i)/w_i)}, minimum over nonzero coordinates.
inline i64 scaling_content(std::span<const i64> coords, const WeightVector& w) {
  if (coords.size() != w.size()) throw std::invalid_argument("scaling_content: dimension mismatch");
  i64 g = 0;
  for (i64 x : coords) g = std::gcd(g, x < 0 ? -x : x);
  if (g == 0) throw std::invalid_argument("scaling_content: all coordinates are zero");
  if (g == 1) return 1;
  i64 content = 1;
  for (const auto& f : factor(g).factors) {
    int e = INT32_MAX;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] == 0) continue;
      e = std::min(e, valuation(coords[i], f.prime) / w[i]);
    }
    content = checked_mul(content, checked_pow(f.prime, static_cast<unsigned>(e)));
  }
  return content;
}

inline double weighted_height(std::span<const i64> coords, const WeightVector& w) {
  double h = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    h = std::max(h, std::pow(std::abs(static_cast<double>(coords[i])), 1.0 / w[i]));
  }
  return h;
}

/// Canonical sign: lambda = -1 flips the odd-weight coordinates, so the first
/// nonzero odd-weight coordinate is made positive. With no odd weight (or all
/// odd-weight coordinates zero) -1 acts trivially.
inline bool is_sign_normalized(std::span<const i64> coords, const WeightVector& w) {
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (w[i] % 2 == 0 || coords[i] == 0) continue;
    return coords[i] > 0;
  }
  return true;
}

inline WpsPoint normalize(std::span<const i64> coords, const WeightVector& w) {
  const i64 c = scaling_content(coords, w);
  WpsPoint pt;
  pt.weights = w;
  pt.coords.assign(coords.begin(), coords.end());
  if (c != 1) {
    for (std::size_t i = 0; i < pt.coords.size(); ++i) pt.coords[i] /= checked_pow(c, static_cast<unsigned>(w[i]));
  }
  if (!is_sign_normalized(pt.coords, w)) {
    for (std::size_t i = 0; i < pt.coords.size(); ++i)
      if (w[i] % 2 != 0) pt.coords[i] = -pt.coords[i];
  }
  pt.height = weighted_height(pt.coords, w);
  return pt;
}

inline WpsPoint normalize(std::initializer_list<i64> coords, const WeightVector& w) {
  const std::vector<i64> v(coords);
  return normalize(std::span<const i64>(v), w);
}

inline double height(const WpsPoint& p) { return weighted_height(p.coords, p.weights); }

/// Integer coordinate bounds floor(B^{w_i}); exact when B is an integer.
inline std::vector<i64> height_box(const WeightVector& w, double B) {
  if (!(B > 0)) throw std::invalid_argument("height_box: B must be positive");
  std::vector<i64> X(w.size());
  const bool integral = B == std::floor(B) && B < 9.0e18;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (integral) {
      i128 v = 1;
      for (int k = 0; k < w[i]; ++k) {
        v *= static_cast<i64>(B);
        if (v > static_cast<i128>(4'000'000'000'000'000'000LL))
          throw std::overflow_error("height box exceeds 63-bit coordinates");
      }
      X[i] = static_cast<i64>(v);
    } else {
      X[i] = dilated_bound(1.0, B, w[i]);
    }
  }
  return X;
}

/// Visits the normalized points of P(w)(Q) with height <= B whose normalized
/// coordinates satisfy `conditions`, in lexicographic order of coordinates.
template <class Fn>
void for_each_point(const WeightVector& w, double B, const CongruenceBox& conditions, Fn&& fn) {
  if (B < 1) throw std::invalid_argument("enumerate: B must be >= 1");
  const std::size_t n = w.size();
  const std::vector<i64> X = height_box(w, B);
  std::vector<std::vector<i64>> prog(n);
  for (std::size_t i = 0; i < n; ++i) {
    const i64 M = conditions.empty() ? 1 : conditions.modulus(i);
    const i64 r = conditions.empty() ? 0 : conditions.residue(i);
    prog[i] = detail::progression(X[i], r, M);
    if (prog[i].empty()) return;
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<i64> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = prog[i][0];
  while (true) {
    bool nonzero = false;
    i64 g = 0;
    for (i64 v : x) {
      nonzero = nonzero || v != 0;
      g = std::gcd(g, v < 0 ? -v : v);
    }
    if (nonzero && is_sign_normalized(x, w) && (g == 1 || scaling_content(x, w) == 1)) {
      WpsPoint pt;
      pt.weights = w;
      pt.coords = x;
      pt.height = weighted_height(x, w);
      fn(pt);
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < prog[i].size()) {
        x[i] = prog[i][idx[i]];
        break;
      }
      idx[i] = 0;
      x[i] = prog[i][0];
      if (i == 0) return;
    }
  }
}

inline std::vector<WpsPoint> enumerate(const WeightVector& w, double B, const CongruenceBox& conditions = {}) {
  std::vector<WpsPoint> out;
  for_each_point(w, B, conditions, [&](const WpsPoint& p) { out.push_back(p); });
  return out;
}

// ---------------------------------------------------------------------------
// Counting without materializing points (two coordinates).

namespace detail {

// Number of y = r (mod M) in [lo, hi] with L | y.
inline i64 count_multiples_in_progression(i64 lo, i64 hi, i64 r, i64 M, i64 L) {
  const i64 g = std::gcd(M, L);
  if (mod(r, g) != 0) return 0;
  const i64 lcm = narrow(static_cast<i128>(M / g) * L);
  // y = L t with L t = r (mod M), i.e. t = (r/g) (L/g)^{-1} (mod M/g).
  const i64 m = M / g;
  const i64 t = m == 1 ? 0 : static_cast<i64>(static_cast<i128>(mod(r / g, m)) * mod_inverse(mod(L / g, m), m) % m);
  return count_progression(lo, hi, narrow(static_cast<i128>(L) * t), lcm);
}

}  // namespace detail

/// Counts of k-th-power-free positive integers y <= t for every threshold t,
/// restricted to y = r (mod M), by one segmented sieve pass.
inline std::vector<i64> power_free_counts(int k, std::vector<i64> thresholds, i64 r = 0, i64 M = 1) {
  std::vector<i64> out(thresholds.size(), 0);
  if (thresholds.empty()) return out;
  const i64 top = *std::max_element(thresholds.begin(), thresholds.end());
  std::vector<std::size_t> order(thresholds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return thresholds[a] < thresholds[b]; });
  if (k == 1) {
    // Only y = 1 has no prime divisor.
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      out[i] = (thresholds[i] >= 1 && mod(1 - r, M) == 0) ? 1 : 0;
    return out;
  }
  std::vector<i64> powers;
  for (i64 p : primes_between(2, std::max<i64>(2, static_cast<i64>(std::pow(static_cast<double>(top), 1.0 / k)) + 2))) {
    const i128 pk = [&] {
      i128 v = 1;
      for (int j = 0; j < k; ++j) v *= p;
      return v;
    }();
    if (pk <= top) powers.push_back(static_cast<i64>(pk));
  }
  constexpr i64 kSegment = 1 << 20;
  std::vector<char> bad(kSegment);
  i64 running = 0;
  std::size_t next = 0;
  while (next < order.size() && thresholds[order[next]] < 1) out[order[next++]] = 0;
  for (i64 base = 1; base <= top && next < order.size(); base += kSegment) {
    const i64 end = std::min(top, base + kSegment - 1);
    std::fill(bad.begin(), bad.begin() + (end - base + 1), 0);
    for (i64 q : powers) {
      for (i64 y = ((base + q - 1) / q) * q; y <= end; y += q) bad[static_cast<std::size_t>(y - base)] = 1;
    }
    for (i64 y = base; y <= end; ++y) {
      if (!bad[static_cast<std::size_t>(y - base)] && mod(y - r, M) == 0) ++running;
      while (next < order.size() && thresholds[order[next]] == y) out[order[next++]] = running;
    }
  }
  while (next < order.size()) out[order[next++]] = running;
  return out;
}

/// #{1 <= y <= Y : y is k-th-power-free} = sum_{d^k <= Y} mu(d) floor(Y / d^k).
inline i64 power_free_count(int k, i64 Y) {
  if (k < 1) throw std::invalid_argument("power_free_count: k must be >= 1");
  if (Y < 1) return 0;
  if (k == 1) return 1;
  i64 total = 0;
  for (i64 d = 1;; ++d) {
    i128 dk = 1;
    for (int j = 0; j < k && dk <= Y; ++j) dk *= d;
    if (dk > Y) break;
    total += moebius(d) * (Y / static_cast<i64>(dk));
  }
  return total;
}

/// Primitive (content 1) tuples (x, y) with |x| <= X, |y| <= Y for weights
/// (w0, w1), without sign identification. For each x != 0 the primes with
/// p^w0 | x are collected and the y-fiber is counted by inclusion-exclusion
/// on p^w1 | y; the x = 0 fiber is the w1-th-power-free count.
class PrimitiveCounter {
 public:
  PrimitiveCounter(const WeightVector& w, i64 max_x) : w_(w), max_x_(max_x) {
    if (w.size() != 2) throw std::invalid_argument("PrimitiveCounter: two weights required");
    // Smallest-prime tables of the w0-th power divisors of |x| <= max_x.
    divisors_.assign(static_cast<std::size_t>(max_x) + 1, {});
    for (i64 p : primes_between(2, std::max<i64>(2, static_cast<i64>(std::pow(static_cast<double>(max_x), 1.0 / w[0])) + 2))) {
      i128 pw = 1;
      for (int j = 0; j < w[0]; ++j) pw *= p;
      if (pw > max_x) continue;
      for (i64 x = static_cast<i64>(pw); x <= max_x; x += static_cast<i64>(pw)) divisors_[static_cast<std::size_t>(x)].push_back(p);
    }
  }

  /// Tuples with x != 0 (both signs of x).
  i64 count_nonzero_x(i64 X, i64 Y) const {
    if (X > max_x_) throw std::out_of_range("PrimitiveCounter: X beyond precomputed range");
    i64 total = 0;
    for (i64 x = 1; x <= X; ++x) total += 2 * fiber(x, Y);
    return total;
  }

  /// y-fiber count over |y| <= Y for a fixed x != 0.
  i64 fiber(i64 x, i64 Y) const {
    const auto& ps = divisors_[static_cast<std::size_t>(x < 0 ? -x : x)];
    if (ps.empty()) return 2 * Y + 1;
    i64 count = 0;
    const std::size_t k = ps.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      i128 L = 1;
      int bits = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (!(mask >> j & 1)) continue;
        ++bits;
        for (int e = 0; e < w_[1]; ++e) L *= ps[j];
      }
      const i64 multiples = L > Y ? 1 : 2 * (Y / static_cast<i64>(L)) + 1;
      count += (bits % 2 == 0) ? multiples : -multiples;
    }
    return count;
  }

 private:
  WeightVector w_;
  i64 max_x_;
  std::vector<std::vector<i64>> divisors_;
};

/// Number of points of P(w)(Q), w of length 2, with height <= B whose
/// normalized coordinates satisfy the box.
inline i64 count_points(const WeightVector& w, double B, const CongruenceBox& conditions = {}, unsigned workers = 1) {
  if (w.size() != 2) {
    i64 c = 0;
    for_each_point(w, B, conditions, [&](const WpsPoint&) { ++c; });
    return c;
  }
  if (B < 1) throw std::invalid_argument("count_points: B must be >= 1");
  const std::vector<i64> X = height_box(w, B);
  const i64 M0 = conditions.empty() ? 1 : conditions.modulus(0);
  const i64 r0 = conditions.empty() ? 0 : conditions.residue(0);
  const i64 M1 = conditions.empty() ? 1 : conditions.modulus(1);
  const i64 r1 = conditions.empty() ? 0 : conditions.residue(1);
  const bool odd0 = w[0] % 2 != 0;
  const bool odd1 = w[1] % 2 != 0;
  if (!odd0 && odd1) {
    i64 c = 0;
    for_each_point(w, B, conditions, [&](const WpsPoint&) { ++c; });
    return c;
  }

  // x = 0: y ranges over w1-th-power-free values (both signs unless w1 odd).
  i64 total = 0;
  if (mod(-r0, M0) == 0) {
    const i64 pos = power_free_counts(w[1], {X[1]}, r1, M1)[0];
    const i64 neg = power_free_counts(w[1], {X[1]}, mod(-r1, M1), M1)[0];
    total += odd1 ? pos : pos + neg;
  }

  // x != 0: sieve the w0-th-power prime divisors of x once.
  std::vector<std::vector<i64>> divs(static_cast<std::size_t>(X[0]) + 1);
  for (i64 p : primes_between(2, std::max<i64>(2, static_cast<i64>(std::pow(static_cast<double>(X[0]), 1.0 / w[0])) + 2))) {
    i128 pw = 1;
    for (int j = 0; j < w[0]; ++j) pw *= p;
    if (pw > X[0]) continue;
    for (i64 x = static_cast<i64>(pw); x <= X[0]; x += static_cast<i64>(pw)) divs[static_cast<std::size_t>(x)].push_back(p);
  }
  auto fiber = [&](i64 x) -> i64 {
    const auto& ps = divs[static_cast<std::size_t>(x < 0 ? -x : x)];
    i64 count = 0;
    const std::size_t k = ps.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      i128 L = 1;
      int bits = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (!(mask >> j & 1)) continue;
        ++bits;
        for (int e = 0; e < w[1]; ++e) L *= ps[j];
      }
      const i64 c = L > X[1] ? (mod(-r1, M1) == 0 ? 1 : 0)
                             : detail::count_multiples_in_progression(-X[1], X[1], r1, M1, static_cast<i64>(L));
      count += (bits % 2 == 0) ? c : -c;
    }
    return count;
  };
  std::vector<i64> xs;
  for (i64 x = -X[0]; x <= X[0]; ++x) {
    if (x == 0 || mod(x - r0, M0) != 0) continue;
    if (odd0 && x < 0) continue;
    xs.push_back(x);
  }
  workers = std::max(1u, workers);
  std::vector<i64> partial(workers, 0);
  auto run = [&](unsigned id) {
    for (std::size_t k = id; k < xs.size(); k += workers) partial[id] += fiber(xs[k]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(run, id);
  }
  for (i64 v : partial) total += v;
  return total;
}

// ---------------------------------------------------------------------------
// Leading constant of the point count over a number field.

struct FieldInvariants {
  int degree = 1;
  int r1 = 1;
  int r2 = 0;
  i64 class_number = 1;
  double regulator = 1.0;
  i64 discriminant = 1;
  int roots_of_unity = 2;
  std::function<double(int)> zeta;

  void validate() const {
    if (degree != r1 + 2 * r2) throw std::invalid_argument("FieldInvariants: degree != r1 + 2 r2");
    if (class_number < 1) throw std::invalid_argument("FieldInvariants: class number must be >= 1");
    if (roots_of_unity < 2 || roots_of_unity % 2 != 0) throw std::invalid_argument("FieldInvariants: roots of unity count must be even");
    if (discriminant == 0) throw std::invalid_argument("FieldInvariants: zero discriminant");
    if (!zeta) throw std::invalid_argument("FieldInvariants: missing zeta evaluator");
  }

  static FieldInvariants rationals() {
    FieldInvariants k;
    k.zeta = [](int s) { return zeta_q(s).value; };
    return k;
  }

  /// Q(sqrt D), D < 0 fundamental, with its class number supplied.
  static FieldInvariants imaginary_quadratic(i64 D, i64 class_number) {
    if (D >= 0) throw std::invalid_argument("imaginary_quadratic: D must be negative");
    FieldInvariants k;
    k.degree = 2;
    k.r1 = 0;
    k.r2 = 1;
    k.class_number = class_number;
    k.regulator = 1.0;
    k.discriminant = D;
    k.roots_of_unity = D == -4 ? 4 : (D == -3 ? 6 : 2);
    k.zeta = [D](int s) { return zeta_quadratic(D, s).value; };
    return k;
  }

  /// Q(sqrt D), D > 1 fundamental, with class number and regulator supplied.
  static FieldInvariants real_quadratic(i64 D, i64 class_number, double regulator) {
    if (D <= 1) throw std::invalid_argument("real_quadratic: D must exceed 1");
    FieldInvariants k;
    k.degree = 2;
    k.r1 = 2;
    k.r2 = 0;
    k.class_number = class_number;
    k.regulator = regulator;
    k.discriminant = D;
    k.roots_of_unity = 2;
    k.zeta = [D](int s) { return zeta_quadratic(D, s).value; };
    return k;
  }
};

/// Number of roots of unity acting trivially-or-not on weighted tuples:
/// varpi_K / gcd(varpi_K, gcd_i w_i).
inline int weighted_roots_of_unity(const WeightVector& w, const FieldInvariants& k) {
  return k.roots_of_unity / std::gcd(k.roots_of_unity, w.gcd());
}

/// kappa = density * h (2^{r1+r2} pi^{r2})^{n+1} R |w|^{r1+r2-1}
///         / (varpi_{K,w} |Delta|^{(n+1)/2} zeta_K(|w|)).
inline double leading_constant(const WeightVector& w, const FieldInvariants& k, double local_density = 1.0) {
  if (!(local_density > 0)) throw std::invalid_argument("leading_constant: density must be positive");
  k.validate();
  const double n1 = static_cast<double>(w.size());
  const double arch = std::pow(2.0, k.r1 + k.r2) * std::pow(M_PI, k.r2);
  const double absDisc = std::abs(static_cast<double>(k.discriminant));
  return local_density * static_cast<double>(k.class_number) * std::pow(arch, n1) * k.regulator *
         std::pow(static_cast<double>(w.total()), k.r1 + k.r2 - 1) /
         (weighted_roots_of_unity(w, k) * std::pow(absDisc, n1 / 2) * k.zeta(w.total()));
}

}  // namespace avgrank
