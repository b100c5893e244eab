#pragma once

// Lattice points of Z^n inside weighted dilates B *_w R of a bounded region,
// restricted to congruence boxes, and the main/error terms those counts are
// compared against.

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "avgrank/arith.hpp"

namespace avgrank {

class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(std::initializer_list<int> w) : WeightVector(std::vector<int>(w)) {}
  explicit WeightVector(std::vector<int> w) : weights_(std::move(w)) {
    if (weights_.empty()) throw std::invalid_argument("WeightVector: no weights");
    for (int x : weights_)
      if (x < 1) throw std::invalid_argument("WeightVector: weights must be positive");
  }

  std::size_t size() const { return weights_.size(); }
  int operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<int>& weights() const { return weights_; }

  int total() const { return std::accumulate(weights_.begin(), weights_.end(), 0); }
  int min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }
  int gcd() const {
    int g = 0;
    for (int x : weights_) g = std::gcd(g, x);
    return g;
  }
  bool any_odd() const {
    return std::any_of(weights_.begin(), weights_.end(), [](int x) { return x % 2 != 0; });
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<int> weights_;
};

/// x_j = center (mod p^k).
struct Congruence {
  i64 prime;
  std::size_t coord;
  i64 center;
  int exponent;
};

class CongruenceBox {
 public:
  CongruenceBox() = default;
  explicit CongruenceBox(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  const std::vector<Congruence>& constraints() const { return constraints_; }
  bool empty() const { return constraints_.empty(); }

  CongruenceBox& add(i64 prime, std::size_t coord, i64 center, int exponent) {
    if (!is_prime(static_cast<u64>(prime))) throw std::invalid_argument("CongruenceBox: modulus base must be prime");
    if (exponent < 0) throw std::invalid_argument("CongruenceBox: negative exponent");
    if (coord >= dimension_) throw std::invalid_argument("CongruenceBox: coordinate out of range");
    for (const auto& c : constraints_)
      if (c.prime == prime && c.coord == coord)
        throw std::invalid_argument("CongruenceBox: duplicate (prime, coordinate) constraint");
    constraints_.push_back({prime, coord, center, exponent});
    return *this;
  }

  /// Product of p^-k over all constraints.
  Rational measure() const {
    Rational m(1);
    for (const auto& c : constraints_) m /= checked_pow(c.prime, static_cast<unsigned>(c.exponent));
    return m;
  }

  /// Joint modulus M_j of coordinate j (product of its prime powers).
  i64 modulus(std::size_t coord) const {
    i64 m = 1;
    for (const auto& c : constraints_)
      if (c.coord == coord) m = checked_mul(m, checked_pow(c.prime, static_cast<unsigned>(c.exponent)));
    return m;
  }

  /// Residue r_j in [0, M_j) combining the coordinate's constraints by CRT.
  i64 residue(std::size_t coord) const {
    i64 m = 1, r = 0;
    for (const auto& c : constraints_) {
      if (c.coord != coord) continue;
      const i64 pk = checked_pow(c.prime, static_cast<unsigned>(c.exponent));
      const i64 a = mod(c.center, pk);
      // Solve r + m*t = a (mod pk).
      i64 t = 0;
      const i64 mi = mod(m, pk);
      while (mod(r + static_cast<i64>(static_cast<i128>(mi) * t % pk), pk) != a) ++t;
      r = narrow(static_cast<i128>(r) + static_cast<i128>(m) * t);
      m = checked_mul(m, pk);
      r = mod(r, m);
    }
    return r;
  }

  /// max_j prod_p p^{k(p,j)}
  i64 max_coordinate_modulus() const {
    i64 best = 1;
    for (std::size_t j = 0; j < dimension_; ++j) best = std::max(best, modulus(j));
    return best;
  }

  bool contains(std::span<const i64> x) const {
    for (const auto& c : constraints_) {
      const i64 pk = checked_pow(c.prime, static_cast<unsigned>(c.exponent));
      if (mod(x[c.coord] - c.center, pk) != 0) return false;
    }
    return true;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<Congruence> constraints_;
};

/// A bounded region of R^n given by a membership predicate and a bounding
/// box [-radius_i, radius_i]. When `fiber` is set, the section over a fixed
/// prefix (x_0..x_{n-2}) is the closed interval it returns (lo > hi: empty).
struct Region {
  std::size_t dimension = 0;
  std::function<bool(std::span<const double>)> contains;
  std::vector<double> radius;
  std::optional<double> volume;
  std::function<std::pair<double, double>(std::span<const double>)> fiber;

  static Region box(std::vector<double> radii) {
    Region r;
    r.dimension = radii.size();
    r.radius = radii;
    double vol = 1;
    for (double x : radii) vol *= 2 * x;
    r.volume = vol;
    r.contains = [radii](std::span<const double> x) {
      for (std::size_t i = 0; i < radii.size(); ++i)
        if (std::abs(x[i]) > radii[i]) return false;
      return true;
    };
    r.fiber = [radii](std::span<const double> prefix) -> std::pair<double, double> {
      for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::abs(prefix[i]) > radii[i]) return {1, -1};
      return {-radii.back(), radii.back()};
    };
    return r;
  }

  /// sum (x_i / r_i)^2 <= 1
  static Region ellipsoid(std::vector<double> radii) {
    Region r;
    r.dimension = radii.size();
    r.radius = radii;
    if (radii.size() == 2) r.volume = M_PI * radii[0] * radii[1];
    if (radii.size() == 3) r.volume = 4.0 / 3.0 * M_PI * radii[0] * radii[1] * radii[2];
    r.contains = [radii](std::span<const double> x) {
      double s = 0;
      for (std::size_t i = 0; i < radii.size(); ++i) s += (x[i] / radii[i]) * (x[i] / radii[i]);
      return s <= 1.0;
    };
    r.fiber = [radii](std::span<const double> prefix) -> std::pair<double, double> {
      double s = 0;
      for (std::size_t i = 0; i < prefix.size(); ++i) s += (prefix[i] / radii[i]) * (prefix[i] / radii[i]);
      if (s > 1.0) return {1, -1};
      const double h = radii.back() * std::sqrt(1.0 - s);
      return {-h, h};
    };
    return r;
  }

  /// sum |x_i| / r_i <= 1
  static Region cross_polytope(std::vector<double> radii) {
    Region r;
    r.dimension = radii.size();
    r.radius = radii;
    double vol = 1;
    for (std::size_t i = 0; i < radii.size(); ++i) vol *= 2 * radii[i] / static_cast<double>(i + 1);
    r.volume = vol;
    r.contains = [radii](std::span<const double> x) {
      double s = 0;
      for (std::size_t i = 0; i < radii.size(); ++i) s += std::abs(x[i]) / radii[i];
      return s <= 1.0;
    };
    r.fiber = [radii](std::span<const double> prefix) -> std::pair<double, double> {
      double s = 0;
      for (std::size_t i = 0; i < prefix.size(); ++i) s += std::abs(prefix[i]) / radii[i];
      if (s > 1.0) return {1, -1};
      const double h = radii.back() * (1.0 - s);
      return {-h, h};
    };
    return r;
  }
};

inline std::vector<double> weighted_dilate(double B, const WeightVector& w, std::span<const double> x) {
  if (x.size() != w.size()) throw std::invalid_argument("weighted_dilate: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(B, w[i]) * x[i];
  return out;
}

/// floor(r * B^w), tolerant to rounding when the product is an exact integer.
inline i64 dilated_bound(double r, double B, int w) {
  const long double t = static_cast<long double>(r) * std::pow(static_cast<long double>(B), w);
  if (t >= 4.0e18L) throw std::overflow_error("dilated bounding box exceeds 63-bit coordinates");
  return static_cast<i64>(std::floor(t * (1 + 1e-14L)));
}

namespace detail {

// Number of y = r (mod M) with lo <= y <= hi.
inline i64 count_progression(i64 lo, i64 hi, i64 r, i64 M) {
  if (lo > hi) return 0;
  const i64 first = lo + mod(r - lo, M);
  if (first > hi) return 0;
  return (hi - first) / M + 1;
}

// Enumerate the points of the arithmetic progression r (mod M) in [-X, X].
inline std::vector<i64> progression(i64 X, i64 r, i64 M) {
  std::vector<i64> out;
  for (i64 x = -X + mod(r + X, M); x <= X; x += M) out.push_back(x);
  return out;
}

}  // namespace detail

/// Exact number of x in Z^n with B^{-1} *_w x in the region and x in the box.
/// The outer coordinates walk their congruence progressions; with a fiber
/// the last coordinate is counted per interval, otherwise by membership.
inline i64 count_in_dilate(const WeightVector& w, double B, const Region& region, const CongruenceBox& box,
                           unsigned workers = 1) {
  const std::size_t n = w.size();
  if (region.dimension != n || region.radius.size() != n) throw std::invalid_argument("count_in_dilate: dimension mismatch");
  if (!box.empty() && box.dimension() != n) throw std::invalid_argument("count_in_dilate: box dimension mismatch");
  if (!(B > 0)) throw std::invalid_argument("count_in_dilate: B must be positive");

  std::vector<i64> X(n), M(n), R(n);
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = dilated_bound(region.radius[i], B, w[i]);
    M[i] = box.empty() ? 1 : box.modulus(i);
    R[i] = box.empty() ? 0 : box.residue(i);
    scale[i] = std::pow(B, w[i]);
  }
  const std::vector<i64> outer = detail::progression(X[0], R[0], M[0]);
  const std::size_t last = n - 1;

  auto count_prefix = [&](std::vector<i64>& x, std::vector<double>& t) -> i64 {
    if (n == 1) {
      t[0] = static_cast<double>(x[0]) / scale[0];
      return region.contains(t) ? 1 : 0;
    }
    if (region.fiber) {
      for (std::size_t i = 0; i < last; ++i) t[i] = static_cast<double>(x[i]) / scale[i];
      const auto [flo, fhi] = region.fiber(std::span<const double>(t.data(), last));
      if (flo > fhi) return 0;
      auto inside = [&](i64 y) {
        t[last] = static_cast<double>(y) / scale[last];
        return region.contains(t);
      };
      const long double lo_s = static_cast<long double>(flo) * scale[last];
      const long double hi_s = static_cast<long double>(fhi) * scale[last];
      i64 lo = std::max<i64>(-X[last], static_cast<i64>(std::ceil(lo_s)));
      i64 hi = std::min<i64>(X[last], static_cast<i64>(std::floor(hi_s)));
      lo = lo + mod(R[last] - lo, M[last]);
      hi = hi - mod(hi - R[last], M[last]);
      // Settle boundary points against the predicate itself.
      while (lo - M[last] >= -X[last] && inside(lo - M[last])) lo -= M[last];
      while (lo <= hi && !inside(lo)) lo += M[last];
      while (hi + M[last] <= X[last] && inside(hi + M[last])) hi += M[last];
      while (hi >= lo && !inside(hi)) hi -= M[last];
      return lo > hi ? 0 : (hi - lo) / M[last] + 1;
    }
    for (std::size_t i = 0; i < last; ++i) t[i] = static_cast<double>(x[i]) / scale[i];
    i64 c = 0;
    for (i64 y = -X[last] + mod(R[last] + X[last], M[last]); y <= X[last]; y += M[last]) {
      t[last] = static_cast<double>(y) / scale[last];
      if (region.contains(t)) ++c;
    }
    return c;
  };

  // Walks all middle coordinates (1..n-2) for a fixed first coordinate.
  auto count_outer = [&](i64 x0) -> i64 {
    std::vector<i64> x(n, 0);
    std::vector<double> t(n, 0.0);
    x[0] = x0;
    if (n <= 2) return count_prefix(x, t);
    i64 total = 0;
    std::vector<std::vector<i64>> prog(n);
    for (std::size_t i = 1; i < last; ++i) prog[i] = detail::progression(X[i], R[i], M[i]);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t i = 1; i < last; ++i) {
      if (prog[i].empty()) return 0;
      x[i] = prog[i][0];
    }
    while (true) {
      total += count_prefix(x, t);
      std::size_t i = last - 1;
      while (i >= 1) {
        if (++idx[i] < prog[i].size()) {
          x[i] = prog[i][idx[i]];
          break;
        }
        idx[i] = 0;
        x[i] = prog[i][0];
        --i;
      }
      if (i == 0) break;
    }
    return total;
  };

  workers = std::max(1u, workers);
  std::atomic<std::size_t> next{0};
  std::vector<i64> partial(workers, 0);
  auto run = [&](unsigned id) {
    for (std::size_t k = next++; k < outer.size(); k = next++) partial[id] += count_outer(outer[k]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(run, id);
  }
  i64 total = 0;
  for (i64 v : partial) total += v;
  return total;
}

struct PredictedCount {
  double main = 0;
  double error_scale = 0;
};

/// main = vol * measure * B^|w|,
/// error_scale = max_j(prod_p p^{k(p,j)}) * measure * B^{|w| - w_min}.
inline PredictedCount predicted_count(const WeightVector& w, double B, double volume, const CongruenceBox& box) {
  if (volume < 0) throw std::invalid_argument("predicted_count: negative volume");
  const Rational mu = box.measure();
  const double m = static_cast<double>(mu.numerator()) / static_cast<double>(mu.denominator());
  PredictedCount out;
  out.main = volume * m * std::pow(B, w.total());
  out.error_scale = static_cast<double>(box.max_coordinate_modulus()) * m * std::pow(B, w.total() - w.min_weight());
  return out;
}

}  // namespace avgrank
