#pragma once

// Explicit-formula prime sums over the census with the Fejer-type test
// function phi_nu, and the resulting average-rank bound.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/census.hpp"
#include "avgrank/ec.hpp"

namespace avgrank {

class TestFunction {
 public:
  explicit TestFunction(double nu) : nu_(nu) {
    if (!(nu > 0)) throw std::invalid_argument("TestFunction: nu must be positive");
  }

  double nu() const { return nu_; }

  /// (sin(pi nu y) / (2 pi y))^2
  double phi(double y) const {
    if (std::abs(y) < 1e-12) return nu_ * nu_ / 4;
    const double s = std::sin(std::numbers::pi * nu_ * y) / (2 * std::numbers::pi * y);
    return s * s;
  }

  /// (nu - |t|) / 4 on |t| <= nu
  double phi_hat(double t) const {
    const double a = std::abs(t);
    return a >= nu_ ? 0.0 : (nu_ - a) / 4;
  }

  double phi0() const { return nu_ * nu_ / 4; }
  double phi_hat0() const { return nu_ / 4; }
  double phi_hat_sup() const { return nu_ / 4; }

 private:
  double nu_;
};

inline double phi(double nu, double y) { return TestFunction(nu).phi(y); }
inline double phi_hat(double nu, double t) { return TestFunction(nu).phi_hat(t); }

/// 1/nu + 1/2; at nu = 1/(3d) this is 3d + 1/2, returned exactly when nu is
/// that value up to parsing noise.
inline double rank_bound(int d, double nu) {
  if (!(nu > 0)) throw std::invalid_argument("rank_bound: nu must be positive");
  if (d >= 1 && std::abs(nu * 3 * d - 1) < 1e-6) return 3.0 * d + 0.5;
  return 1.0 / nu + 0.5;
}

/// Primes p >= 5 with k log p < nu log B (phi-hat vanishes from there on).
inline std::vector<i64> support_primes(int k, double nu, double B) {
  if (k < 1) throw std::invalid_argument("support_primes: k must be positive");
  std::vector<i64> out;
  const double limit = nu * std::log(B);
  const i64 top = static_cast<i64>(std::floor(std::exp(limit / k))) + 1;
  for (i64 p : primes_between(5, top))
    if (k * std::log(static_cast<double>(p)) < limit) out.push_back(p);
  return out;
}

inline double prime_weight(const TestFunction& f, int k, i64 p, double B) {
  const double lp = std::log(static_cast<double>(p));
  return lp / std::pow(static_cast<double>(p), k) * f.phi_hat(k * lp / std::log(B));
}

/// U_k(E) = sum_p a-hat(p^k) log p / p^k phi-hat(k log p / log B)
inline double u_k(const EllipticCurveQ& E, int k, double nu, double B) {
  const TestFunction f(nu);
  KahanSum s;
  for (i64 p : support_primes(k, nu, B)) s.add(static_cast<double>(ap_hat(E, p, k)) * prime_weight(f, k, p, B));
  return s.value();
}

struct PrimeTerm {
  i64 p = 0;
  i64 inner = 0;        // sum over the census of a-hat(p^k), exact
  double weight = 0;    // log p / p^k * phi-hat
  double contribution = 0;  // 2 / (log B * #census) * weight * inner
};

struct SkResult {
  int k = 0;
  double value = 0;
  i64 census_size = 0;
  std::vector<PrimeTerm> terms;
};

/// sum over the census of a-hat(p^k), from the mod-p histogram.
template <class Source>
i64 prime_inner_sum(const Source& src, i64 p, int k) {
  const auto cells = cell_table(p);
  const auto hist = residue_histogram(src, p);
  i64 s = 0;
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (hist[c] != 0) s = checked_add(s, checked_mul(hist[c], ap_hat(cells[c].kind, cells[c].trace, p, k)));
  return s;
}

/// Same sum, one curve at a time.
template <class Source>
i64 prime_inner_sum_per_curve(const Source& src, i64 p, int k) {
  i64 s = 0;
  for_each_curve(src, [&](const EllipticCurveQ& E) { s = checked_add(s, ap_hat(E, p, k)); });
  return s;
}

template <class Source>
SkResult s_k(const Source& src, int k, double nu, double B, unsigned workers = 1) {
  if (k != 1 && k != 2) throw std::invalid_argument("s_k: k must be 1 or 2");
  const TestFunction f(nu);
  SkResult out;
  out.k = k;
  out.census_size = src.size();
  if (out.census_size == 0) return out;
  const auto primes = support_primes(k, nu, B);
  out.terms.resize(primes.size());
  detail::strided_parallel(primes.size(), workers, [&](unsigned, std::size_t i) {
    out.terms[i].p = primes[i];
    out.terms[i].inner = prime_inner_sum(src, primes[i], k);
  });
  const double scale = 2.0 / (std::log(B) * static_cast<double>(out.census_size));
  KahanSum s;
  for (auto& t : out.terms) {
    t.weight = prime_weight(f, k, t.p, B);
    t.contribution = scale * t.weight * static_cast<double>(t.inner);
    s.add(t.contribution);
  }
  out.value = s.value();
  return out;
}

/// (2 / log B) sum_{k >= 3} sum_{p^k < B^nu} 2 log p / p^{k/2} sup|phi-hat|:
/// a bound for the prime-power terms left out of S_1 + S_2.
inline double hasse_tail_majorant(double nu, double B) {
  const TestFunction f(nu);
  KahanSum s;
  for (int k = 3;; ++k) {
    const auto primes = support_primes(k, nu, B);
    if (primes.empty()) break;
    for (i64 p : primes) s.add(2 * std::log(static_cast<double>(p)) / std::pow(static_cast<double>(p), k / 2.0));
  }
  return 2.0 / std::log(B) * s.value() * f.phi_hat_sup();
}

struct RankBoundReport {
  i64 B = 0;
  double nu = 0;
  int degree = 1;
  i64 census_size = 0;
  double S1 = 0, S2 = 0;
  double phi0 = 0, phi_hat0 = 0;
  double rhs = 0;          // phi-hat(0) - S1 - S2
  double bound = 0;        // rhs / phi(0)
  double target = 0;       // phi(0) / 2, the limit of -S1 - S2
  double gap = 0;          // |-S1 - S2 - phi(0)/2|
  double formula_bound = 0;
  double hasse_tail = 0;
  bool dropped_gamma_and_conductor_terms = true;
  bool dropped_prime_powers_k_ge_3 = true;
  bool excluded_primes_2_3 = true;
  SkResult s1, s2;
};

template <class Source>
RankBoundReport explicit_rhs(const Source& src, double nu, int degree = 1, unsigned workers = 1) {
  const TestFunction f(nu);
  RankBoundReport r;
  r.B = src.height_bound();
  if (r.B < 16) throw std::invalid_argument("explicit_rhs: height must be >= 16");
  const double B = static_cast<double>(r.B);
  r.nu = nu;
  r.degree = degree;
  r.census_size = src.size();
  r.s1 = s_k(src, 1, nu, B, workers);
  r.s2 = s_k(src, 2, nu, B, workers);
  r.S1 = r.s1.value;
  r.S2 = r.s2.value;
  r.phi0 = f.phi0();
  r.phi_hat0 = f.phi_hat0();
  r.rhs = r.phi_hat0 - r.S1 - r.S2;
  r.bound = r.rhs / r.phi0;
  r.target = r.phi0 / 2;
  r.gap = std::abs(-r.S1 - r.S2 - r.target);
  r.formula_bound = rank_bound(degree, nu);
  r.hasse_tail = hasse_tail_majorant(nu, B);
  return r;
}

}  // namespace avgrank
