#pragma once

// Acceptance checks shared by the acceptance binary and `avgrank verify`.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "avgrank/arith.hpp"
#include "avgrank/census.hpp"
#include "avgrank/ec.hpp"
#include "avgrank/hurwitz.hpp"
#include "avgrank/io.hpp"
#include "avgrank/lattice.hpp"
#include "avgrank/lfunc.hpp"
#include "avgrank/wps.hpp"

namespace avgrank {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

// ---------------------------------------------------------------------------
// Helpers that the checks are built from.

/// Census size summed over shards by the given number of workers.
inline i64 census_count(const Census& c, unsigned workers) {
  std::vector<i64> part(workers, 0);
  detail::strided_parallel(c.shards().size(), workers, [&](unsigned id, std::size_t i) { part[id] += c.shards()[i].size(); });
  i64 n = 0;
  for (i64 v : part) n += v;
  return n;
}

struct FourierCheck {
  double truncated = 0;  // 2 * int_0^L phi(y) cos(2 pi t y) dy
  double tail = 0;       // 2 * int_L^inf, in closed form
  double total = 0;
};

namespace detail {

/// pi/2 - Si(x) = f(x) cos x + g(x) sin x, asymptotic series for x >= 40.
inline double si_complement(double x) {
  if (x < 40) throw std::domain_error("si_complement: argument too small for the asymptotic series");
  double f = 0, g = 0, term_f = 1 / x, term_g = 1 / (x * x);
  for (int k = 0; k < 30; ++k) {
    f += term_f;
    g += term_g;
    const double nf = -term_f * (2 * k + 1) * (2 * k + 2) / (x * x);
    const double ng = -term_g * (2 * k + 2) * (2 * k + 3) / (x * x);
    if (std::abs(nf) > std::abs(term_f)) break;
    term_f = nf;
    term_g = ng;
  }
  return f * std::cos(x) + g * std::sin(x);
}

/// int_L^inf cos(a y) / y^2 dy
inline double cos_over_square_tail(double a, double L) {
  a = std::abs(a);
  if (a == 0) return 1 / L;
  return std::cos(a * L) / L - a * si_complement(a * L);
}

}  // namespace detail

inline FourierCheck fourier_transform_numeric(double nu, double t, double L = 1000) {
  const TestFunction f(nu);
  using boost::math::quadrature::gauss;
  FourierCheck out;
  KahanSum s;
  const double w = 2 * std::numbers::pi * t;
  for (double a = 0; a < L; a += 1)
    s.add(gauss<double, 20>::integrate([&](double y) { return f.phi(y) * std::cos(w * y); }, a, std::min(a + 1, L)));
  out.truncated = 2 * s.value();
  const double pi2 = 2 * std::numbers::pi;
  out.tail = 2 *
             (detail::cos_over_square_tail(pi2 * t, L) - 0.5 * detail::cos_over_square_tail(pi2 * (nu + t), L) -
              0.5 * detail::cos_over_square_tail(pi2 * (nu - t), L)) /
             (8 * std::numbers::pi * std::numbers::pi);
  out.total = out.truncated + out.tail;
  return out;
}

struct BoxLemmaCase {
  WeightVector w{std::vector<int>{1, 1}};
  Region region;
  CongruenceBox box;
  std::string label;
};

/// Seeded random (region, box) pairs; weights cycle through (1,1), (1,2), (4,6).
inline std::vector<BoxLemmaCase> box_lemma_cases(int count, std::uint64_t seed = 0x5eedb0c5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 1.5);
  const std::vector<std::vector<int>> weights = {{1, 1}, {1, 2}, {4, 6}};
  const std::vector<i64> primes = {2, 3, 5, 7};
  std::vector<BoxLemmaCase> out;
  for (int i = 0; i < count; ++i) {
    BoxLemmaCase c;
    c.w = WeightVector(weights[static_cast<std::size_t>(i) % 3]);
    const std::vector<double> radii = {radius(rng), radius(rng)};
    const auto shape = rng() % 3;
    c.region = shape == 0 ? Region::box(radii) : shape == 1 ? Region::ellipsoid(radii) : Region::cross_polytope(radii);
    c.box = CongruenceBox(2);
    const auto n = rng() % 3;
    std::ostringstream label;
    label << "w=(" << c.w[0] << "," << c.w[1] << ") " << (shape == 0 ? "box" : shape == 1 ? "ellipse" : "diamond");
    for (std::size_t k = 0; k < n; ++k) {
      const i64 p = primes[rng() % primes.size()];
      const std::size_t j = rng() % 2;
      const int e = 1 + static_cast<int>(rng() % 2);
      const i64 center = static_cast<i64>(rng() % static_cast<u64>(checked_pow(p, static_cast<unsigned>(e))));
      try {
        c.box.add(p, j, center, e);
        label << " x" << j << "=" << center << "(" << p << "^" << e << ")";
      } catch (const std::invalid_argument&) {
      }
    }
    c.label = label.str();
    out.push_back(std::move(c));
  }
  return out;
}

/// Heights 2, 4, ..., 2^10 (2^5 for (4,6)), keeping B^{w_min} >= the
/// largest coordinate modulus.
inline std::vector<double> box_lemma_heights(const BoxLemmaCase& c) {
  std::vector<double> out;
  const int top = c.w.total() > 3 ? 5 : 10;
  for (int j = 1; j <= top; ++j) {
    const double B = std::ldexp(1.0, j);
    if (std::pow(B, c.w.min_weight()) >= static_cast<double>(c.box.max_coordinate_modulus())) out.push_back(B);
  }
  return out;
}

inline double box_lemma_ratio(const BoxLemmaCase& c, double B, unsigned workers = 1) {
  const i64 n = count_in_dilate(c.w, B, c.region, c.box, workers);
  const auto pred = predicted_count(c.w, B, *c.region.volume, c.box);
  return std::abs(static_cast<double>(n) - pred.main) / pred.error_scale;
}

inline constexpr double kBoxLemmaConstant = 10.0;

/// Primitive tuples (no sign identification) with |x_i| <= X_i.
inline i64 primitive_tuples(const PrimitiveCounter& pc, const WeightVector& w, i64 X, i64 Y) {
  return pc.count_nonzero_x(X, Y) + 2 * power_free_count(w[1], Y);
}

inline std::vector<LocalCondition> kodaira_rows_mod_p8() {
  std::vector<LocalCondition> rows;
  for (int m = 1; m <= 7; ++m) rows.push_back(LocalCondition::I(m));
  for (const char* s : {"II", "III", "IV", "I0*"}) rows.push_back(LocalCondition::parse(s));
  for (int m = 1; m <= 4; ++m) rows.push_back(LocalCondition::I_star(m));
  for (const char* s : {"IV*", "III*", "II*"}) rows.push_back(LocalCondition::parse(s));
  return rows;
}

inline std::vector<LocalCondition> empirical_rows() {
  std::vector<LocalCondition> rows;
  for (const char* s : {"good", "multiplicative", "split", "nonsplit", "additive", "I1", "I2", "II", "III", "IV"})
    rows.push_back(LocalCondition::parse(s));
  return rows;
}

// ---------------------------------------------------------------------------
// The criteria.

inline CriterionResult criterion_census_constant(const AcceptanceOptions& o) {
  constexpr i64 B = 100'000'000;
  const Census c(B);
  const i64 n = census_count(c, o.workers);
  const double ratio = static_cast<double>(n) / std::pow(static_cast<double>(B), 5.0 / 6.0);
  const double k = census_constant();
  const double rel = std::abs(ratio / k - 1);
  std::ostringstream d;
  d << "B=1e8 curves=" << n << " ratio=" << ratio << " 4/zeta(10)=" << k << " rel=" << rel;
  return {1, "census constant", rel <= 0.01, d.str()};
}

inline CriterionResult criterion_schanuel(const AcceptanceOptions& o) {
  const i64 n = count_points(WeightVector({1, 1}), 1000, {}, o.workers);
  const double pred = leading_constant(WeightVector({1, 1}), FieldInvariants::rationals()) * 1e6;
  const double rel = std::abs(static_cast<double>(n) / pred - 1);
  std::ostringstream d;
  d << "count=" << n << " predicted=" << pred << " rel=" << rel;
  return {2, "schanuel count P^1(Q) at height 1000", rel <= 0.005, d.str()};
}

inline CriterionResult criterion_exact_densities(const AcceptanceOptions&) {
  bool pass = true;
  std::ostringstream d;
  int checked = 0;
  for (i64 p : {5, 7}) {
    const auto counts = residue_kodaira_counts(p, 8);
    for (const auto& row : kodaira_rows_mod_p8()) {
      const Rational got = residue_density(row, counts), want = local_density(row, p);
      ++checked;
      if (got != want) {
        pass = false;
        d << "p=" << p << " " << row.name() << " got " << to_string(got) << " want " << to_string(want) << "; ";
      }
    }
    if (Rational(counts.nonminimal, counts.total) != Rational(1, checked_pow(p, 10))) {
      pass = false;
      d << "p=" << p << " non-minimal mass " << counts.nonminimal << "/" << counts.total << "; ";
    }
  }
  d << checked << " (p, row) pairs compared exactly mod p^8";
  return {3, "exact Kodaira densities mod p^8", pass, d.str()};
}

inline CriterionResult criterion_empirical_densities(const AcceptanceOptions& o) {
  constexpr i64 B = 100'000'000;
  const Census c(B);
  bool pass = true;
  std::ostringstream fails;
  double worst = 0;
  std::string worst_name;
  for (i64 p : {5, 7, 11, 13}) {
    const auto st = local_statistics(c, p, o.workers);
    for (const auto& row : empirical_rows()) {
      const auto cc = count_with_condition(st, row, B);
      const double rel = cc.empirical / cc.expected - 1;
      if (std::abs(rel) > std::abs(worst)) {
        worst = rel;
        worst_name = "p=" + std::to_string(p) + " " + row.name();
      }
      if (std::abs(rel) > 0.05) {
        pass = false;
        fails << " p=" << p << " " << row.name() << " empirical=" << cc.empirical << " expected=" << cc.expected
              << " rel=" << rel << ";";
      }
    }
  }
  std::ostringstream d;
  d << "B=1e8 worst " << worst_name << " rel=" << worst;
  if (!pass) d << " | outside 5%:" << fails.str();
  return {4, "empirical local densities at B=1e8", pass, d.str()};
}

inline CriterionResult criterion_deuring(const AcceptanceOptions&) {
  bool pass = true;
  std::ostringstream d;
  int pairs = 0;
  for (i64 q : primes_between(5, 97)) {
    const auto dist = deuring_distribution(q);
    const i64 m = hasse_bound(q);
    for (i64 a = -m; a <= m; ++a) {
      const auto it = dist.find(a);
      const i64 brute = it == dist.end() ? 0 : it->second;
      ++pairs;
      if (Rational(brute) != Rational(q - 1) * hurwitz_H(a * a - 4 * q)) {
        pass = false;
        d << "q=" << q << " a=" << a << " brute=" << brute << "; ";
      }
    }
  }
  d << pairs << " (q, a) pairs exact";
  return {5, "Deuring count (q-1) H(a^2-4q)", pass, d.str()};
}

inline CriterionResult criterion_class_number_sums(const AcceptanceOptions&) {
  bool pass = true;
  std::ostringstream d;
  // S1 over prime powers <= 200 with p >= 5
  for (i64 q = 5; q <= 200; ++q) {
    const auto f = factor(q);
    if (f.factors.size() != 1 || f.factors[0].prime < 5) continue;
    if (class_number_sums(q).S1 != Rational(0)) {
      pass = false;
      d << "S1(" << q << ")!=0; ";
    }
  }
  double worst_band = 0;
  for (i64 q : primes_between(5, 169)) {
    for (i64 Q : {q, q * q}) {
      if (Q > 169) continue;
      const auto s = class_number_sums(Q);
      const i64 p = q;
      const int n = Q == q ? 1 : 2;
      const double band = std::abs(boost::rational_cast<double>(s.S2) - static_cast<double>(Q) * Q) /
                          std::pow(static_cast<double>(p), 2 * n - 1);
      worst_band = std::max(worst_band, band);
      if (band > 2) {
        pass = false;
        d << "S2(" << Q << ") band " << band << "; ";
      }
    }
  }
  for (i64 q : primes_between(5, 97)) {
    const auto s = class_number_sums(q);
    if (s.S0 != Rational(q)) {
      pass = false;
      d << "S0(" << q << ")=" << to_string(s.S0) << "; ";
    }
    i64 moment = 0;
    for (const auto& [a, n] : deuring_distribution(q)) moment += a * a * n;
    if (s.S2 != Rational(moment, q - 1)) {
      pass = false;
      d << "S2(" << q << ") != Deuring moment; ";
    }
  }
  d << "max |S2-q^2|/p^(2n-1)=" << worst_band;
  return {6, "class-number sums S0, S1, S2", pass, d.str()};
}

inline CriterionResult criterion_moebius(const AcceptanceOptions&) {
  bool pass = true;
  std::ostringstream d;
  int checks = 0;
  for (const auto& wv : std::vector<std::vector<int>>{{1, 1}, {1, 2}, {4, 6}}) {
    const WeightVector w(wv);
    const PrimitiveCounter pc(w, checked_pow(30, static_cast<unsigned>(w[0])));
    for (i64 T = 1; T <= 30; ++T) {
      const i64 X = checked_pow(T, static_cast<unsigned>(w[0])), Y = checked_pow(T, static_cast<unsigned>(w[1]));
      const i64 nonzero = (2 * X + 1) * (2 * Y + 1) - 1;
      i64 sum = 0;
      for (i64 m = 1; m <= T; ++m) {
        const i64 Xm = X / checked_pow(m, static_cast<unsigned>(w[0]));
        const i64 Ym = Y / checked_pow(m, static_cast<unsigned>(w[1]));
        sum += primitive_tuples(pc, w, Xm, Ym);
      }
      ++checks;
      if (sum != nonzero) {
        pass = false;
        d << "w=(" << w[0] << "," << w[1] << ") T=" << T << " " << nonzero << "!=" << sum << "; ";
      }
    }
  }
  d << checks << " (w, T) identities";
  return {7, "Moebius primitivity decomposition", pass, d.str()};
}

inline CriterionResult criterion_box_lemma(const AcceptanceOptions& o) {
  double worst = 0;
  std::string worst_case;
  int evaluations = 0;
  for (const auto& c : box_lemma_cases(50)) {
    for (double B : box_lemma_heights(c)) {
      const double r = box_lemma_ratio(c, B, o.workers);
      ++evaluations;
      if (r > worst) {
        worst = r;
        worst_case = c.label + " B=" + std::to_string(static_cast<i64>(B));
      }
    }
  }
  std::ostringstream d;
  d << evaluations << " evaluations over 50 pairs, max |count-main|/error_scale=" << worst << " at " << worst_case
    << " (C=" << kBoxLemmaConstant << ")";
  return {8, "Box Lemma error ratio bounded", worst <= kBoxLemmaConstant, d.str()};
}

inline CriterionResult criterion_fourier(const AcceptanceOptions&) {
  double worst = 0, worst_truncated = 0;
  for (double nu : {1.0 / 6, 1.0 / 3}) {
    for (double t : {0.0, nu / 4, nu / 2, 0.9 * nu}) {
      const auto f = fourier_transform_numeric(nu, t);
      const double want = phi_hat(nu, t);
      worst = std::max(worst, std::abs(f.total - want));
      worst_truncated = std::max(worst_truncated, std::abs(f.truncated - want));
    }
  }
  std::ostringstream d;
  d << "max error=" << worst << " (|y|<=1000 quadrature alone: " << worst_truncated << ")";
  return {9, "Fourier pair phi / phi-hat", worst <= 1e-6, d.str()};
}

inline std::vector<RankBoundReport> rank_reports(unsigned workers) {
  std::vector<RankBoundReport> out;
  for (i64 B : {100'000LL, 1'000'000LL, 10'000'000LL}) out.push_back(explicit_rhs(Census(B), 1.0 / 3, 1, workers));
  return out;
}

inline CriterionResult criterion_rank_pipeline(const AcceptanceOptions& o) {
  bool pass = true;
  std::ostringstream d;
  const auto reports = rank_reports(o.workers);
  double prev_gap = INFINITY;
  for (const auto& r : reports) {
    d << "B=" << r.B << " S1=" << r.S1 << " S2=" << r.S2 << " gap=" << r.gap << "; ";
    if (!(r.S2 < 0)) pass = false;
    for (const auto& t : r.s2.terms)
      if (!(t.contribution < 0)) {
        pass = false;
        d << "non-negative S2 term at p=" << t.p << "; ";
      }
    if (r.gap > prev_gap) {
      pass = false;
      d << "gap increased; ";
    }
    prev_gap = r.gap;
  }
  const double b1 = rank_bound(1, 1.0 / 3), b2 = rank_bound(2, 1.0 / 6);
  if (b1 != 3.5 || b2 != 6.5) pass = false;
  d << "formula bounds " << b1 << ", " << b2;
  return {10, "average-rank pipeline properties", pass, d.str()};
}

inline CriterionResult criterion_determinism(const AcceptanceOptions&) {
  bool pass = true;
  std::ostringstream d;
  const Census c(100'000'000);
  const i64 n1 = census_count(c, 1), n8 = census_count(c, 8);
  if (n1 != n8) pass = false;
  d << "census " << n1 << " vs " << n8;
  const auto r1 = rank_reports(1), r8 = rank_reports(8);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (to_json(r1[i]).dump() != to_json(r8[i]).dump()) {
      pass = false;
      d << "; report at B=" << r1[i].B << " differs";
    }
  }
  d << "; rank reports " << (pass ? "identical" : "differ");
  return {11, "determinism across worker counts", pass, d.str()};
}

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult(const AcceptanceOptions&)> run;
};

inline const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {1, "census constant", criterion_census_constant},
      {2, "schanuel", criterion_schanuel},
      {3, "exact densities", criterion_exact_densities},
      {4, "empirical densities", criterion_empirical_densities},
      {5, "deuring", criterion_deuring},
      {6, "class-number sums", criterion_class_number_sums},
      {7, "moebius", criterion_moebius},
      {8, "box lemma", criterion_box_lemma},
      {9, "fourier pair", criterion_fourier},
      {10, "rank pipeline", criterion_rank_pipeline},
      {11, "determinism", criterion_determinism},
  };
  return all;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail;
  return os.str();
}

}  // namespace avgrank
