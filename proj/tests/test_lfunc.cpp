#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "avgrank/lfunc.hpp"

using namespace avgrank;

TEST(TestFunction, Examples) {
  EXPECT_DOUBLE_EQ(phi(1.0 / 3, 0), 1.0 / 36);
  EXPECT_DOUBLE_EQ(phi_hat(1.0 / 3, 0), 1.0 / 12);
  EXPECT_DOUBLE_EQ(phi_hat(1.0 / 3, 1.0 / 3), 0);
  EXPECT_DOUBLE_EQ(phi_hat(1.0 / 3, -0.5), 0);
  EXPECT_DOUBLE_EQ(phi_hat(0.5, 0.25), 1.0 / 16);
  EXPECT_NEAR(phi(0.5, 1), std::pow(std::sin(std::numbers::pi / 2) / (2 * std::numbers::pi), 2), 1e-15);
  EXPECT_DOUBLE_EQ(phi(0.5, 2), phi(0.5, -2));
  EXPECT_NEAR(phi(0.5, 4), 0, 1e-30);
  EXPECT_THROW(TestFunction(0), std::invalid_argument);
}

TEST(TestFunction, NonNegative) {
  const TestFunction f(0.3);
  for (double y = -20; y <= 20; y += 0.173) EXPECT_GE(f.phi(y), 0);
  EXPECT_DOUBLE_EQ(f.phi0(), 0.0225);
  EXPECT_DOUBLE_EQ(f.phi_hat0(), 0.075);
}

TEST(RankBound, Examples) {
  EXPECT_EQ(rank_bound(1, 1.0 / 3), 3.5);
  EXPECT_EQ(rank_bound(2, 1.0 / 6), 6.5);
  EXPECT_EQ(rank_bound(1, 0.3333333), 3.5);
  EXPECT_DOUBLE_EQ(rank_bound(1, 0.5), 2.5);
  EXPECT_THROW(rank_bound(1, -1), std::invalid_argument);
}

TEST(SupportPrimes, Boundaries) {
  EXPECT_TRUE(support_primes(1, 1.0 / 3, 16).empty());
  EXPECT_EQ(support_primes(2, 1.0 / 3, 1e5), (std::vector<i64>{5}));
  EXPECT_EQ(support_primes(1, 1.0 / 3, 1e6), (std::vector<i64>{5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97}));
  for (double B : {1e5, 1e7})
    for (int k : {1, 2})
      for (i64 p : support_primes(k, 1.0 / 3, B)) {
        EXPECT_LT(k * std::log(static_cast<double>(p)), std::log(B) / 3);
        EXPECT_GT(prime_weight(TestFunction(1.0 / 3), k, p, B), 0);
      }
}

TEST(ExplicitRhs, EmptySupport) {
  const auto r = explicit_rhs(Census(16), 1.0 / 3);
  EXPECT_EQ(r.S1, 0);
  EXPECT_EQ(r.S2, 0);
  EXPECT_DOUBLE_EQ(r.rhs, 1.0 / 12);
  EXPECT_DOUBLE_EQ(r.formula_bound, 3.5);
  EXPECT_THROW(explicit_rhs(Census(15), 1.0 / 3), std::invalid_argument);
}

TEST(Uk, SingleTermSecondMoment) {
  const double B = 1e5, nu = 1.0 / 3;
  const EllipticCurveQ e{1, 1};
  const double t = 2 * std::log(5.0) / std::log(B);
  const double expected = static_cast<double>(ap_hat(e, 5, 2)) * std::log(5.0) / 25 * (nu - t) / 4;
  EXPECT_NEAR(u_k(e, 2, nu, B), expected, 1e-16);
}

TEST(InnerSum, HistogramMatchesPerCurve) {
  const Census c(10'000);
  for (i64 p : primes_between(5, 31))
    for (int k : {1, 2}) EXPECT_EQ(prime_inner_sum(c, p, k), prime_inner_sum_per_curve(c, p, k)) << p << " k=" << k;
}

TEST(Sk, MatchesPerCurveAverage) {
  const Census c(20'000);
  const double B = 20'000, nu = 0.5;
  for (int k : {1, 2}) {
    KahanSum s;
    for_each_curve(c, [&](const EllipticCurveQ& e) { s.add(u_k(e, k, nu, B)); });
    const double per_curve = 2.0 / std::log(B) * s.value() / static_cast<double>(c.size());
    EXPECT_NEAR(s_k(c, k, nu, B).value, per_curve, 1e-12) << k;
  }
}

TEST(Sk, WorkersAndValidation) {
  const Census c(100'000);
  const auto a = s_k(c, 1, 1.0 / 3, 1e5, 1), b = s_k(c, 1, 1.0 / 3, 1e5, 4);
  EXPECT_EQ(a.value, b.value);
  ASSERT_EQ(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) EXPECT_EQ(a.terms[i].inner, b.terms[i].inner);
  EXPECT_THROW(s_k(c, 3, 1.0 / 3, 1e5), std::invalid_argument);
}

TEST(Sk, SecondMomentNegative) {
  const auto r = explicit_rhs(Census(100'000), 1.0 / 3);
  EXPECT_LT(r.S2, 0);
  for (const auto& t : r.s2.terms) EXPECT_LT(t.contribution, 0) << t.p;
}

TEST(HasseTail, SingleTerm) {
  const double B = 1e7, nu = 1.0 / 3;
  // only k = 3, p = 5 survives
  const double expected = 2 / std::log(B) * 2 * std::log(5.0) / std::pow(5.0, 1.5) * nu / 4;
  EXPECT_NEAR(hasse_tail_majorant(nu, B), expected, 1e-16);
  EXPECT_EQ(hasse_tail_majorant(nu, 1e4), 0);
}
