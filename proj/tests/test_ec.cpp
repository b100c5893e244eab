#include <gtest/gtest.h>

#include <map>

#include "avgrank/ec.hpp"

using namespace avgrank;

namespace {

i64 height_limit_b(i64 B) { return isqrt(B); }

}  // namespace

TEST(Curve, DiscriminantAndHeight) {
  const EllipticCurveQ e{-1, 0};
  EXPECT_EQ(e.disc(), 64);
  EXPECT_EQ(e.height(), 1);
  EXPECT_EQ((EllipticCurveQ{2, 5}).height(), 25);
  EXPECT_EQ((EllipticCurveQ{-3, 1}).height(), 27);
}

TEST(Curve, Minimality) {
  EXPECT_TRUE(is_minimal(1, 1));
  EXPECT_FALSE(is_minimal(16, 64));
  EXPECT_TRUE(is_minimal(16, 32));
  EXPECT_FALSE(is_minimal(0, 64));
  EXPECT_FALSE(is_minimal(81, 0));
  EXPECT_THROW(make_curve(-3, 2), std::invalid_argument);
  EXPECT_THROW(make_curve(0, 0), std::invalid_argument);
  EXPECT_THROW(make_curve(16, 64), std::invalid_argument);
}

TEST(Kodaira, Examples) {
  EXPECT_EQ(to_string(kodaira_type(make_curve(1, 1), 5)), "good");
  EXPECT_EQ(to_string(kodaira_type(make_curve(0, 5), 5)), "II");
  EXPECT_EQ(to_string(kodaira_type(make_curve(25, 125), 5)), "I0*");
  EXPECT_EQ(to_string(kodaira_type(make_curve(5, 0), 5)), "III");
  EXPECT_EQ(to_string(kodaira_type(make_curve(0, 25), 5)), "IV");
  EXPECT_EQ(to_string(kodaira_type(make_curve(0, 625), 5)), "IV*");
  EXPECT_EQ(to_string(kodaira_type(make_curve(125, 0), 5)), "III*");
  EXPECT_EQ(to_string(kodaira_type(make_curve(0, 3125), 5)), "II*");
  EXPECT_THROW(kodaira_type(make_curve(1, 1), 3), std::invalid_argument);
  EXPECT_THROW(kodaira_type(make_curve(1, 1), 4), std::invalid_argument);
}

TEST(Kodaira, MultiplicativeIndexIsDiscriminantValuation) {
  for (i64 A = -50; A <= 50; ++A)
    for (i64 b = -200; b <= 200; ++b) {
      const EllipticCurveQ e{A, b};
      if (e.disc() == 0 || !is_minimal(A, b)) continue;
      for (i64 p : {5, 7, 11}) {
        const auto t = kodaira_type(e, p);
        if (t.symbol == KodairaSymbol::I) {
          ASSERT_EQ(t.m, valuation_capped(e.disc(), p, 64));
        }
        if (A % p != 0 && e.disc() % p == 0) {
          ASSERT_EQ(t.symbol, KodairaSymbol::I);
        }
      }
    }
}

TEST(Frobenius, Examples) {
  EXPECT_EQ(ap(make_curve(-1, 0), 5), -2);
  EXPECT_EQ(ap(make_curve(0, 1), 5), 0);
  EXPECT_EQ(ap(make_curve(1, 1), 7), 3);
  EXPECT_EQ(ap(make_curve(-1, 0), 13), 6);
  EXPECT_THROW(ap(make_curve(0, 5), 5), std::invalid_argument);
}

TEST(Frobenius, HasseAndPointCount) {
  for (i64 p : {5, 7, 11, 13, 17}) {
    for (i64 A = 0; A < p; ++A)
      for (i64 b = 0; b < p; ++b) {
        const EllipticCurveQ e{A, b};
        if (mod(narrow(e.disc() % p), p) == 0) continue;
        const i64 a = ap(e, p);
        ASSERT_LE(a * a, 4 * p);
        ASSERT_EQ(a, p + 1 - count_points_naive(A, b, p));
      }
  }
}

TEST(Frobenius, NodeSlopeMatchesPointCount) {
  const i64 B = 10'000;
  const i64 a_max = icbrt(B), b_max = height_limit_b(B);
  int checked = 0;
  for (i64 p : {5, 7, 11, 13})
    for (i64 A = -a_max; A <= a_max; ++A)
      for (i64 b = -b_max; b <= b_max; ++b) {
        const EllipticCurveQ e{A, b};
        if (e.disc() == 0 || !is_minimal(A, b) || mod(A, p) == 0 || mod(narrow(e.disc() % p), p) != 0) continue;
        ASSERT_EQ(bp(e, p), bp_by_point_count(e, p)) << A << "," << b << " p=" << p;
        ++checked;
      }
  EXPECT_GT(checked, 100);
  EXPECT_THROW(bp(make_curve(1, 1), 5), std::invalid_argument);
}

TEST(Frobenius, ApHat) {
  EXPECT_EQ(ap_hat(ReductionKind::good, 3, 7, 1), 3);
  EXPECT_EQ(ap_hat(ReductionKind::good, 3, 7, 2), 9 - 14);
  EXPECT_EQ(ap_hat(ReductionKind::good, 3, 7, 3), 27 - 3 * 3 * 7);
  EXPECT_EQ(ap_hat(ReductionKind::split_multiplicative, 1, 7, 2), 1);
  EXPECT_EQ(ap_hat(ReductionKind::nonsplit_multiplicative, -1, 7, 1), -1);
  EXPECT_EQ(ap_hat(ReductionKind::nonsplit_multiplicative, -1, 7, 2), 1);
  EXPECT_EQ(ap_hat(ReductionKind::additive, 0, 7, 2), 0);
  EXPECT_EQ(ap_hat(make_curve(-1, 0), 5, 2), 4 - 10);
  EXPECT_THROW(ap_hat(ReductionKind::good, 0, 7, 0), std::invalid_argument);
}

TEST(ReductionData, KindsAgree) {
  const auto r = reduction_data(make_curve(0, 5), 5);
  EXPECT_EQ(r.kind, ReductionKind::additive);
  const auto g = reduction_data(make_curve(1, 1), 7);
  EXPECT_EQ(g.kind, ReductionKind::good);
  EXPECT_EQ(g.trace, 3);
}

TEST(LocalCondition, ParseAndName) {
  for (const std::string s : {"good", "bad", "multiplicative", "split", "nonsplit", "additive", "trace=-3", "I1", "I7",
                              "II", "III", "IV", "I0*", "I2*", "II*", "III*", "IV*"})
    EXPECT_EQ(LocalCondition::parse(s).name(), s);
  EXPECT_THROW(LocalCondition::parse("I"), std::invalid_argument);
  EXPECT_THROW(LocalCondition::parse("V"), std::invalid_argument);
  EXPECT_THROW(LocalCondition::parse("I2x"), std::invalid_argument);
  EXPECT_THROW(LocalCondition::I(0).validate(5), std::invalid_argument);
  EXPECT_THROW(LocalCondition::trace_equals(5).validate(5), std::invalid_argument);
  EXPECT_THROW(LocalCondition::parse("good").validate(3), std::invalid_argument);
}

TEST(LocalDensity, Examples) {
  EXPECT_EQ(local_density(LocalCondition::parse("good"), 5), Rational(4, 5));
  EXPECT_EQ(local_density(LocalCondition::parse("multiplicative"), 5), Rational(4, 25));
  EXPECT_EQ(local_density(LocalCondition::parse("split"), 7), Rational(3, 49));
  EXPECT_EQ(local_density(LocalCondition::parse("II"), 5), Rational(4, 125));
  EXPECT_EQ(local_density(LocalCondition::I(2), 5), Rational(16, 625));
  EXPECT_EQ(local_density(LocalCondition::trace_equals(0), 5), Rational(4, 25));
}

TEST(LocalDensity, AdditiveRowIsSumOfAdditiveKodairaRows) {
  for (i64 p : {5, 7, 11, 13}) {
    Rational sum(0);
    for (const char* s : {"II", "III", "IV", "I0*", "IV*", "III*", "II*"}) sum += local_density(LocalCondition::parse(s), p);
    // I_m^* for all m >= 1 sums to (1 - 1/p) / p^6.
    sum += (Rational(1) - Rational(1, p)) / Rational(checked_pow(p, 6));
    EXPECT_EQ(local_density(LocalCondition::parse("additive"), p), sum) << p;
  }
}

TEST(LocalDensity, PartitionWithNonMinimalMass) {
  for (i64 p : {5, 7, 11, 13}) {
    const Rational good = local_density(LocalCondition::parse("good"), p);
    const Rational bad = local_density(LocalCondition::parse("bad"), p);
    const Rational mult = local_density(LocalCondition::parse("multiplicative"), p);
    const Rational add = local_density(LocalCondition::parse("additive"), p);
    EXPECT_EQ(bad, mult + add);
    EXPECT_EQ(good + bad + Rational(1, checked_pow(p, 10)), Rational(1));
    EXPECT_EQ(local_density(LocalCondition::parse("split"), p) + local_density(LocalCondition::parse("nonsplit"), p), mult);
    Rational traces(0);
    for (int a = -static_cast<int>(hasse_bound(p)); a <= static_cast<int>(hasse_bound(p)); ++a)
      traces += local_density(LocalCondition::trace_equals(a), p);
    EXPECT_EQ(traces, good);
  }
}

TEST(ResidueCounts, MatchBruteForceOverIntegers) {
  // Every integer pair in [0, 5^4)^2 whose type is fixed mod 5^4 is counted
  // in the matching residue class.
  const i64 p = 5, M = 625;
  const auto counts = residue_kodaira_counts(p, 4);
  std::map<std::string, i64> brute;
  for (i64 A = 0; A < M; ++A)
    for (i64 b = 0; b < M; ++b) {
      const EllipticCurveQ e{A, b};
      if (e.disc() == 0) continue;
      const int vA = A == 0 ? 99 : valuation(A, p), vB = b == 0 ? 99 : valuation(b, p);
      if (vA >= 4 && vB >= 6) continue;
      ++brute[to_string(kodaira_type(e, p))];
    }
  std::map<std::string, i64> residue;
  for (const auto& [t, n] : counts.by_type) residue[to_string(t)] += n;
  for (const char* s : {"good", "I1", "I2", "I3", "II", "III", "IV", "I0*", "IV*"}) EXPECT_EQ(residue[s], brute[s]) << s;
}

TEST(ResidueCounts, Partition) {
  for (i64 p : {5, 7}) {
    for (int N : {1, 3, 6}) {
      const auto c = residue_kodaira_counts(p, N);
      i64 sum = c.nonminimal + c.undecided;
      for (const auto& [t, n] : c.by_type) sum += n;
      EXPECT_EQ(sum, c.total) << p << " N=" << N;
    }
  }
  const auto c = residue_kodaira_counts(5, 6);
  EXPECT_EQ(c.nonminimal, 25);  // mass 5^-10 of 5^12
}

TEST(ResidueCounts, DensitiesMatchLocalDensity) {
  const auto c = residue_kodaira_counts(5, 5);
  for (const char* s : {"I1", "I2", "I3", "II", "III", "IV", "I0*", "IV*"}) {
    const auto cond = LocalCondition::parse(s);
    EXPECT_EQ(residue_density(cond, c), local_density(cond, 5)) << s;
  }
  EXPECT_THROW(residue_density(LocalCondition::parse("good"), c), std::invalid_argument);
}

TEST(ResidueCounts, RejectsBadInput) {
  EXPECT_THROW(residue_kodaira_counts(3, 2), std::invalid_argument);
  EXPECT_THROW(residue_kodaira_counts(5, 0), std::invalid_argument);
}
