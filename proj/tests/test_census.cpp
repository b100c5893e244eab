#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "avgrank/census.hpp"
#include "avgrank/wps.hpp"

using namespace avgrank;

TEST(Census, HeightOne) {
  const auto curves = enumerate_census(1);
  EXPECT_EQ(curves.size(), 8u);
  for (const auto& e : curves) EXPECT_EQ(e.height(), 1);
  EXPECT_EQ(Census(1).size(), 8);
}

TEST(Census, Examples) {
  const auto curves = enumerate_census(64);
  EXPECT_TRUE(std::binary_search(curves.begin(), curves.end(), EllipticCurveQ{0, 8}));
  EXPECT_TRUE(std::binary_search(curves.begin(), curves.end(), EllipticCurveQ{0, -8}));
  EXPECT_FALSE(std::binary_search(curves.begin(), curves.end(), EllipticCurveQ{-3, 2}));
  EXPECT_FALSE(std::binary_search(curves.begin(), curves.end(), EllipticCurveQ{0, 0}));
  EXPECT_THROW(Census(0), std::invalid_argument);
  EXPECT_THROW(Census(2'000'000'000'000), std::overflow_error);
}

TEST(Census, MatchesBruteForce) {
  for (i64 B : {1, 27, 64, 1000, 5000}) {
    std::vector<EllipticCurveQ> brute;
    const i64 a = icbrt(B), b = isqrt(B);
    for (i64 A = -a; A <= a; ++A)
      for (i64 y = -b; y <= b; ++y) {
        const EllipticCurveQ e{A, y};
        if (e.disc() != 0 && e.height() <= B && is_minimal(A, y)) brute.push_back(e);
      }
    EXPECT_EQ(enumerate_census(B), brute) << B;
  }
}

TEST(Census, BijectionWithWeightedProjectivePoints) {
  // Census(B) = points of P(4,6) of height <= B^{1/12} off the discriminant locus.
  for (i64 B : {1, 1000, 1'000'000}) {
    std::set<std::pair<i64, i64>> from_wps;
    for (const auto& p : enumerate(WeightVector({4, 6}), std::pow(static_cast<double>(B), 1.0 / 12) * (1 + 1e-12))) {
      const EllipticCurveQ e{p.coords[0], p.coords[1]};
      if (e.disc() != 0 && e.height() <= B) from_wps.insert({e.A, e.b});
    }
    std::set<std::pair<i64, i64>> census;
    for_each_curve(Census(B), [&](const EllipticCurveQ& e) { census.insert({e.A, e.b}); });
    EXPECT_EQ(census, from_wps) << B;
  }
}

TEST(Census, SizeMatchesCurveCount) {
  const Census c(1'000'000);
  i64 n = 0;
  for_each_curve(c, [&](const EllipticCurveQ&) { ++n; });
  EXPECT_EQ(n, c.size());
}

TEST(ResidueHistogram, MatchesPerCurve) {
  const Census c(200'000);
  for (i64 p : {5, 7, 13}) {
    std::vector<i64> brute(static_cast<std::size_t>(p * p), 0);
    for_each_curve(c, [&](const EllipticCurveQ& e) { ++brute[static_cast<std::size_t>(mod(e.A, p) * p + mod(e.b, p))]; });
    EXPECT_EQ(residue_histogram(c, p), brute) << p;
    EXPECT_EQ(residue_histogram(CensusRows(c.height_bound(), {}), p), std::vector<i64>(static_cast<std::size_t>(p * p), 0));
  }
}

TEST(LocalStatistics, MatchesPerCurve) {
  const Census c(1'000'000);
  for (i64 p : {5, 7, 11, 13, 101}) EXPECT_EQ(local_statistics(c, p), local_statistics_per_curve(c, p)) << p;
}

TEST(LocalStatistics, WorkersDeterministic) {
  const Census c(1'000'000);
  for (i64 p : {5, 11}) EXPECT_EQ(local_statistics(c, p, 1), local_statistics(c, p, 3));
  EXPECT_THROW(local_statistics(c, 5, 0), std::invalid_argument);
}

TEST(LocalStatistics, PartitionsCensus) {
  const Census c(1'000'000);
  const auto st = local_statistics(c, 7);
  EXPECT_EQ(st.total, c.size());
  i64 kinds = 0, types = 0, traces = 0;
  for (const auto& [k, n] : st.by_kind) kinds += n;
  for (const auto& [k, n] : st.by_kodaira) types += n;
  for (const auto& [k, n] : st.by_trace) traces += n;
  EXPECT_EQ(kinds, st.total);
  EXPECT_EQ(types, st.total);
  EXPECT_EQ(traces, st.by_kind.at(ReductionKind::good));
  EXPECT_EQ(count_satisfying(st, LocalCondition::parse("good")) + count_satisfying(st, LocalCondition::parse("bad")), st.total);
  EXPECT_EQ(count_satisfying(st, LocalCondition::parse("multiplicative")) + count_satisfying(st, LocalCondition::parse("additive")),
            count_satisfying(st, LocalCondition::parse("bad")));
}

TEST(CellTable, MatchesCurveReduction) {
  for (i64 p : {5, 7, 11}) {
    const auto cells = cell_table(p);
    for (i64 A = 0; A < p; ++A)
      for (i64 b = 0; b < p; ++b) {
        if (A == 0 && b == 0) continue;
        // A representative with v_p(A), v_p(b) < 4 is minimal at p.
        const auto r = reduction_data(EllipticCurveQ{A == 0 ? p : A, b}, p);
        const auto& cell = cells[static_cast<std::size_t>(A * p + b)];
        EXPECT_EQ(cell.kind, r.kind) << A << "," << b;
        EXPECT_EQ(cell.trace, r.trace) << A << "," << b;
      }
  }
}

TEST(ExpectedFraction, Normalization) {
  const double good = expected_fraction(LocalCondition::parse("good"), 5);
  const double bad = expected_fraction(LocalCondition::parse("bad"), 5);
  EXPECT_NEAR(good + bad, 1.0, 1e-15);
  EXPECT_NEAR(census_constant(), 3.996025652276123, 1e-12);
}

TEST(CountWithCondition, Fields) {
  const Census c(100'000);
  const auto st = local_statistics(c, 5);
  const auto r = count_with_condition(st, LocalCondition::parse("good"), 100'000);
  EXPECT_EQ(r.total, c.size());
  EXPECT_NEAR(r.empirical, static_cast<double>(r.count) / static_cast<double>(r.total), 1e-15);
  EXPECT_NEAR(r.predicted, census_constant() * r.expected * std::pow(1e5, 5.0 / 6), 1e-6);
  EXPECT_NEAR(r.empirical, r.expected, 0.01);
}
