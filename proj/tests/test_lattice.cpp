#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avgrank/lattice.hpp"

using namespace avgrank;

namespace {

// Double loop over the dilated bounding box, testing each point.
i64 naive_count(const WeightVector& w, double B, const Region& r, const CongruenceBox& box) {
  const i64 X = dilated_bound(r.radius[0], B, w[0]) + 1, Y = dilated_bound(r.radius[1], B, w[1]) + 1;
  i64 n = 0;
  for (i64 x = -X; x <= X; ++x)
    for (i64 y = -Y; y <= Y; ++y) {
      const std::vector<double> t = {x / std::pow(B, w[0]), y / std::pow(B, w[1])};
      const std::vector<i64> v = {x, y};
      if (r.contains(t) && (box.empty() || box.contains(v))) ++n;
    }
  return n;
}

Region unit_height_ball_46() {
  Region r;
  r.dimension = 2;
  r.radius = {1, 1};
  r.contains = [](std::span<const double> x) {
    return std::max(std::pow(std::abs(x[0]), 0.25), std::pow(std::abs(x[1]), 1.0 / 6)) <= 1;
  };
  r.volume = 4;
  return r;
}

}  // namespace

TEST(WeightVector, Derived) {
  const WeightVector w({4, 6});
  EXPECT_EQ(w.total(), 10);
  EXPECT_EQ(w.min_weight(), 4);
  EXPECT_EQ(w.gcd(), 2);
  EXPECT_FALSE(w.any_odd());
  EXPECT_THROW(WeightVector({}), std::invalid_argument);
  EXPECT_THROW(WeightVector({1, 0}), std::invalid_argument);
}

TEST(WeightedDilate, Examples) {
  const std::vector<double> x = {1, 1};
  EXPECT_EQ(weighted_dilate(1, WeightVector({3, 5}), x), x);
  EXPECT_EQ(weighted_dilate(2, WeightVector({4, 6}), x), (std::vector<double>{16, 64}));
  const std::vector<double> y = {-1, 0.5};
  EXPECT_EQ(weighted_dilate(3, WeightVector({1, 2}), y), (std::vector<double>{-3, 4.5}));
  EXPECT_THROW(weighted_dilate(2, WeightVector({1, 2, 3}), y), std::invalid_argument);
}

TEST(CongruenceBox, MeasureAndValidation) {
  CongruenceBox b(2);
  b.add(5, 0, 0, 1).add(3, 1, 2, 2).add(2, 0, 1, 3);
  EXPECT_EQ(b.measure(), Rational(1, 5 * 9 * 8));
  EXPECT_EQ(b.modulus(0), 40);
  EXPECT_EQ(b.modulus(1), 9);
  EXPECT_EQ(b.residue(0) % 5, 0);
  EXPECT_EQ(b.residue(0) % 8, 1);
  EXPECT_EQ(b.max_coordinate_modulus(), 40);
  EXPECT_THROW(b.add(5, 0, 1, 2), std::invalid_argument);
  EXPECT_THROW(b.add(4, 1, 0, 1), std::invalid_argument);
  EXPECT_EQ(CongruenceBox(2).measure(), Rational(1));
}

TEST(CountInDilate, Examples) {
  const CongruenceBox none(2);
  EXPECT_EQ(count_in_dilate(WeightVector({1, 1}), 10, Region::box({1, 1}), none), 441);
  EXPECT_EQ(count_in_dilate(WeightVector({4, 6}), 2, unit_height_ball_46(), none), 4257);
  CongruenceBox five(2);
  five.add(5, 0, 0, 1);
  EXPECT_EQ(count_in_dilate(WeightVector({4, 6}), 2, unit_height_ball_46(), five), 903);
}

TEST(CountInDilate, MatchesNaiveOracle) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rad(0.3, 1.7);
  for (int i = 0; i < 60; ++i) {
    const WeightVector w(i % 2 ? std::vector<int>{1, 2} : std::vector<int>{1, 1});
    const std::vector<double> radii = {rad(rng), rad(rng)};
    const Region r = i % 3 == 0 ? Region::box(radii) : i % 3 == 1 ? Region::ellipsoid(radii) : Region::cross_polytope(radii);
    CongruenceBox box(2);
    if (i % 4 != 0) box.add(i % 8 < 4 ? 3 : 2, static_cast<std::size_t>(i % 2), i, 1 + i % 2);
    const double B = 2 + static_cast<double>(rng() % 30) + (i % 5 == 0 ? 0.5 : 0.0);
    ASSERT_EQ(count_in_dilate(w, B, r, box), naive_count(w, B, r, box)) << i;
  }
}

TEST(CountInDilate, WorkersAgree) {
  const Region r = Region::ellipsoid({1.2, 0.8});
  CongruenceBox box(2);
  box.add(7, 1, 3, 1);
  const WeightVector w({1, 2});
  EXPECT_EQ(count_in_dilate(w, 200, r, box, 1), count_in_dilate(w, 200, r, box, 4));
}

TEST(CountInDilate, ThreeDimensions) {
  const Region r = Region::ellipsoid({1, 1, 1});
  const i64 n = count_in_dilate(WeightVector({1, 1, 1}), 10, r, CongruenceBox(3));
  i64 brute = 0;
  for (int x = -10; x <= 10; ++x)
    for (int y = -10; y <= 10; ++y)
      for (int z = -10; z <= 10; ++z) brute += x * x + y * y + z * z <= 100;
  EXPECT_EQ(n, brute);
}

TEST(CountInDilate, OverflowGuard) {
  EXPECT_THROW(count_in_dilate(WeightVector({4, 6}), 1e4, Region::box({1, 1}), CongruenceBox(2)), std::overflow_error);
}

TEST(PredictedCount, Examples) {
  const auto a = predicted_count(WeightVector({4, 6}), 2, 4, CongruenceBox(2));
  EXPECT_DOUBLE_EQ(a.main, 4096);
  EXPECT_DOUBLE_EQ(a.error_scale, 64);
  const auto b = predicted_count(WeightVector({1, 1}), 10, 4, CongruenceBox(2));
  EXPECT_DOUBLE_EQ(b.main, 400);
  EXPECT_DOUBLE_EQ(b.error_scale, 10);
  CongruenceBox five(2);
  five.add(5, 0, 0, 1);
  const auto c = predicted_count(WeightVector({4, 6}), 2, 4, five);
  EXPECT_NEAR(c.main, 819.2, 1e-9);
  EXPECT_NEAR(c.error_scale, 64, 1e-12);
  EXPECT_THROW(predicted_count(WeightVector({1, 1}), 2, -1, five), std::invalid_argument);
}

TEST(BoxLemma, ConstantDoesNotGrowWithExponent) {
  // Fixed region and prime, growing k: the worst ratio over B stays bounded.
  const Region r = Region::ellipsoid({1.1, 0.9});
  const WeightVector w({1, 2});
  double worst_by_k[4] = {0, 0, 0, 0};
  for (int k = 1; k <= 4; ++k) {
    CongruenceBox box(2);
    box.add(3, 0, 1, k);
    for (int j = 1; j <= 10; ++j) {
      const double B = std::ldexp(1.0, j);
      if (B < std::pow(3.0, k)) continue;
      const auto pred = predicted_count(w, B, *r.volume, box);
      const double ratio = std::abs(static_cast<double>(count_in_dilate(w, B, r, box)) - pred.main) / pred.error_scale;
      worst_by_k[k - 1] = std::max(worst_by_k[k - 1], ratio);
    }
  }
  for (double v : worst_by_k) EXPECT_LE(v, 10.0);
}

TEST(BoxLemma, MeasureConsistency) {
  const Region r = Region::cross_polytope({1.3, 1.0});
  const WeightVector w({1, 1});
  CongruenceBox box(2);
  box.add(2, 0, 1, 2).add(5, 1, 3, 1);
  const double B = 2000;
  const i64 with = count_in_dilate(w, B, r, box), without = count_in_dilate(w, B, r, CongruenceBox(2));
  const double mu = boost::rational_cast<double>(box.measure());
  const auto pred = predicted_count(w, B, *r.volume, box);
  // ratio error within three times the relative error scale
  EXPECT_LE(std::abs(static_cast<double>(with) / static_cast<double>(without) - mu), 3 * pred.error_scale / pred.main);
}
