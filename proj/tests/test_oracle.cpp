#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "denseset/datagen.hpp"
#include "denseset/oracle.hpp"
#include "support.hpp"

using namespace denseset;

TEST(MinEnclosingBall, SmallExamples) {
  const auto one = min_enclosing_ball(PointSet::from_rows({{2.0, -1.0}}));
  EXPECT_EQ(one.radius(), 0.0);
  EXPECT_EQ(one.center(), (Vector{2.0, -1.0}));

  const auto two = min_enclosing_ball(PointSet::from_rows({{0.0, 0.0, 0.0}, {2.0, 2.0, 0.0}}));
  EXPECT_NEAR(two.radius(), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(two.center()[0], 1.0, 1e-12);
  EXPECT_NEAR(two.center()[1], 1.0, 1e-12);

  const auto tri = min_enclosing_ball(PointSet::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}));
  EXPECT_NEAR(tri.center()[0], 0.5, 1e-12);
  EXPECT_NEAR(tri.center()[1], 0.5, 1e-12);
  EXPECT_NEAR(tri.radius(), std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(MinEnclosingBall, ObtuseTriangleUsesLongestSide) {
  const auto b = min_enclosing_ball(PointSet::from_rows({{-1.0, 0.0}, {1.0, 0.0}, {0.0, 0.1}}));
  EXPECT_NEAR(b.radius(), 1.0, 1e-12);
  EXPECT_NEAR(b.center()[1], 0.0, 1e-12);
}

TEST(MinEnclosingBall, ContainsAllAndIsMinimalOnRandomSets) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 1 + seed % 6;
    const PointSet y = testing_support::random_cube(1 + seed % 30, d, seed);
    const auto b = min_enclosing_ball(y);
    EXPECT_EQ(coverage_count(b, y), y.size());
    // the radius can't be shrunk around any nearby center: check against the farthest point
    // from perturbed centers
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 20; ++k) {
      Vector c = b.center();
      const Vector dir = denseset::detail::unit_direction(d, rng);
      for (std::size_t j = 0; j < d; ++j) {
        c[j] += 1e-3 * dir[j];
      }
      double far = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        far = std::max(far, distance(c, y[i]));
      }
      EXPECT_GE(far, b.radius() * (1.0 - 1e-9));
    }
  }
}

TEST(MinEnclosingBall, DimensionCap) {
  EXPECT_THROW(min_enclosing_ball(testing_support::random_cube(3, 17, 1)), InvalidArgument);
}

TEST(OptKBall, FullAndSingleton) {
  const PointSet y = testing_support::random_cube(9, 3, 2);
  EXPECT_EQ(opt_k_ball(y, 9).ball, min_enclosing_ball(y));
  const auto one = opt_k_ball(y, 1);
  EXPECT_EQ(one.ball.radius(), 0.0);
  Vector smallest(y[0].begin(), y[0].end());
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (lexicographic_less(y[i], smallest)) {
      smallest.assign(y[i].begin(), y[i].end());
    }
  }
  EXPECT_EQ(one.ball.center(), smallest);
}

TEST(OptKBall, PlantedFeasibility) {
  const auto inst = gen_planted(12, 3, 0.5, 1.0, 2.0, 11);
  const auto best = opt_k_ball(inst.points, 6);
  EXPECT_LE(best.ball.radius(), 1.0 + 1e-12);
  EXPECT_EQ(best.subset.size(), 6u);
  EXPECT_GE(coverage_count(best.ball, inst.points), 6u);
}

TEST(OptKBall, MonotoneInM) {
  const PointSet y = testing_support::random_cube(10, 2, 7);
  double prev = -1.0;
  for (std::size_t m = 1; m <= 10; ++m) {
    const double r = opt_k_ball(y, m).ball.radius();
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(OptKBall, Caps) {
  EXPECT_THROW(opt_k_ball(testing_support::random_cube(17, 2, 1), 3), InvalidArgument);
  EXPECT_THROW(opt_k_ball(testing_support::random_cube(5, 2, 1), 0), InvalidArgument);
  EXPECT_THROW(opt_k_ball(testing_support::random_cube(5, 2, 1), 6), InvalidArgument);
}

TEST(MonteCarloVolume, Discs) {
  const auto within = [](const VolumeEstimate& v, double truth) {
    return std::abs(v.estimate - truth) <= 3.0 * v.std_error;
  };
  const Ellipsoid disc = Ellipsoid::ball({0.0, 0.0}, 1.0);
  EXPECT_TRUE(within(monte_carlo_volume(disc, 1000000, 1), std::numbers::pi));
  EXPECT_TRUE(within(monte_carlo_volume(scale(disc, 2.0), 1000000, 1), 4.0 * std::numbers::pi));
  const Ellipsoid oval({0.0, 0.0}, Matrix::identity(2), {2.0, 1.0});
  EXPECT_TRUE(within(monte_carlo_volume(oval, 1000000, 1), 2.0 * std::numbers::pi));
  EXPECT_THROW(monte_carlo_volume(disc, 0, 1), InvalidArgument);
}

TEST(MonteCarloVolume, RotatedEllipsoidsAgreeWithClosedForm) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 5; ++i) {
    const Ellipsoid e = testing_support::random_ellipsoid(2 + i % 2, rng);
    const auto v = monte_carlo_volume(e, 200000, 100 + i);
    EXPECT_LE(std::abs(v.estimate - std::exp(e.log_volume())), 4.0 * v.std_error);
  }
}
