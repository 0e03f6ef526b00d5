#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "denseset/datagen.hpp"
#include "denseset/geometry.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"

namespace testing_support {

using namespace denseset;

inline PointSet random_cube(std::size_t n, std::size_t d, std::uint64_t seed, double half = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(denseset::detail::uniform_in_cube(d, half, rng));
  }
  return PointSet::from_rows(rows);
}

inline PointSet random_ball(std::size_t n, std::size_t d, std::uint64_t seed, const Vector& center, double radius) {
  denseset::detail::require_dim(d, center.size(), "random_ball");
  std::mt19937_64 rng(seed);
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(denseset::detail::uniform_in_ball(center, radius, rng));
  }
  return PointSet::from_rows(rows);
}

inline Matrix random_rotation(std::size_t d, std::mt19937_64& rng) {
  const auto vs = denseset::detail::random_orthonormal(d, d, rng);
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      m(i, j) = vs[i][j];
    }
  }
  return m;
}

inline Ellipsoid random_ellipsoid(std::size_t d, std::mt19937_64& rng, double lo = 0.3, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector semi(d);
  for (auto& s : semi) {
    s = u(rng);
  }
  Vector c = denseset::detail::uniform_in_cube(d, 1.0, rng);
  return Ellipsoid(std::move(c), random_rotation(d, rng), std::move(semi));
}

}  // namespace testing_support
