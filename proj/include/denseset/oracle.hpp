#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

inline constexpr std::size_t kOracleMaxDim = 16;
inline constexpr std::size_t kOracleMaxPoints = 16;

namespace detail {

struct Sphere {
  Vector center;
  double r2 = -1.0;  // negative: empty

  bool holds(std::span<const double> p) const {
    if (r2 < 0.0) {
      return false;
    }
    return squared_distance(p, center) <= r2 * (1.0 + 1e-12);
  }
};

// Smallest sphere through all support points (circumsphere within their affine hull).
// Solves the Gram system for c = p0 + sum_j alpha_j (p_j - p0) with partial pivoting;
// pivots below 1e-12 of the largest entry drop their variable.
inline Sphere circumsphere(const std::vector<std::span<const double>>& support) {
  Sphere s;
  if (support.empty()) {
    return s;
  }
  const auto p0 = support.front();
  const std::size_t d = p0.size();
  const std::size_t m = support.size() - 1;
  s.center.assign(p0.begin(), p0.end());
  if (m == 0) {
    s.r2 = 0.0;
    return s;
  }
  std::vector<Vector> q(m);
  for (std::size_t j = 0; j < m; ++j) {
    q[j] = subtract(support[j + 1], p0);
  }
  Matrix g(m, m + 1);
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      g(i, j) = 2.0 * dot(q[i], q[j]);
      scale = std::max(scale, std::abs(g(i, j)));
    }
    g(i, m) = dot(q[i], q[i]);
  }
  std::vector<std::size_t> pivot_col(m, m);
  std::size_t row = 0;
  for (std::size_t col = 0; col < m && row < m; ++col) {
    std::size_t best = row;
    for (std::size_t r = row + 1; r < m; ++r) {
      if (std::abs(g(r, col)) > std::abs(g(best, col))) {
        best = r;
      }
    }
    if (std::abs(g(best, col)) <= 1e-12 * scale) {
      continue;
    }
    for (std::size_t c = 0; c <= m; ++c) {
      std::swap(g(row, c), g(best, c));
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row) {
        continue;
      }
      const double f = g(r, col) / g(row, col);
      if (f == 0.0) {
        continue;
      }
      for (std::size_t c = col; c <= m; ++c) {
        g(r, c) -= f * g(row, c);
      }
    }
    pivot_col[row] = col;
    ++row;
  }
  Vector alpha(m, 0.0);
  for (std::size_t r = 0; r < row; ++r) {
    alpha[pivot_col[r]] = g(r, m) / g(r, pivot_col[r]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      s.center[k] += alpha[j] * q[j][k];
    }
  }
  double r2 = 0.0;
  for (const auto& p : support) {
    r2 = std::max(r2, squared_distance(p, s.center));
  }
  s.r2 = r2;
  return s;
}

// Welzl's recursion with the move-to-front heuristic over list[0, end).
inline Sphere mtf_ball(std::vector<std::span<const double>>& list, std::size_t end,
                       std::vector<std::span<const double>>& support, std::size_t dim) {
  Sphere ball = circumsphere(support);
  if (support.size() == dim + 1) {
    return ball;
  }
  for (std::size_t i = 0; i < end; ++i) {
    if (ball.holds(list[i])) {
      continue;
    }
    support.push_back(list[i]);
    ball = mtf_ball(list, i, support, dim);
    support.pop_back();
    std::rotate(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(i),
                list.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return ball;
}

}  // namespace detail

// Exact minimum enclosing ball (up to floating point). Input order is shuffled with a fixed
// seed; the returned radius is the largest distance from the computed center, so every
// input point is a member.
inline Ellipsoid min_enclosing_ball(const PointSet& pts) {
  if (pts.dim() > kOracleMaxDim) {
    throw InvalidArgument("min_enclosing_ball: dimension " + std::to_string(pts.dim()) + " exceeds the cap of " +
                          std::to_string(kOracleMaxDim));
  }
  std::vector<std::span<const double>> list;
  list.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    list.push_back(pts[i]);
  }
  std::mt19937_64 rng(0);
  std::shuffle(list.begin(), list.end(), rng);
  std::vector<std::span<const double>> support;
  detail::Sphere s = detail::mtf_ball(list, list.size(), support, pts.dim());
  double r2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    r2 = std::max(r2, squared_distance(pts[i], s.center));
  }
  return Ellipsoid::ball(std::move(s.center), std::sqrt(r2));
}

struct OptimalBall {
  Ellipsoid ball;
  std::vector<std::size_t> subset;
};

// Smallest ball covering m of the points, by enumerating every m-subset. Ties go to the
// lexicographically smallest center.
inline OptimalBall opt_k_ball(const PointSet& pts, std::size_t m) {
  const std::size_t n = pts.size();
  if (n > kOracleMaxPoints) {
    throw InvalidArgument("opt_k_ball: " + std::to_string(n) + " points exceed the cap of " +
                          std::to_string(kOracleMaxPoints));
  }
  detail::require(m >= 1 && m <= n, "opt_k_ball: m must lie in [1, n]");

  OptimalBall best;
  bool have = false;
  std::vector<std::size_t> comb(m);
  for (std::size_t i = 0; i < m; ++i) {
    comb[i] = i;
  }
  while (true) {
    const Ellipsoid b = min_enclosing_ball(pts.subset(comb));
    if (!have || b.radius() < best.ball.radius() ||
        (b.radius() == best.ball.radius() && lexicographic_less(b.center(), best.ball.center()))) {
      best.ball = b;
      best.subset = comb;
      have = true;
    }
    // next combination in lexicographic order
    std::size_t i = m;
    while (i > 0 && comb[i - 1] == n - m + (i - 1)) {
      --i;
    }
    if (i == 0) {
      break;
    }
    ++comb[i - 1];
    for (std::size_t j = i; j < m; ++j) {
      comb[j] = comb[j - 1] + 1;
    }
  }
  return best;
}

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Rejection sampling over the axis-aligned bounding box of the ellipsoid.
inline VolumeEstimate monte_carlo_volume(const Ellipsoid& e, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) {
    throw InvalidArgument("monte_carlo_volume: sample count must be > 0");
  }
  const std::size_t d = e.dim();
  Vector half(d, 0.0);
  double box = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double w2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double t = e.semi_axes()[i] * e.axes()(i, j);
      w2 += t * t;
    }
    half[j] = std::sqrt(w2);
    box *= 2.0 * half[j];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector y(d);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      y[j] = e.center()[j] + half[j] * unit(rng);
    }
    if (e.contains(y)) {
      ++hits;
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace denseset
