#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "denseset/dense_ball.hpp"
#include "denseset/geometry.hpp"
#include "denseset/spectral.hpp"

namespace denseset {

// Two-level preconditioner M = sum_i a2_i v_i v_i^T with a2_i in {1, d}.
struct EllipsoidShape {
  Matrix eigenvectors;  // rows v_i
  Vector a2;
  double tau_hat = 1.0;
  double r_prime = 0.0;

  std::size_t dim() const noexcept { return a2.size(); }

  std::size_t stretched_count() const noexcept {
    const auto d = static_cast<double>(dim());
    return static_cast<std::size_t>(std::count(a2.begin(), a2.end(), d));
  }

  // (1/2) sum_i log a2_i: log-volume added when mapping a transformed ball back.
  double half_log_det() const noexcept {
    double s = 0.0;
    for (double v : a2) {
      s += 0.5 * std::log(v);
    }
    return s;
  }
};

// a2_i = d when lambda_i >= tau_hat^2 R'^2 / d, else 1.
inline EllipsoidShape ellipsoid_shape(const SpectralSummary& s, double r_prime, double tau_hat) {
  detail::require(r_prime > 0.0 && std::isfinite(r_prime), "ellipsoid_shape: R' must be > 0");
  detail::require(tau_hat >= 1.0 && std::isfinite(tau_hat), "ellipsoid_shape: tau_hat must be >= 1");
  const std::size_t d = s.eigenvalues.size();
  const auto dd = static_cast<double>(d);
  const double threshold = tau_hat * tau_hat * r_prime * r_prime / dd;
  EllipsoidShape shape;
  shape.eigenvectors = s.eigenvectors;
  shape.a2.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    shape.a2[i] = s.eigenvalues[i] >= threshold ? dd : 1.0;
  }
  shape.tau_hat = tau_hat;
  shape.r_prime = r_prime;
  return shape;
}

// z = M^{-1/2} y = sum_i (<y, v_i> / a_i) v_i
inline Vector precondition_point(std::span<const double> y, const EllipsoidShape& shape) {
  const std::size_t d = shape.dim();
  detail::require_dim(d, y.size(), "precondition");
  Vector z(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto v = shape.eigenvectors.row(i);
    const double c = dot(v, y) / std::sqrt(shape.a2[i]);
    for (std::size_t j = 0; j < d; ++j) {
      z[j] += c * v[j];
    }
  }
  return z;
}

inline PointSet precondition(const PointSet& pts, const EllipsoidShape& shape) {
  detail::require_dim(shape.dim(), pts.dim(), "precondition");
  std::vector<double> flat;
  flat.reserve(pts.size() * pts.dim());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector z = precondition_point(pts[i], shape);
    flat.insert(flat.end(), z.begin(), z.end());
  }
  return PointSet(pts.dim(), std::move(flat));
}

struct EllipsoidParams {
  double delta = 0.5;
  double gamma = 0.1;
  std::optional<double> tau_hat;  // default d^{1/4}
  // 0: every coverage-feasible pair ball. Otherwise the tightest feasible pair ball around
  // each point, smallest radii first, at most this many.
  std::size_t coarse_limit = 32;
};

struct EllipsoidFit {
  Ellipsoid set;
  std::size_t coverage = 0;
  std::size_t coarse_considered = 0;
  std::size_t stretched_axes = 0;  // axes with a2 = d in the winning shape
  bool from_coarse = false;        // the winner is one of the injected coarse balls
  double transformed_radius = 0.0;
};

namespace detail {

// Grows the scale of `e` until it covers `target` points. Absorbs round-off between the
// radius selection arithmetic and the membership test.
inline Ellipsoid ensure_coverage(Ellipsoid e, const PointSet& pts, std::size_t target) {
  double bump = 1e-15;
  for (int i = 0; i < 64 && coverage_count(e, pts) < target; ++i) {
    e = scale(e, 1.0 + bump);
    bump *= 4.0;
  }
  if (coverage_count(e, pts) < target) {
    throw Infeasible("dense_ellipsoid: could not certify coverage of the selected set");
  }
  return e;
}

struct EllipsoidCandidate {
  double log_volume = std::numeric_limits<double>::infinity();
  Vector center;
  double radius = 0.0;          // transformed-space radius, or the coarse radius
  std::optional<EllipsoidShape> shape;  // empty: ball
  std::size_t stretched = 0;
  bool coarse = false;

  bool better_than(const EllipsoidCandidate& other) const {
    if (log_volume != other.log_volume) {
      return log_volume < other.log_volume;
    }
    if (center != other.center) {
      return lexicographic_less(center, other.center);
    }
    return radius < other.radius;
  }
};

}  // namespace detail

// Improper learner: for each coarse ball, fit the two-level shape to the points inside it,
// precondition every point, take the mean of the transformed inside points as center and the
// smallest transformed radius covering ceil((1 - gamma) delta n) points, then map the ball
// back. Returns the smallest-volume result; coarse balls compete as candidates too.
inline EllipsoidFit dense_ellipsoid(const PointSet& pts, const EllipsoidParams& params) {
  detail::check_fraction(params.delta, "delta", true);
  detail::check_fraction(params.gamma, "gamma", false);
  const std::size_t n = pts.size();
  const std::size_t d = pts.dim();
  if (n < 2) {
    throw InvalidArgument("dense_ellipsoid: at least two points are required");
  }
  const auto dd = static_cast<double>(d);
  const double tau_hat = params.tau_hat.value_or(std::pow(dd, 0.25));
  detail::require(tau_hat >= 1.0 && std::isfinite(tau_hat), "dense_ellipsoid: tau_hat must be >= 1");
  const std::size_t target = required_count(params.delta * (1.0 - params.gamma), n);
  if (target < 1 || target > n) {
    throw Infeasible("dense_ellipsoid: coverage target out of range");
  }

  std::vector<CoarseBall> coarse;
  if (params.coarse_limit == 0) {
    coarse = coarse_balls(pts, params.delta);
  } else {
    coarse = tight_coarse_balls(pts, params.delta);
    if (coarse.size() > params.coarse_limit) {
      coarse.resize(params.coarse_limit);
    }
  }

  const double unit = unit_ball_log_volume(d);
  detail::EllipsoidCandidate best;
  for (const auto& cb : coarse) {
    detail::EllipsoidCandidate c;
    c.log_volume = cb.radius > 0.0 ? unit + dd * std::log(cb.radius) : -std::numeric_limits<double>::infinity();
    const auto p = pts[cb.center_index];
    c.center.assign(p.begin(), p.end());
    c.radius = cb.radius;
    c.coarse = true;
    if (c.better_than(best)) {
      best = std::move(c);
    }
  }

  std::vector<double> r2(n);
  std::vector<std::size_t> high;
  for (const auto& cb : coarse) {
    if (cb.radius == 0.0) {
      continue;
    }
    const Ellipsoid ball = cb.to_ellipsoid(pts);
    const auto inside = detail::indices_inside(pts, ball);
    const SpectralSummary s = summarize(pts, inside);
    EllipsoidShape shape = ellipsoid_shape(s, cb.radius, tau_hat);

    high.clear();
    for (std::size_t i = 0; i < d; ++i) {
      if (shape.a2[i] != 1.0) {
        high.push_back(i);
      }
    }
    // |M^{-1/2}(y - mean)|^2 = |y - mean|^2 - sum_{high} (1 - 1/d) <y - mean, v_i>^2
    const double shrink = 1.0 - 1.0 / dd;
    for (std::size_t j = 0; j < n; ++j) {
      const auto y = pts[j];
      double total = squared_distance(y, s.mean);
      for (std::size_t i : high) {
        const auto v = shape.eigenvectors.row(i);
        double proj = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          proj += (y[k] - s.mean[k]) * v[k];
        }
        total -= shrink * proj * proj;
      }
      r2[j] = std::max(total, 0.0);
    }
    std::nth_element(r2.begin(), r2.begin() + static_cast<std::ptrdiff_t>(target - 1), r2.end());
    const double radius = std::sqrt(r2[target - 1]);

    detail::EllipsoidCandidate c;
    c.center = s.mean;
    c.radius = radius;
    c.stretched = high.size();
    c.log_volume = radius > 0.0 ? unit + dd * std::log(radius) + shape.half_log_det()
                                : -std::numeric_limits<double>::infinity();
    if (!high.empty()) {
      c.shape = std::move(shape);
    }
    if (c.better_than(best)) {
      best = std::move(c);
    }
  }

  EllipsoidFit fit;
  fit.coarse_considered = coarse.size();
  fit.from_coarse = best.coarse;
  fit.stretched_axes = best.stretched;
  fit.transformed_radius = best.radius;
  if (!best.shape) {
    fit.set = Ellipsoid::ball(best.center, best.radius);
  } else {
    Vector semi(d);
    for (std::size_t i = 0; i < d; ++i) {
      semi[i] = best.radius * std::sqrt(best.shape->a2[i]);
    }
    fit.set = Ellipsoid::from_trusted_axes(best.center, best.shape->eigenvectors, std::move(semi));
  }
  fit.set = detail::ensure_coverage(std::move(fit.set), pts, target);
  fit.coverage = coverage_count(fit.set, pts);
  return fit;
}

}  // namespace denseset
