#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"
#include "denseset/spectral.hpp"

namespace denseset {

struct BallSearchParams {
  double delta = 0.5;
  double gamma = 0.1;
  std::optional<std::size_t> q;  // grid dimension; default from d
  std::optional<double> tau;     // net tolerance; default from R_min
  std::size_t candidate_cap = 200000;
};

// Pair ball B(Y[center_index], radius) with its coverage on the full point set.
struct CoarseBall {
  std::size_t center_index = 0;
  double radius = 0.0;
  std::size_t coverage = 0;

  Ellipsoid to_ellipsoid(const PointSet& pts) const {
    const auto c = pts[center_index];
    return Ellipsoid::ball(Vector(c.begin(), c.end()), radius);
  }
};

namespace detail {

inline void check_fraction(double v, const char* name, bool allow_one) {
  const bool ok = v > 0.0 && (allow_one ? v <= 1.0 : v < 1.0) && std::isfinite(v);
  if (!ok) {
    throw InvalidArgument(std::string(name) + " must lie in (0, " + (allow_one ? "1]" : "1)") +
                          ", got " + std::to_string(v));
  }
}

// Squared distances from `center` to every point.
inline void squared_distances(const PointSet& pts, std::span<const double> center, std::vector<double>& out) {
  out.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = squared_distance(pts[i], center);
  }
}

// Smallest radius r such that the closed ball B(center, r) covers at least k points, using
// the same membership rule as Ellipsoid::contains.
inline double kth_radius(const PointSet& pts, std::span<const double> center, std::size_t k,
                         std::vector<double>& scratch) {
  squared_distances(pts, center, scratch);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
  return std::sqrt(scratch[k - 1]);
}

inline std::size_t count_within(std::span<const double> sorted_sq, double radius) {
  const double bound = radius * radius * (1.0 + kMembershipSlack);
  return static_cast<std::size_t>(std::upper_bound(sorted_sq.begin(), sorted_sq.end(), bound) - sorted_sq.begin());
}

// First index of each group of identical points; pair balls around duplicates coincide.
inline std::vector<std::size_t> distinct_point_indices(const PointSet& pts) {
  std::vector<std::size_t> order = all_indices(pts.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lexicographic_less(pts[a], pts[b]); });
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || lexicographic_less(pts[order[i - 1]], pts[order[i]])) {
      keep.push_back(order[i]);
    }
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

inline bool coarse_less(const PointSet& pts, const CoarseBall& a, const CoarseBall& b) {
  if (a.radius != b.radius) {
    return a.radius < b.radius;
  }
  if (lexicographic_less(pts[a.center_index], pts[b.center_index])) {
    return true;
  }
  if (lexicographic_less(pts[b.center_index], pts[a.center_index])) {
    return false;
  }
  return a.center_index < b.center_index;
}

}  // namespace detail

// Every pair ball B(y1, |y1 - y2|) over ordered pairs of distinct indices, deduplicated, that
// covers at least ceil(delta * n) points. Sorted by radius, then center.
inline std::vector<CoarseBall> coarse_balls(const PointSet& pts, double delta) {
  detail::check_fraction(delta, "delta", true);
  const std::size_t n = pts.size();
  if (n < 2) {
    throw InvalidArgument("coarse_balls: at least two points are required");
  }
  const std::size_t need = required_count(delta, n);
  std::vector<CoarseBall> out;
  std::vector<double> sq;
  for (std::size_t i : detail::distinct_point_indices(pts)) {
    detail::squared_distances(pts, pts[i], sq);
    // sq[0] is the center itself; pair radii start at sq[1]
    std::sort(sq.begin(), sq.end());
    const std::span<const double> all(sq);
    double last = -1.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double r = std::sqrt(sq[j]);
      if (r == last) {
        continue;
      }
      last = r;
      const std::size_t cov = detail::count_within(all, r);
      if (cov >= need) {
        out.push_back({i, r, cov});
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const CoarseBall& a, const CoarseBall& b) { return detail::coarse_less(pts, a, b); });
  if (out.empty()) {
    throw Infeasible("coarse_balls: no pair ball reaches the requested coverage");
  }
  return out;
}

// The smallest feasible pair ball around each distinct point: one ball per center, sorted by
// radius. The overall minimum equals the minimum radius of coarse_balls.
inline std::vector<CoarseBall> tight_coarse_balls(const PointSet& pts, double delta) {
  detail::check_fraction(delta, "delta", true);
  const std::size_t n = pts.size();
  if (n < 2) {
    throw InvalidArgument("coarse_balls: at least two points are required");
  }
  const std::size_t need = required_count(delta, n);
  const std::size_t slot = std::max<std::size_t>(1, need - 1);
  std::vector<CoarseBall> out;
  std::vector<double> sq;
  for (std::size_t i : detail::distinct_point_indices(pts)) {
    detail::squared_distances(pts, pts[i], sq);
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(slot), sq.end());
    const double r = std::sqrt(sq[slot]);
    std::size_t cov = 0;
    const double bound = r * r * (1.0 + kMembershipSlack);
    for (double v : sq) {
      cov += v <= bound ? 1 : 0;
    }
    out.push_back({i, r, cov});
  }
  std::sort(out.begin(), out.end(), [&](const CoarseBall& a, const CoarseBall& b) { return detail::coarse_less(pts, a, b); });
  return out;
}

struct RadiusFilter {
  double r_min = 0.0;
  std::vector<CoarseBall> kept;
};

// Keeps the balls whose radius is at most twice the smallest radius in the list.
inline RadiusFilter filter_by_rmin(std::vector<CoarseBall> balls) {
  if (balls.empty()) {
    throw InvalidArgument("filter_by_rmin: empty ball list");
  }
  RadiusFilter out;
  out.r_min = std::min_element(balls.begin(), balls.end(), [](const CoarseBall& a, const CoarseBall& b) {
                return a.radius < b.radius;
              })->radius;
  const double limit = 2.0 * out.r_min * (1.0 + 1e-12);
  for (auto& b : balls) {
    if (b.radius <= limit) {
      out.kept.push_back(b);
    }
  }
  return out;
}

// Default grid dimension: round(ln d / ln ln d), clamped to [0, min(d, 6)], and 0 below d = 8.
inline std::size_t default_grid_dim(std::size_t d) {
  if (d < 8) {
    return 0;
  }
  const double ld = std::log(static_cast<double>(d));
  const double q = std::round(ld / std::log(ld));
  return std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, q)), std::min<std::size_t>(d, 6));
}

// Default net tolerance: R_min / ln d for d >= 3, else R_min.
inline double default_net_tolerance(std::size_t d, double r_min) {
  return d >= 3 ? r_min / std::log(static_cast<double>(d)) : r_min;
}

// Upper bound on the size of grid_net(R, q, tau).
inline double grid_net_size_bound(double radius, std::size_t q, double tau) {
  const double k = std::ceil(radius * std::sqrt(static_cast<double>(q)) / tau);
  return std::pow(1.0 + 2.0 * k, static_cast<double>(q));
}

// A tau-net of the q-ball B(0, R): the cubic lattice with spacing tau / sqrt(q), restricted to
// the ball of radius R + tau. Throws BudgetExceeded when the lattice bound exceeds `cap`.
inline std::vector<Vector> grid_net(double radius, std::size_t q, double tau,
                                    std::size_t cap = std::numeric_limits<std::size_t>::max()) {
  detail::require(q >= 1, "grid_net: q must be >= 1");
  detail::require(tau > 0.0 && std::isfinite(tau), "grid_net: tau must be > 0");
  detail::require(radius > 0.0 && std::isfinite(radius), "grid_net: radius must be > 0");
  const double bound = grid_net_size_bound(radius, q, tau);
  if (bound > static_cast<double>(cap)) {
    throw BudgetExceeded("grid_net: net size bound " + std::to_string(bound) + " exceeds cap " + std::to_string(cap));
  }
  const double spacing = tau / std::sqrt(static_cast<double>(q));
  const auto k = static_cast<long>(std::ceil(radius * std::sqrt(static_cast<double>(q)) / tau));
  const double keep2 = (radius + tau) * (radius + tau);

  std::vector<Vector> net;
  std::vector<long> idx(q, -k);
  Vector p(q);
  while (true) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      p[i] = static_cast<double>(idx[i]) * spacing;
      n2 += p[i] * p[i];
    }
    if (n2 <= keep2) {
      net.push_back(p);
    }
    std::size_t pos = 0;
    while (pos < q && idx[pos] == k) {
      idx[pos] = -k;
      ++pos;
    }
    if (pos == q) {
      break;
    }
    ++idx[pos];
  }
  return net;
}

// Candidate centers for one coarse ball. The top-q eigenvectors of the covariance of the
// points inside the ball span the high-variance space, searched by a translated tau-net over
// the shadow of the coarse ball; the remaining coordinates are fixed to the mean. q = 0 gives
// the mean alone.
inline std::vector<Vector> candidate_centers(const Ellipsoid& coarse, const PointSet& inside, std::size_t q,
                                             double tau,
                                             std::size_t net_cap = std::numeric_limits<std::size_t>::max()) {
  detail::require_dim(coarse.dim(), inside.dim(), "candidate_centers");
  const std::size_t d = inside.dim();
  detail::require(q <= d, "candidate_centers: q must be <= d");
  const double radius = coarse.radius();
  if (q == 0 || radius == 0.0) {
    return {mean_of(inside)};
  }
  const SpectralSummary s = summarize(inside);

  const auto net = grid_net(radius, q, tau, net_cap);
  // coordinates of the coarse center and of the mean in the high space
  Vector center_high(q), mean_high(q);
  for (std::size_t k = 0; k < q; ++k) {
    center_high[k] = dot(s.eigenvectors.row(k), coarse.center());
    mean_high[k] = dot(s.eigenvectors.row(k), s.mean);
  }
  std::vector<Vector> out;
  out.reserve(net.size());
  for (const auto& g : net) {
    Vector c = s.mean;
    for (std::size_t k = 0; k < q; ++k) {
      const double shift = center_high[k] + g[k] - mean_high[k];
      const auto v = s.eigenvectors.row(k);
      for (std::size_t j = 0; j < d; ++j) {
        c[j] += shift * v[j];
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Number of points y with |y - mu_hat|^2 <= |y - c|^2 + t^2 (sigma2 + tau^2). When sigma2
// bounds the top eigenvalue of the covariance of Y and |mu_hat - mean(Y)| <= tau, at least
// (1 - 1/t^2) |Y| points qualify.
inline std::size_t near_mean_count(const PointSet& pts, std::span<const double> c, std::span<const double> mu_hat,
                                   double sigma2, double tau, double t) {
  const double slack = t * t * (sigma2 + tau * tau);
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (squared_distance(pts[i], mu_hat) <= squared_distance(pts[i], c) + slack) {
      ++count;
    }
  }
  return count;
}

struct BallFit {
  Ellipsoid ball;
  std::size_t coverage = 0;
  double r_min = 0.0;
  CoarseBall best_coarse;
  std::size_t coarse_considered = 0;
  std::size_t coarse_skipped = 0;
  std::size_t centers_evaluated = 0;
};

namespace detail {

// Running argmin over balls with the geometry tie-break.
struct BestBall {
  bool set = false;
  double radius = 0.0;
  Vector center;

  void offer(std::span<const double> c, double r) {
    if (!set || r < radius || (r == radius && lexicographic_less(c, center))) {
      set = true;
      radius = r;
      center.assign(c.begin(), c.end());
    }
  }
};

inline std::vector<std::size_t> indices_inside(const PointSet& pts, const Ellipsoid& e) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (e.contains(pts[i])) {
      idx.push_back(i);
    }
  }
  return idx;
}

}  // namespace detail

// Proper ball learner: coarse pair balls, radius filter, coarse-to-fine refinement of each
// surviving ball, and a final search over B(c, |y - c|) for the smallest ball covering
// ceil(delta (1 - gamma) n) points. The coarse balls themselves stay in the candidate list.
inline BallFit dense_ball(const PointSet& pts, const BallSearchParams& params) {
  detail::check_fraction(params.delta, "delta", true);
  detail::check_fraction(params.gamma, "gamma", false);
  const std::size_t n = pts.size();
  const std::size_t d = pts.dim();
  if (n < 2) {
    throw InvalidArgument("dense_ball: at least two points are required");
  }
  const std::size_t target = required_count(params.delta * (1.0 - params.gamma), n);
  if (target < 1 || target > n) {
    throw Infeasible("dense_ball: coverage target out of range");
  }

  auto filtered = filter_by_rmin(coarse_balls(pts, params.delta));
  const std::size_t q = std::min(params.q.value_or(default_grid_dim(d)), d);
  const double tau = params.tau.value_or(default_net_tolerance(d, filtered.r_min));
  if (q > 0) {
    detail::require(tau > 0.0 || filtered.r_min == 0.0, "dense_ball: tau must be > 0");
  }

  BallFit fit;
  fit.r_min = filtered.r_min;
  fit.best_coarse = filtered.kept.front();
  fit.coarse_considered = filtered.kept.size();

  detail::BestBall best;
  for (const auto& cb : filtered.kept) {
    best.offer(pts[cb.center_index], cb.radius);
  }

  std::vector<double> scratch;
  const std::size_t net_cap = std::max<std::size_t>(1, params.candidate_cap / n);
  for (const auto& cb : filtered.kept) {
    const Ellipsoid coarse = cb.to_ellipsoid(pts);
    const std::size_t q_here = (cb.radius > 0.0 && tau > 0.0) ? q : 0;
    if (q_here > 0 && grid_net_size_bound(cb.radius, q_here, tau) > static_cast<double>(net_cap)) {
      // an explicit q is a request, so running over budget is an error; the default q is
      // only a heuristic and an oversized net just leaves the coarse ball unrefined
      if (params.q) {
        throw BudgetExceeded("dense_ball: grid net around coarse ball at point " + std::to_string(cb.center_index) +
                             " (radius " + std::to_string(cb.radius) + ") exceeds the candidate cap");
      }
      ++fit.coarse_skipped;
      continue;
    }
    const auto inside_idx = detail::indices_inside(pts, coarse);
    const PointSet inside = pts.subset(inside_idx);
    std::vector<Vector> centers;
    try {
      centers = candidate_centers(coarse, inside, q_here, tau, net_cap);
    } catch (const BudgetExceeded&) {
      if (params.q) {
        throw;
      }
      ++fit.coarse_skipped;
      continue;
    }
    for (const auto& c : centers) {
      best.offer(c, detail::kth_radius(pts, c, target, scratch));
      ++fit.centers_evaluated;
    }
  }

  fit.ball = Ellipsoid::ball(best.center, best.radius);
  fit.coverage = coverage_count(fit.ball, pts);
  return fit;
}

}  // namespace denseset
