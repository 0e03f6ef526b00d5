#pragma once

#include <cstddef>
#include <cstdint>

#include "denseset/dense_ball.hpp"
#include "denseset/robust_mean.hpp"

namespace denseset {

struct IsotropicBallParams {
  double delta = 0.5;
  double gamma = 0.1;
  double beta = 1.0;  // inlier covariance assumed dominated by beta R^2 / d
  std::uint64_t seed = 0;
  ListDecodingOptions list_options{};
};

// Ball learner for inliers with near-isotropic covariance. The coarse stage only supplies
// R_min; centers come from list-decodable mean estimation with variance beta R_min^2 / d. The
// best coarse ball stays in the candidate list.
inline BallFit dense_ball_isotropic(const PointSet& pts, const IsotropicBallParams& params) {
  detail::check_fraction(params.delta, "delta", true);
  detail::check_fraction(params.gamma, "gamma", false);
  detail::require(params.beta > 0.0 && std::isfinite(params.beta), "dense_ball_isotropic: beta must be > 0");
  const std::size_t n = pts.size();
  const std::size_t d = pts.dim();
  if (n < 2) {
    throw InvalidArgument("dense_ball_isotropic: at least two points are required");
  }
  const std::size_t target = required_count(params.delta * (1.0 - params.gamma), n);
  if (target < 1 || target > n) {
    throw Infeasible("dense_ball_isotropic: coverage target out of range");
  }

  const auto tight = tight_coarse_balls(pts, params.delta);
  BallFit fit;
  fit.best_coarse = tight.front();
  fit.r_min = tight.front().radius;
  fit.coarse_considered = tight.size();

  detail::BestBall best;
  best.offer(pts[fit.best_coarse.center_index], fit.best_coarse.radius);

  const double sigma2 = params.beta * fit.r_min * fit.r_min / static_cast<double>(d);
  if (params.delta * static_cast<double>(n) >= 2.0) {
    const auto list = list_decodable_means(pts, params.delta, sigma2, params.seed, params.list_options);
    std::vector<double> scratch;
    for (const auto& c : list.candidates) {
      best.offer(c, detail::kth_radius(pts, c, target, scratch));
      ++fit.centers_evaluated;
    }
  }

  fit.ball = Ellipsoid::ball(best.center, best.radius);
  fit.coverage = coverage_count(fit.ball, pts);
  return fit;
}

}  // namespace denseset
