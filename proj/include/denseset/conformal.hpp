#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "denseset/dense_ellipsoid.hpp"
#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

struct ConformalPredictor {
  Ellipsoid base;
  std::vector<double> grid;  // strictly ascending scalings; contains 1 (the base itself)
  std::size_t chosen_index = 0;
  double alpha = 0.1;
  std::size_t n_cal = 0;
  bool infeasible = false;  // the rank rule asked for more points than the calibration set holds

  double chosen_scaling() const { return grid.at(chosen_index); }
  Ellipsoid chosen_set() const { return scale(base, chosen_scaling()); }
};

struct ConformalParams {
  double alpha = 0.1;
  double gamma = 0.05;
  std::size_t grid_size = 64;
  std::uint64_t seed = 0;
  std::size_t coarse_limit = 32;
};

// ceil((1 - alpha)(n_cal + 1)): the split-conformal rank.
inline std::size_t conformal_rank(double alpha, std::size_t n_cal) {
  return required_count(1.0 - alpha, n_cal + 1);
}

// Builds the nested family {lambda_tau * base} from the calibration points and picks the
// smallest member that covers conformal_rank(alpha, n_cal) of them. lambda_tau is the smallest
// scaling covering ceil(tau n_cal) calibration points, tau on an equispaced grid over [0, 1].
// Points at infinite scaling (degenerate base) are never covered and never enter the grid.
inline ConformalPredictor calibrate_conformal(const Ellipsoid& base, const PointSet& cal, double alpha,
                                              std::size_t grid_size = 64) {
  detail::require(alpha > 0.0 && alpha < 1.0, "calibrate_conformal: alpha must lie in (0, 1)");
  detail::require(grid_size >= 2, "calibrate_conformal: grid size must be >= 2");
  detail::require_dim(base.dim(), cal.dim(), "calibrate_conformal");

  const std::size_t n_cal = cal.size();
  std::vector<double> scalings;
  scalings.reserve(n_cal);
  for (std::size_t i = 0; i < n_cal; ++i) {
    const double s2 = base.normalized_squared_norm(cal[i]);
    if (std::isfinite(s2)) {
      scalings.push_back(std::sqrt(s2));
    }
  }
  std::sort(scalings.begin(), scalings.end());

  ConformalPredictor p;
  p.base = base;
  p.alpha = alpha;
  p.n_cal = n_cal;
  p.grid.push_back(1.0);
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(grid_size - 1);
    const std::size_t count = required_count(tau, n_cal);
    if (count == 0) {
      p.grid.push_back(0.0);
    } else if (count <= scalings.size()) {
      p.grid.push_back(scalings[count - 1]);
    }
  }
  std::sort(p.grid.begin(), p.grid.end());
  p.grid.erase(std::unique(p.grid.begin(), p.grid.end()), p.grid.end());

  const std::size_t rank = conformal_rank(alpha, n_cal);
  p.infeasible = rank > n_cal;
  p.chosen_index = p.grid.size() - 1;
  if (!p.infeasible) {
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
      if (coverage_count(scale(base, p.grid[j]), cal) >= rank) {
        p.chosen_index = j;
        break;
      }
    }
  }
  return p;
}

// Split conformal predictor around dense_ellipsoid. Points are shuffled with `seed`, the
// first half fits the base set at coverage 1 - alpha + gamma with slack gamma / 2, and the
// second half calibrates. An odd point count drops the last shuffled point.
inline ConformalPredictor fit_conformal(const PointSet& pts, const ConformalParams& params) {
  detail::require(params.alpha > 0.0 && params.alpha < 1.0, "fit_conformal: alpha must lie in (0, 1)");
  detail::require(params.gamma > 0.0 && params.gamma < 1.0, "fit_conformal: gamma must lie in (0, 1)");
  if (pts.size() < 4) {
    throw InvalidArgument("fit_conformal: at least four points are required");
  }
  std::vector<std::size_t> order = all_indices(pts.size());
  std::mt19937_64 rng(params.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t half = pts.size() / 2;
  const std::span<const std::size_t> all(order);
  const PointSet train = pts.subset(all.subspan(0, half));
  const PointSet cal = pts.subset(all.subspan(half, half));

  EllipsoidParams ep;
  ep.delta = std::min(1.0, 1.0 - params.alpha + params.gamma);
  ep.gamma = params.gamma / 2.0;
  ep.coarse_limit = params.coarse_limit;
  const Ellipsoid base = dense_ellipsoid(train, ep).set;
  return calibrate_conformal(base, cal, params.alpha, params.grid_size);
}

inline bool predict_contains(const ConformalPredictor& p, std::span<const double> y) {
  detail::require_dim(p.base.dim(), y.size(), "predict_contains");
  return p.chosen_set().contains(y);
}

}  // namespace denseset
