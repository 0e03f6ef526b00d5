#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "denseset/dense_ball.hpp"
#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

// A base learner: (points, coverage level, slack) -> a set covering at least
// (1 - slack) * level * |points| of them.
using BaseLearner = std::function<Ellipsoid(const PointSet&, double, double)>;

struct GreedyParams {
  double delta = 0.5;
  double gamma = 0.1;
  std::size_t k = 1;
  double gamma_prime = 0.5;
  std::optional<std::size_t> max_rounds;  // default ceil(8 delta k / gamma) + 1
};

struct GreedyRound {
  Ellipsoid set;
  std::size_t level = 0;     // i in the coverage level 2^i / n
  std::size_t marginal = 0;  // newly covered points
  std::size_t covered_after = 0;
};

struct GreedyFit {
  CoverageSet union_set;
  std::vector<GreedyRound> rounds;
  std::size_t coverage = 0;
};

inline std::size_t greedy_round_cap(double delta, double gamma, std::size_t k) {
  return static_cast<std::size_t>(std::ceil(8.0 * delta * static_cast<double>(k) / gamma - 1e-12)) + 1;
}

// Finds an index i with a_i >= beta / (2k) and a_i / b_i >= gamma / 2, which exists whenever
// sum(a) >= beta and sum(a) / sum(b) >= gamma for nonnegative a, b of length k. b_i = 0 counts
// as infinite ratio when a_i > 0.
inline std::optional<std::size_t> check_averaging(std::span<const double> a, std::span<const double> b, double beta,
                                                  double gamma, std::size_t k) {
  detail::require(a.size() == k && b.size() == k, "check_averaging: a and b must have length k");
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] < beta / (2.0 * static_cast<double>(k))) {
      continue;
    }
    if (b[i] == 0.0 ? a[i] > 0.0 : a[i] >= 0.5 * gamma * b[i]) {
      return i;
    }
  }
  return std::nullopt;
}

// Greedy union by marginal density. Each round runs the base learner on the uncovered points
// at levels 2^i / n, keeps the sets whose marginal count reaches
// ceil((1 - gamma') gamma n / (4k)), and adds the one with the most newly covered points per
// unit volume. Stops once more than delta n points are covered.
inline GreedyFit greedy_union(const PointSet& pts, const GreedyParams& params, const BaseLearner& base) {
  detail::check_fraction(params.delta, "delta", false);
  detail::check_fraction(params.gamma, "gamma", false);
  detail::check_fraction(params.gamma_prime, "gamma_prime", false);
  detail::require(params.delta + params.gamma <= 1.0 + 1e-12, "greedy_union: delta + gamma must be <= 1");
  detail::require(params.k >= 1, "greedy_union: k must be >= 1");
  detail::require(static_cast<bool>(base), "greedy_union: missing base learner");

  const std::size_t n = pts.size();
  const auto nd = static_cast<double>(n);
  const std::size_t cap = params.max_rounds.value_or(greedy_round_cap(params.delta, params.gamma, params.k));
  const std::size_t qualify = std::max<std::size_t>(
      1, required_count((1.0 - params.gamma_prime) * params.gamma / (4.0 * static_cast<double>(params.k)), n));
  const auto levels = static_cast<std::size_t>(std::ceil(std::log2(nd)));

  GreedyFit fit;
  std::vector<std::size_t> residual = all_indices(n);
  while (static_cast<double>(fit.coverage) <= params.delta * nd) {
    if (fit.rounds.size() >= cap) {
      throw Infeasible("greedy_union: round cap of " + std::to_string(cap) + " exceeded");
    }
    if (residual.size() < 2) {
      throw Infeasible("greedy_union: fewer than two uncovered points left");
    }
    const PointSet rest = pts.subset(residual);

    std::optional<GreedyRound> pick;
    double pick_density = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= levels; ++i) {
      const double level = std::ldexp(1.0, static_cast<int>(i)) / nd;
      if (level > 1.0) {
        continue;
      }
      Ellipsoid s;
      try {
        s = base(rest, level, params.gamma_prime);
      } catch (const Infeasible&) {
        continue;
      }
      const std::size_t marginal = coverage_count(s, rest);
      if (marginal < qualify) {
        continue;
      }
      const double density = std::log(static_cast<double>(marginal)) - s.log_volume();
      if (!pick || density > pick_density || (density == pick_density && volume_order_less(s, pick->set))) {
        pick = GreedyRound{std::move(s), i, marginal, 0};
        pick_density = density;
      }
    }
    if (!pick) {
      throw Infeasible("greedy_union: no base set reached the marginal coverage threshold in round " +
                       std::to_string(fit.rounds.size()));
    }

    std::vector<std::size_t> next;
    next.reserve(residual.size());
    for (std::size_t idx : residual) {
      if (!pick->set.contains(pts[idx])) {
        next.push_back(idx);
      }
    }
    residual = std::move(next);
    fit.coverage += pick->marginal;
    pick->covered_after = fit.coverage;
    fit.union_set.add(pick->set);
    fit.rounds.push_back(std::move(*pick));
  }
  return fit;
}

}  // namespace denseset
