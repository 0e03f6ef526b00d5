#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"
#include "denseset/spectral.hpp"

namespace denseset {

struct ListDecodingOptions {
  double list_constant = 8.0;     // list length <= ceil(list_constant / delta)
  double variance_factor = 16.0;  // filter while lambda_max > variance_factor * sigma2 / delta
  double trim_fraction = 0.05;    // share of points removed per filter step
  std::size_t restart_factor = 8; // restarts = ceil(4 / delta) * restart_factor
};

struct MeanCandidateList {
  std::vector<Vector> candidates;
  std::uint64_t seed = 0;
  double sigma2 = 0.0;
  double delta = 0.0;
};

namespace detail {

struct FilterOutcome {
  Vector mean;
  bool converged = false;
  double lambda_max = 0.0;
};

// Spectral filter: drops the points with the largest squared projection on the top
// eigenvector until the top eigenvalue is at most `threshold` or the set would shrink below
// `floor_size`.
inline FilterOutcome spectral_filter(const PointSet& pts, std::vector<std::size_t> members, double threshold,
                                     double trim_fraction, std::size_t floor_size) {
  while (true) {
    const SpectralSummary s = summarize(pts, members);
    if (s.lambda_max() <= threshold) {
      return {s.mean, true, s.lambda_max()};
    }
    const auto drop = static_cast<std::size_t>(std::ceil(trim_fraction * static_cast<double>(members.size())));
    if (members.size() < floor_size + drop) {
      return {s.mean, false, s.lambda_max()};
    }
    const auto top = s.eigenvectors.row(0);
    std::vector<std::pair<double, std::size_t>> score;
    score.reserve(members.size());
    for (std::size_t idx : members) {
      double p = 0.0;
      const auto y = pts[idx];
      for (std::size_t j = 0; j < y.size(); ++j) {
        p += (y[j] - s.mean[j]) * top[j];
      }
      score.emplace_back(p * p, idx);
    }
    std::sort(score.begin(), score.end());
    members.clear();
    for (std::size_t i = 0; i + drop < score.size(); ++i) {
      members.push_back(score[i].second);
    }
    std::sort(members.begin(), members.end());
  }
}

inline std::vector<std::size_t> nearest_indices(const PointSet& pts, std::span<const double> center, std::size_t m) {
  std::vector<std::pair<double, std::size_t>> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d2[i] = {squared_distance(pts[i], center), i};
  }
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(m - 1), d2.end());
  std::vector<std::size_t> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back(d2[i].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Short list of candidate means, one of which should be close to the mean of an unknown
// inlier subset holding a delta fraction of the points whose covariance is bounded by sigma2.
//
// Each restart samples ceil(1/delta) seed points, takes the ceil(delta n) nearest points of
// each and runs the spectral filter on them. Surviving means are merged when closer than
// sqrt(sigma2)/4 and ranked by (filter converged, votes, final top eigenvalue); the list keeps
// the first ceil(list_constant / delta). Restart r draws from its own stream seeded by
// (seed, r).
inline MeanCandidateList list_decodable_means(const PointSet& pts, double delta, double sigma2, std::uint64_t seed,
                                              const ListDecodingOptions& opts = {}) {
  detail::require(delta > 0.0 && delta <= 1.0, "list_decodable_means: delta must lie in (0, 1]");
  detail::require(sigma2 >= 0.0 && std::isfinite(sigma2), "list_decodable_means: sigma2 must be finite and >= 0");
  const std::size_t n = pts.size();
  if (delta * static_cast<double>(n) < 2.0) {
    throw InvalidArgument("list_decodable_means: too few inliers (delta * n < 2)");
  }

  MeanCandidateList out;
  out.seed = seed;
  out.sigma2 = sigma2;
  out.delta = delta;
  const auto max_len = static_cast<std::size_t>(std::ceil(opts.list_constant / delta));
  const std::size_t m = required_count(delta, n);
  const std::size_t floor_size = std::max<std::size_t>(1, required_count(delta / 2.0, n));

  if (delta == 1.0) {
    out.candidates.push_back(mean_of(pts));
    return out;
  }

  if (sigma2 == 0.0) {
    // Zero variance: inliers are exact duplicates. Every point value repeated at least
    // floor_size times is a candidate, most frequent first.
    std::vector<std::size_t> order = all_indices(n);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lexicographic_less(pts[a], pts[b]); });
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // (count, representative)
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && !lexicographic_less(pts[order[i]], pts[order[j]])) {
        ++j;
      }
      if (j - i >= floor_size) {
        groups.emplace_back(j - i, order[i]);
      }
      i = j;
    }
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [count, rep] : groups) {
      if (out.candidates.size() == max_len) {
        break;
      }
      out.candidates.emplace_back(pts[rep].begin(), pts[rep].end());
    }
    if (!out.candidates.empty()) {
      return out;
    }
  }

  const double threshold = opts.variance_factor * sigma2 / delta;
  const std::size_t restarts = static_cast<std::size_t>(std::ceil(4.0 / delta)) * opts.restart_factor;
  const auto seeds_per_restart = static_cast<std::size_t>(std::ceil(1.0 / delta));

  std::vector<detail::FilterOutcome> outcomes;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(sq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < seeds_per_restart; ++s) {
      const std::size_t anchor = pick(rng);
      auto members = detail::nearest_indices(pts, pts[anchor], m);
      outcomes.push_back(detail::spectral_filter(pts, std::move(members), threshold, opts.trim_fraction, floor_size));
    }
  }

  std::sort(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) {
    if (a.converged != b.converged) {
      return a.converged;
    }
    if (a.lambda_max != b.lambda_max) {
      return a.lambda_max < b.lambda_max;
    }
    return lexicographic_less(a.mean, b.mean);
  });

  struct Cluster {
    std::size_t first;  // index into outcomes of the representative
    std::size_t votes;
  };
  std::vector<Cluster> clusters;
  const double merge2 = sigma2 / 16.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    bool merged = false;
    for (auto& c : clusters) {
      if (squared_distance(outcomes[c.first].mean, outcomes[i].mean) <= merge2) {
        ++c.votes;
        merged = true;
        break;
      }
    }
    if (!merged) {
      clusters.push_back({i, 1});
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(), [&](const Cluster& a, const Cluster& b) {
    const auto& oa = outcomes[a.first];
    const auto& ob = outcomes[b.first];
    if (oa.converged != ob.converged) {
      return oa.converged;
    }
    return a.votes > b.votes;
  });
  for (const auto& c : clusters) {
    if (out.candidates.size() == max_len) {
      break;
    }
    out.candidates.push_back(outcomes[c.first].mean);
  }
  return out;
}

}  // namespace denseset
