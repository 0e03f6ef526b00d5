#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

struct GeneratorSpec {
  std::string family;
  std::size_t n = 0;
  std::size_t d = 0;
  double delta = 0.0;
  double r_star = 1.0;
  double outlier_scale = 2.0;
  std::size_t k = 1;  // k_high for pancake, cluster count for clusters
  double separation = 0.0;
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  PointSet points;
  Ellipsoid planted;
  std::vector<std::size_t> inlier_indices;  // ascending
  GeneratorSpec spec;
};

namespace detail {

inline Vector gaussian_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (auto& x : v) {
    x = g(rng);
  }
  return v;
}

inline Vector unit_direction(std::size_t d, std::mt19937_64& rng) {
  while (true) {
    Vector v = gaussian_vector(d, rng);
    const double len = norm(v);
    if (len > 1e-300) {
      for (auto& x : v) {
        x /= len;
      }
      return v;
    }
  }
}

inline Vector uniform_in_ball(std::span<const double> center, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v = unit_direction(center.size(), rng);
  const double r = radius * std::pow(u(rng), 1.0 / static_cast<double>(center.size()));
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = center[j] + r * v[j];
  }
  return v;
}

// Uniform in the shell a <= |x - center| <= 2a. The radius CDF is (r^d - a^d) / ((2a)^d - a^d),
// inverted in log space so large d does not overflow.
inline Vector uniform_in_shell(std::span<const double> center, double a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto d = static_cast<double>(center.size());
  Vector v = unit_direction(center.size(), rng);
  const double big = std::expm1(d * std::log(2.0));
  const double r = a * std::exp(std::log1p(u(rng) * big) / d);
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = center[j] + std::min(r, 2.0 * a) * v[j];
  }
  return v;
}

inline Vector uniform_in_cube(std::size_t d, double half, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-half, half);
  Vector v(d);
  for (auto& x : v) {
    x = u(rng);
  }
  return v;
}

// Gram-Schmidt on Gaussian draws: k orthonormal vectors in R^d.
inline std::vector<Vector> random_orthonormal(std::size_t k, std::size_t d, std::mt19937_64& rng) {
  std::vector<Vector> out;
  while (out.size() < k) {
    Vector v = gaussian_vector(d, rng);
    for (const auto& u : out) {
      const double c = dot(v, u);
      for (std::size_t j = 0; j < d; ++j) {
        v[j] -= c * u[j];
      }
    }
    const double len = norm(v);
    if (len < 1e-8) {
      continue;
    }
    for (auto& x : v) {
      x /= len;
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Shuffles rows, returning the new positions of the first `inliers` rows in ascending order.
inline std::pair<PointSet, std::vector<std::size_t>> shuffle_rows(std::vector<Vector> rows, std::size_t inliers,
                                                                  std::mt19937_64& rng) {
  std::vector<std::size_t> perm = all_indices(rows.size());
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vector> out(rows.size());
  std::vector<std::size_t> inlier_pos;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = std::move(rows[perm[i]]);
    if (perm[i] < inliers) {
      inlier_pos.push_back(i);
    }
  }
  return {PointSet::from_rows(out), inlier_pos};
}

inline void check_generator_args(std::size_t n, std::size_t d, double delta) {
  require(n >= 1, "generator: n must be >= 1");
  require(d >= 1, "generator: d must be >= 1");
  require(delta > 0.0 && delta <= 1.0, "generator: delta must lie in (0, 1]");
}

}  // namespace detail

// ceil(delta n) inliers uniform in B(c*, R*) with c* uniform in [-1, 1]^d; the rest uniform in
// the shell between outlier_scale R* and 2 outlier_scale R* around c*.
inline PlantedInstance gen_planted(std::size_t n, std::size_t d, double delta, double r_star, double outlier_scale,
                                   std::uint64_t seed) {
  detail::check_generator_args(n, d, delta);
  detail::require(r_star > 0.0 && std::isfinite(r_star), "gen_planted: R* must be > 0");
  detail::require(outlier_scale >= 2.0 && std::isfinite(outlier_scale), "gen_planted: outlier scale must be >= 2");
  std::mt19937_64 rng(seed);
  const Vector c = detail::uniform_in_cube(d, 1.0, rng);
  const std::size_t m = required_count(delta, n);
  std::vector<Vector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < m; ++i) {
    rows.push_back(detail::uniform_in_ball(c, r_star, rng));
  }
  for (std::size_t i = m; i < n; ++i) {
    rows.push_back(detail::uniform_in_shell(c, outlier_scale * r_star, rng));
  }
  auto [pts, inl] = detail::shuffle_rows(std::move(rows), m, rng);
  PlantedInstance inst{std::move(pts), Ellipsoid::ball(c, r_star), std::move(inl),
                       GeneratorSpec{"planted", n, d, delta, r_star, outlier_scale, 1, 0.0, seed}};
  for (std::size_t i : inst.inlier_indices) {
    if (!inst.planted.contains(inst.points[i])) {
      throw Error("gen_planted: inlier escaped the planted ball");
    }
  }
  return inst;
}

// Inliers: Gaussian with variance R*^2 / k_high along k_high random orthonormal directions and
// R*^2 1e-4 / d elsewhere, rejection-truncated to B(c*, R*). Outliers as in gen_planted.
inline PlantedInstance gen_pancake(std::size_t n, std::size_t d, std::size_t k_high, double delta, std::uint64_t seed,
                                   double r_star = 1.0, double outlier_scale = 2.0) {
  detail::check_generator_args(n, d, delta);
  detail::require(k_high >= 1 && k_high < d, "gen_pancake: k_high must lie in [1, d)");
  detail::require(r_star > 0.0 && std::isfinite(r_star), "gen_pancake: R* must be > 0");
  detail::require(outlier_scale >= 2.0, "gen_pancake: outlier scale must be >= 2");
  std::mt19937_64 rng(seed);
  const Vector c = detail::uniform_in_cube(d, 1.0, rng);
  const auto high = detail::random_orthonormal(k_high, d, rng);
  const double sd_high = r_star / std::sqrt(static_cast<double>(k_high));
  const double sd_low = r_star * 1e-2 / std::sqrt(static_cast<double>(d));
  const std::size_t m = required_count(delta, n);
  std::vector<Vector> rows;
  rows.reserve(n);
  std::normal_distribution<double> g(0.0, 1.0);
  while (rows.size() < m) {
    // isotropic low part, then replace the high components
    Vector x = detail::gaussian_vector(d, rng);
    for (auto& v : x) {
      v *= sd_low;
    }
    for (const auto& u : high) {
      const double cur = dot(x, u);
      const double want = sd_high * g(rng);
      for (std::size_t j = 0; j < d; ++j) {
        x[j] += (want - cur) * u[j];
      }
    }
    if (squared_norm(x) > r_star * r_star) {
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) {
      x[j] += c[j];
    }
    rows.push_back(std::move(x));
  }
  for (std::size_t i = m; i < n; ++i) {
    rows.push_back(detail::uniform_in_shell(c, outlier_scale * r_star, rng));
  }
  auto [pts, inl] = detail::shuffle_rows(std::move(rows), m, rng);
  return PlantedInstance{std::move(pts), Ellipsoid::ball(c, r_star), std::move(inl),
                         GeneratorSpec{"pancake", n, d, delta, r_star, outlier_scale, k_high, 0.0, seed}};
}

struct ClusterInstance {
  PointSet points;
  std::vector<Ellipsoid> planted;                  // k unit balls
  std::vector<std::vector<std::size_t>> members;  // per cluster, ascending
  GeneratorSpec spec;
};

// ceil(delta n) inliers split as evenly as possible over k unit balls whose centers are at
// least `separation` apart; the rest uniform in a surrounding cube, kept at distance >= 2 from
// every cluster center.
inline ClusterInstance gen_clusters(std::size_t n, std::size_t d, std::size_t k, double delta, double separation,
                                    std::uint64_t seed) {
  detail::check_generator_args(n, d, delta);
  detail::require(k >= 1, "gen_clusters: k must be >= 1");
  detail::require(separation >= 4.0 && std::isfinite(separation), "gen_clusters: separation must be >= 4");
  std::mt19937_64 rng(seed);
  const double half = separation * static_cast<double>(k);
  std::vector<Vector> centers;
  for (std::size_t attempt = 0; centers.size() < k; ++attempt) {
    if (attempt > 100000) {
      throw Error("gen_clusters: could not place separated centers");
    }
    Vector c = detail::uniform_in_cube(d, half, rng);
    bool ok = true;
    for (const auto& o : centers) {
      ok = ok && distance(c, o) >= separation;
    }
    if (ok) {
      centers.push_back(std::move(c));
    }
  }
  const std::size_t m = required_count(delta, n);
  std::vector<Vector> rows;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < m; ++i) {
    rows.push_back(detail::uniform_in_ball(centers[i % k], 1.0, rng));
    owner.push_back(i % k);
  }
  const double outer = half + separation;
  while (rows.size() < n) {
    Vector x = detail::uniform_in_cube(d, outer, rng);
    bool far = true;
    for (const auto& c : centers) {
      far = far && distance(x, c) >= 2.0;
    }
    if (far) {
      rows.push_back(std::move(x));
    }
  }
  std::vector<std::size_t> perm = all_indices(n);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vector> out(n);
  ClusterInstance inst;
  inst.members.resize(k);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::move(rows[perm[i]]);
    if (perm[i] < m) {
      inst.members[owner[perm[i]]].push_back(i);
    }
  }
  inst.points = PointSet::from_rows(out);
  for (auto& c : centers) {
    inst.planted.push_back(Ellipsoid::ball(std::move(c), 1.0));
  }
  inst.spec = GeneratorSpec{"clusters", n, d, delta, 1.0, 0.0, k, separation, seed};
  return inst;
}

using Edge = std::pair<std::size_t, std::size_t>;

// One 0/1 incidence row per vertex, columns indexed by edge, zero-padded to pad_dim.
inline PointSet incidence_points(const std::vector<Edge>& edges, std::size_t n_vertices, std::size_t pad_dim) {
  detail::require(n_vertices >= 1, "incidence_points: at least one vertex is required");
  detail::require(pad_dim >= edges.size() && pad_dim >= 1, "incidence_points: pad_dim must be >= edge count");
  std::vector<double> flat(n_vertices * pad_dim, 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    detail::require(u < n_vertices && v < n_vertices && u != v, "incidence_points: bad edge");
    flat[u * pad_dim + e] = 1.0;
    flat[v * pad_dim + e] = 1.0;
  }
  return PointSet(pad_dim, std::move(flat));
}

// Configuration model: pair up n Δ stubs uniformly, reject loops and multi-edges.
inline std::vector<Edge> random_regular_graph(std::size_t n_vertices, std::size_t degree, std::uint64_t seed) {
  detail::require(degree >= 1 && degree < n_vertices, "random_regular_graph: degree must lie in [1, n)");
  detail::require((degree * n_vertices) % 2 == 0, "random_regular_graph: degree * n must be even");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> stubs;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    stubs.insert(stubs.end(), degree, v);
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<Edge> seen;
    std::vector<Edge> edges;
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
      Edge e{std::min(stubs[i], stubs[i + 1]), std::max(stubs[i], stubs[i + 1])};
      simple = e.first != e.second && seen.insert(e).second;
      edges.push_back(e);
    }
    if (simple) {
      std::sort(edges.begin(), edges.end());
      return edges;
    }
  }
  throw Infeasible("random_regular_graph: no simple graph found in 1000 resamples");
}

inline PointSet gen_incidence_hard(std::size_t n_vertices, std::size_t degree, std::size_t pad_dim,
                                   std::uint64_t seed) {
  const auto edges = random_regular_graph(n_vertices, degree, seed);
  return incidence_points(edges, n_vertices, pad_dim);
}

}  // namespace denseset
