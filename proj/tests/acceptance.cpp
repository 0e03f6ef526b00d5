// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "denseset/conformal.hpp"
#include "denseset/datagen.hpp"
#include "denseset/dense_ball.hpp"
#include "denseset/dense_ball_isotropic.hpp"
#include "denseset/dense_ellipsoid.hpp"
#include "denseset/greedy_union.hpp"
#include "denseset/io/json.hpp"
#include "denseset/oracle.hpp"
#include "denseset/spectral.hpp"

using namespace denseset;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

BallSearchParams ball_params(double delta, double gamma) {
  BallSearchParams p;
  p.delta = delta;
  p.gamma = gamma;
  return p;
}

IsotropicBallParams iso_params(double delta, double gamma, std::uint64_t seed) {
  IsotropicBallParams p;
  p.delta = delta;
  p.gamma = gamma;
  p.seed = seed;
  return p;
}

EllipsoidParams ell_params(double delta, double gamma) {
  EllipsoidParams p;
  p.delta = delta;
  p.gamma = gamma;
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct SmallInstance {
  PlantedInstance inst;
  double delta;
  double gamma;
  std::size_t m;
};

// 50 tiny planted instances: d in {2,3}, n in [6,14], m = ceil(delta n) in [3,8].
std::vector<SmallInstance> small_family() {
  std::vector<SmallInstance> out;
  for (std::uint64_t s = 0; out.size() < 50; ++s) {
    const std::size_t d = 2 + s % 2;
    const std::size_t n = 6 + s % 9;
    const double delta = 0.4 + 0.05 * static_cast<double>(s % 5);
    const std::size_t m = required_count(delta, n);
    if (m < 3 || m > 8) {
      continue;
    }
    out.push_back({gen_planted(n, d, delta, 1.0, 2.0, 1000 + s), delta, 0.1 + 0.05 * static_cast<double>(s % 3), m});
  }
  return out;
}

void criterion_1_2() {
  const auto t0 = Clock::now();
  const auto family = small_family();
  bool ok1 = true;
  bool ok2 = true;
  double worst = 0.0;
  double worst_bracket = 0.0;
  for (const auto& si : family) {
    const PointSet& y = si.inst.points;
    const Ellipsoid opt = opt_k_ball(y, si.m).ball;
    const std::size_t need = required_count((1.0 - si.gamma) * si.delta, y.size());
    const std::vector<Ellipsoid> outs{
        dense_ball(y, ball_params(si.delta, si.gamma)).ball,
        dense_ball_isotropic(y, iso_params(si.delta, si.gamma, 7)).ball,
        dense_ellipsoid(y, ell_params(si.delta, si.gamma)).set,
    };
    for (const auto& e : outs) {
      const double r = volume_ratio_per_dim(e, opt);
      worst = std::max(worst, r);
      ok1 = ok1 && coverage_count(e, y) >= need && r <= 2.0 + 1e-9;
    }
    const double r_min = filter_by_rmin(coarse_balls(y, si.delta)).r_min;
    const double r_star = opt.radius();
    worst_bracket = std::max(worst_bracket, r_min / r_star);
    ok2 = ok2 && r_star <= r_min && r_min <= 2.0 * r_star;
  }
  const double secs = seconds_since(t0);
  report(1, "oracle equivalence / safety floor", ok1 && secs < 60.0,
         fmt("50 instances x 3 learners, worst per-dim ratio vs oracle %.4f (<= 2), %.1f s", worst, secs));
  report(2, "coarse-stage bracket", ok2, fmt("max R_min / R* = %.4f over 50 instances (must lie in [1, 2])", worst_bracket));
}

void criterion_3() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  int checks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 8;
    const Vector c = denseset::detail::uniform_in_cube(d, 3.0, rng);
    const double r = 0.1 + 3.0 * u(rng);
    std::vector<Vector> rows;
    const std::size_t n = 3 + trial % 60;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back(denseset::detail::uniform_in_ball(c, r, rng));
    }
    const PointSet y = PointSet::from_rows(rows);
    const auto s = summarize(y);
    const double tau = r * u(rng);
    Vector mu_hat = s.mean;
    const Vector dir = denseset::detail::unit_direction(d, rng);
    const double off = tau * u(rng);
    for (std::size_t j = 0; j < d; ++j) {
      mu_hat[j] += off * dir[j];
    }
    for (double t : {1.5, 2.0, 3.0}) {
      const std::size_t cnt = near_mean_count(y, c, mu_hat, s.lambda_max(), tau, t);
      ++checks;
      violations += static_cast<double>(cnt) >= (1.0 - 1.0 / (t * t)) * static_cast<double>(n) ? 0 : 1;
    }
  }
  report(3, "near-mean counting lemma", violations == 0,
         fmt("%.0f violations in %.0f checks (200 configurations x 3 values of t)", violations, checks));
}

void criterion_4() {
  std::mt19937_64 rng(41);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 6;
    const std::size_t n = 5 + trial % 40;
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back(denseset::detail::uniform_in_cube(d, 2.0, rng));
    }
    const PointSet y = PointSet::from_rows(rows);
    std::vector<std::size_t> idx = all_indices(n);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(1 + static_cast<std::size_t>(rng() % n));
    const double delta = static_cast<double>(idx.size()) / static_cast<double>(n);
    const auto all = summarize(y);
    const auto sub = summarize(y, idx);
    const double sigma = std::sqrt(std::max(0.0, all.lambda_max()));
    const bool var_ok = sub.lambda_max() <= all.lambda_max() / delta * (1.0 + 1e-9) + 1e-12;
    const bool mean_ok =
        distance(sub.mean, all.mean) <= sigma * std::sqrt(2.0 * (1.0 - delta) / delta) * (1.0 + 1e-9) + 1e-12;
    violations += var_ok && mean_ok ? 0 : 1;
  }
  report(4, "conditional mean / variance lemmas", violations == 0, fmt("%.0f violations in 200 subsets", violations));
}

void criterion_5() {
  std::mt19937_64 rng(51);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 15;
    const double r = 0.5 + 0.05 * trial;
    const Vector c = denseset::detail::uniform_in_cube(d, 5.0, rng);
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < 2 + static_cast<std::size_t>(trial) % 50; ++i) {
      rows.push_back(denseset::detail::uniform_in_ball(c, r, rng));
    }
    const auto s = summarize(PointSet::from_rows(rows));
    for (std::size_t q : {1u, 2u, 4u, 8u}) {
      violations += count_eigs_above(s, r * r / static_cast<double>(q)) <= q ? 0 : 1;
    }
  }
  report(5, "eigenvalue counting", violations == 0, fmt("%.0f violations in 400 checks", violations));
}

void criterion_6() {
  const auto t0 = Clock::now();
  const double delta = 0.5;
  const double gamma = 0.2;
  const double envelope = 20.0;
  std::vector<double> med_ratio;
  std::vector<double> med_stat;
  std::string detail;
  for (std::size_t d : {16u, 64u, 256u}) {
    std::vector<double> ratios;
    std::vector<double> stats;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = gen_planted(20 * d, d, delta, 1.0, 2.0, 600 + seed);
      const auto fit = dense_ellipsoid(inst.points, ell_params(delta, gamma));
      const double r = volume_ratio_per_dim(fit.set, inst.planted);
      ratios.push_back(r);
      stats.push_back((r - 1.0) * std::sqrt(static_cast<double>(d)) * gamma * delta);
    }
    med_ratio.push_back(median(ratios));
    med_stat.push_back(median(stats));
    // covering only (1 - gamma) of the inliers lets a ball beat the planted one by about (1 - gamma)^{1/d}
    const double floor_ratio = std::pow(1.0 - gamma, 1.0 / static_cast<double>(d));
    detail += fmt("d=%.0f median ratio %.5f stat %.4f (ratio / (1-gamma)^(1/d) = %.5f); ", static_cast<double>(d),
                  med_ratio.back(), med_stat.back(), med_ratio.back() / floor_ratio);
  }
  const bool envelope_ok = *std::max_element(med_stat.begin(), med_stat.end()) <= envelope;
  const bool direction_ok = med_ratio[2] < med_ratio[0];
  const double secs = seconds_since(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "envelope<=20 %s, d=256 below d=16 %s, %.0f s", envelope_ok ? "ok" : "violated",
                direction_ok ? "ok" : "violated", secs);
  report(6, "ellipsoid rate trend", envelope_ok && direction_ok && secs < 600.0, detail + buf);
}

void criterion_7() {
  bool ok = true;
  double worst_gap = -1e9;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::size_t k = 1 + i % 2;
    const auto inst = gen_pancake(640, 32, k, 0.5, 700 + i);
    const double re = volume_ratio_per_dim(dense_ellipsoid(inst.points, ell_params(0.5, 0.2)).set, inst.planted);
    const double rb = volume_ratio_per_dim(dense_ball(inst.points, ball_params(0.5, 0.2)).ball, inst.planted);
    worst_gap = std::max(worst_gap, re - rb);
    ok = ok && re <= rb;
  }
  report(7, "pancake dominance", ok, fmt("max (ellipsoid - ball) per-dim ratio = %.4f over 10 instances", worst_gap));
}

void criterion_8() {
  const double bound = std::sqrt(1.0 + 50.0 / (0.2 * 0.5 * 64.0));
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto inst = gen_planted(800, 64, 0.5, 1.0, 2.0, 800 + i);
    const double r = dense_ball_isotropic(inst.points, iso_params(0.5, 0.2, i)).ball.radius();
    worst = std::max(worst, r);
    within += r <= bound * inst.planted.radius() ? 1 : 0;
  }
  report(8, "isotropic ball bound", within >= 18,
         fmt("%.0f/20 within R*·%.4f, largest radius %.4f", within, bound, worst));
}

void criterion_9() {
  bool ok = true;
  std::size_t max_rounds = 0;
  const BaseLearner base = [](const PointSet& y, double level, double slack) {
    return dense_ball(y, ball_params(level, slack)).ball;
  };
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t k = 2 + i % 2;
    const auto inst = gen_clusters(150, 2 + i % 3, k, 0.7, 6.0, 900 + i);
    GreedyParams p;
    p.delta = 0.6;
    p.gamma = 0.2;
    p.k = k;
    try {
      const auto fit = greedy_union(inst.points, p, base);
      max_rounds = std::max(max_rounds, fit.rounds.size());
      ok = ok && fit.rounds.size() <= greedy_round_cap(p.delta, p.gamma, k) &&
           static_cast<double>(coverage_count(fit.union_set, inst.points)) > p.delta * 150.0;
    } catch (const Error&) {
      ok = false;
    }
  }
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int missing = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t k = 1 + t % 10;
    Vector a(k), b(k);
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      a[i] = u(rng) < 0.25 ? 0.0 : u(rng);
      b[i] = u(rng) < 0.1 ? 0.0 : 2.0 * u(rng);
      sa += a[i];
      sb += b[i];
    }
    if (sa == 0.0) {
      a[0] = 1.0;
      sa = 1.0;
    }
    const double beta = sa * u(rng);
    const double gamma = sb > 0.0 ? sa / sb * u(rng) : u(rng);
    missing += check_averaging(a, b, beta, gamma, k).has_value() ? 0 : 1;
  }
  report(9, "greedy union contract", ok && missing == 0,
         fmt("20 cluster instances, max rounds %.0f; averaging witness missing in %.0f/10000 tuples",
             static_cast<double>(max_rounds), missing));
}

void criterion_10() {
  // Fixed dataset, random permutations; fit on the first n-1 points and test the held-out last.
  const double alpha = 0.1;
  const int trials = 200;
  std::mt19937_64 rng(101);
  std::vector<Vector> rows;
  for (int i = 0; i < 401; ++i) {
    rows.push_back(denseset::detail::uniform_in_ball(Vector(8, 0.0), 1.0, rng));
  }
  int hits = 0;
  bool nested = true;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::size_t> perm = all_indices(rows.size());
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vector> train;
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
      train.push_back(rows[perm[i]]);
    }
    const PointSet y = PointSet::from_rows(train);
    ConformalParams cp;
    cp.alpha = alpha;
    cp.seed = static_cast<std::uint64_t>(t);
    const auto p = fit_conformal(y, cp);
    hits += predict_contains(p, rows[perm.back()]) ? 1 : 0;
    std::size_t prev = 0;
    for (double g : p.grid) {
      const std::size_t c = coverage_count(scale(p.base, g), y);
      nested = nested && c >= prev;
      prev = c;
    }
  }
  const double rate = static_cast<double>(hits) / trials;
  const double floor = 1.0 - alpha - 3.0 * std::sqrt(alpha * (1.0 - alpha) / trials);
  report(10, "conformal coverage", rate >= floor && nested,
         fmt("held-out coverage %.3f (floor %.3f) over 200 permutations, nested: ", rate, floor) +
             (nested ? "yes" : "no"));
}

void criterion_11() {
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  int mc_fail = 0;
  double residual = 0.0;
  for (int i = 0; i < 10; ++i) {
    const std::size_t d = 2 + i % 2;
    const auto basis = denseset::detail::random_orthonormal(d, d, rng);
    Matrix axes(d, d);
    Vector semi(d);
    for (std::size_t a = 0; a < d; ++a) {
      semi[a] = u(rng);
      for (std::size_t j = 0; j < d; ++j) {
        axes(a, j) = basis[a][j];
      }
    }
    const Ellipsoid e(denseset::detail::uniform_in_cube(d, 1.0, rng), axes, semi);
    const auto v = monte_carlo_volume(e, 1000000, 200 + i);
    const double truth = std::exp(e.log_volume());
    mc_fail += std::abs(v.estimate - truth) <= 3.0 * v.std_error ? 0 : 1;
    double recomputed = unit_ball_log_volume(d);
    for (double s : semi) {
      recomputed += std::log(s);
    }
    residual = std::max(residual, std::abs(recomputed - e.log_volume()));
    const Ellipsoid twice = scale(e, 2.0);
    residual = std::max(residual, std::abs(twice.log_volume() - e.log_volume() - static_cast<double>(d) * std::log(2.0)));
  }
  report(11, "volume arithmetic", mc_fail == 0 && residual <= 1e-9,
         fmt("%.0f/10 outside 3 std errors, max log-volume residual %.2e", mc_fail, residual));
}

void criterion_12() {
  bool ok = true;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t deg = 3 + s % 3;
    const std::size_t nv = 12 + 2 * (s % 3);
    const auto edges = random_regular_graph(nv, deg, 1200 + s);
    const PointSet y = incidence_points(edges, nv, edges.size() + 5);
    const std::set<Edge> adj(edges.begin(), edges.end());
    for (std::size_t i = 0; i < nv; ++i) {
      for (std::size_t j = i + 1; j < nv; ++j) {
        const double want = adj.count({i, j}) != 0 ? 2.0 * static_cast<double>(deg) - 2.0 : 2.0 * static_cast<double>(deg);
        ok = ok && squared_distance(y[i], y[j]) == want && distance(y[i], y[j]) == std::sqrt(want);
      }
    }
  }
  report(12, "hardness geometry", ok, "distances in {sqrt(2D-2), sqrt(2D)} on 10 random regular graphs, adjacent pairs smaller");
}

void criterion_13() {
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto inst = i % 2 == 0 ? gen_planted(60, 4, 0.5, 1.0, 2.0, 1300 + i) : gen_pancake(60, 4, 1, 0.5, 1300 + i);
    const PointSet& y = inst.points;
    std::vector<std::function<std::string()>> runs{
        [&] { return io::to_json(dense_ball(y, ball_params(0.5, 0.2)).ball).dump(); },
        [&] { return io::to_json(dense_ball_isotropic(y, iso_params(0.5, 0.2, i)).ball).dump(); },
        [&] { return io::to_json(dense_ellipsoid(y, ell_params(0.5, 0.2)).set).dump(); },
        [&] {
          GreedyParams p;
          p.delta = 0.5;
          p.gamma = 0.3;
          p.k = 2;
          const BaseLearner base = [](const PointSet& z, double lv, double sl) {
            return dense_ball(z, ball_params(lv, sl)).ball;
          };
          return io::to_json(greedy_union(y, p, base).union_set).dump();
        },
        [&] {
          ConformalParams cp;
          cp.seed = i;
          return io::to_json(fit_conformal(y, cp)).dump();
        },
        [&] { return io::json(list_decodable_means(y, 0.5, 0.1, i).candidates).dump(); },
        [&] { return io::to_json(opt_k_ball(y.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), 5).ball).dump(); },
        [&] { return io::json(gen_planted(30, 3, 0.5, 1.0, 2.0, i).points.coords()).dump(); },
    };
    for (const auto& r : runs) {
      mismatches += r() == r() ? 0 : 1;
    }
  }
  report(13, "determinism", mismatches == 0, fmt("%.0f mismatching reruns over 20 instances x 8 routines", mismatches));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_1_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::printf("%d criteria failed, %.0f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
