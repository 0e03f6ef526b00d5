#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "denseset/datagen.hpp"
#include "denseset/dense_ball.hpp"
#include "denseset/dense_ball_isotropic.hpp"
#include "denseset/dense_ellipsoid.hpp"
#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/io/csv.hpp"

namespace denseset {

struct BenchConfig {
  std::string family = "planted";  // planted | pancake
  std::vector<std::size_t> dims{16, 32, 64};
  std::size_t instances = 3;  // per dimension
  std::size_t n_per_dim = 20;
  double delta = 0.5;
  double gamma = 0.2;
  std::size_t k_high = 2;
  std::vector<std::string> algos{"coarse", "ball", "ball-iso", "ellipsoid"};
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: DENSESET_THREADS or hardware concurrency
};

struct BenchRow {
  std::string instance_id;
  std::size_t d = 0;
  std::size_t n = 0;
  double delta = 0.0;
  double gamma = 0.0;
  std::string algo;
  double log_volume = 0.0;
  double ratio_vs_planted = 0.0;
  double ratio_vs_coarse = 0.0;
  std::size_t coverage = 0;
  double wall_ms = 0.0;
  std::string error;  // empty on success
};

inline const char* bench_header() {
  return "instance_id,d,n,delta,gamma,algo,log_volume,per_dim_ratio_vs_planted,per_dim_ratio_vs_coarse_baseline,"
         "coverage,wall_ms";
}

// Per-instance seed stream: depends only on (seed, d, index), never on scheduling.
inline std::uint64_t instance_seed(std::uint64_t seed, std::size_t d, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline std::size_t bench_threads(std::size_t requested) {
  if (requested > 0) {
    return requested;
  }
  std::size_t t = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DENSESET_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) {
      t = std::min<std::size_t>(t, static_cast<std::size_t>(v));
    }
  }
  return t;
}

inline PlantedInstance bench_instance(const BenchConfig& cfg, std::size_t d, std::size_t index) {
  const std::size_t n = cfg.n_per_dim * d;
  const std::uint64_t s = instance_seed(cfg.seed, d, index);
  if (cfg.family == "planted") {
    return gen_planted(n, d, cfg.delta, 1.0, 2.0, s);
  }
  if (cfg.family == "pancake") {
    return gen_pancake(n, d, std::min(cfg.k_high, d - 1), cfg.delta, s);
  }
  throw InvalidArgument("bench: unknown family '" + cfg.family + "' (expected planted or pancake)");
}

inline std::vector<BenchRow> bench_one(const BenchConfig& cfg, std::size_t d, std::size_t index) {
  const PlantedInstance inst = bench_instance(cfg, d, index);
  const PointSet& pts = inst.points;
  const std::string id = cfg.family + "-d" + std::to_string(d) + "-i" + std::to_string(index);
  const CoarseBall baseline_ball = tight_coarse_balls(pts, cfg.delta).front();
  const Ellipsoid baseline = baseline_ball.to_ellipsoid(pts);

  std::vector<BenchRow> rows;
  for (const auto& algo : cfg.algos) {
    BenchRow row;
    row.instance_id = id;
    row.d = d;
    row.n = pts.size();
    row.delta = cfg.delta;
    row.gamma = cfg.gamma;
    row.algo = algo;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Ellipsoid out;
      if (algo == "coarse") {
        out = baseline;
      } else if (algo == "ball") {
        BallSearchParams p;
        p.delta = cfg.delta;
        p.gamma = cfg.gamma;
        out = dense_ball(pts, p).ball;
      } else if (algo == "ball-iso") {
        IsotropicBallParams p;
        p.delta = cfg.delta;
        p.gamma = cfg.gamma;
        p.seed = instance_seed(cfg.seed, d, index) + 1;
        out = dense_ball_isotropic(pts, p).ball;
      } else if (algo == "ellipsoid") {
        EllipsoidParams p;
        p.delta = cfg.delta;
        p.gamma = cfg.gamma;
        out = dense_ellipsoid(pts, p).set;
      } else {
        throw InvalidArgument("bench: unknown algo '" + algo + "'");
      }
      row.log_volume = out.log_volume();
      row.ratio_vs_planted = volume_ratio_per_dim(out, inst.planted);
      row.ratio_vs_coarse = volume_ratio_per_dim(out, baseline);
      row.coverage = coverage_count(out, pts);
    } catch (const InvalidArgument&) {
      throw;
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

// Runs every (dimension, instance) pair, in parallel across instances. Rows come back sorted
// by (d, instance index, algo order), independent of scheduling.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  detail::require(!cfg.dims.empty(), "bench: no dimensions given");
  detail::require(cfg.instances >= 1, "bench: instances must be >= 1");
  for (std::size_t d : cfg.dims) {
    detail::require(d >= 2, "bench: dimensions must be >= 2");
  }
  struct Job {
    std::size_t d;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (std::size_t d : cfg.dims) {
    for (std::size_t i = 0; i < cfg.instances; ++i) {
      jobs.push_back({d, i});
    }
  }
  std::vector<std::vector<BenchRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        results[j] = bench_one(cfg, jobs[j].d, jobs[j].index);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  const std::size_t nthreads = std::min(bench_threads(cfg.threads), jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  std::vector<BenchRow> rows;
  for (auto& r : results) {
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return rows;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  using io::format_double;
  out << bench_header() << '\n';
  for (const auto& r : rows) {
    out << r.instance_id << ',' << r.d << ',' << r.n << ',' << format_double(r.delta) << ','
        << format_double(r.gamma) << ',' << r.algo << ',';
    if (r.error.empty()) {
      out << format_double(r.log_volume) << ',' << format_double(r.ratio_vs_planted) << ','
          << format_double(r.ratio_vs_coarse) << ',' << r.coverage;
    } else {
      out << "nan,nan,nan,0";
    }
    out << ',' << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace denseset
