#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "denseset/bench.hpp"
#include "denseset/conformal.hpp"
#include "denseset/datagen.hpp"
#include "denseset/dense_ball.hpp"
#include "denseset/dense_ball_isotropic.hpp"
#include "denseset/dense_ellipsoid.hpp"
#include "denseset/greedy_union.hpp"
#include "denseset/io/csv.hpp"
#include "denseset/io/json.hpp"
#include "denseset/oracle.hpp"

namespace denseset::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kBudget = 3 };

namespace detail {

struct InputFlags {
  std::string input = "-";
  bool header = false;
};

struct Shared {
  std::istream* in = &std::cin;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::string out_path;
};

inline void add_input(CLI::App* app, InputFlags& f) {
  app->add_option("-i,--input", f.input, "CSV of points, one per row ('-' for stdin)");
  app->add_flag("--header", f.header, "skip the first line of the CSV");
}

inline PointSet load_points(const InputFlags& f, const Shared& s) {
  if (f.input == "-") {
    return io::read_csv(*s.in, f.header);
  }
  std::ifstream file(f.input);
  if (!file) {
    throw InvalidArgument("cannot open input file '" + f.input + "'");
  }
  return io::read_csv(file, f.header);
}

// Writes to --out when given, else to the output stream.
inline void emit(const Shared& s, const std::string& text) {
  if (s.out_path.empty()) {
    *s.out << text;
    return;
  }
  std::ofstream file(s.out_path);
  if (!file) {
    throw InvalidArgument("cannot open output file '" + s.out_path + "'");
  }
  file << text;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) {
    throw InvalidArgument("cannot open output file '" + path + "'");
  }
  file << text;
}

// The guarantees assume n on the order of d^2 / gamma^2 samples; advisory only.
inline void sample_size_warning(const Shared& s, const PointSet& pts, double gamma) {
  const auto d = static_cast<double>(pts.dim());
  const double want = d * d / (gamma * gamma);
  if (static_cast<double>(pts.size()) < want) {
    *s.err << "warning: n = " << pts.size() << " is below d^2/gamma^2 = " << want
           << "; the approximation guarantees assume more samples\n";
  }
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// Runs one command line. Results go to `out` (or --out), diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               std::istream& in = std::cin) {
  detail::Shared shared{&in, &out, &err, {}};
  CLI::App app{"Small-volume covering sets for point clouds", "denseset"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  double delta = 0.5;
  double gamma = 0.1;
  std::uint64_t seed = 0;
  detail::InputFlags input;
  std::function<void()> action;

  auto common = [&](CLI::App* sub) {
    detail::add_input(sub, input);
    sub->add_option("--delta", delta, "coverage fraction");
    sub->add_option("--gamma", gamma, "coverage slack");
    sub->add_option("-o,--out", shared.out_path, "write the result here instead of the output stream");
  };

  // ball
  std::optional<std::size_t> q;
  std::optional<double> tau;
  std::size_t cap = 200000;
  auto* ball = app.add_subcommand("ball", "smallest ball by coarse-to-fine grid search");
  common(ball);
  ball->add_option("--q", q, "grid dimension (default from d)");
  ball->add_option("--tau", tau, "net tolerance (default R_min / ln d)");
  ball->add_option("--cap", cap, "refined candidate budget");
  ball->callback([&] {
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      detail::sample_size_warning(shared, pts, gamma);
      BallSearchParams p{delta, gamma, q, tau, cap};
      const BallFit fit = dense_ball(pts, p);
      if (fit.coarse_skipped > 0) {
        err << "warning: " << fit.coarse_skipped << " of " << fit.coarse_considered
            << " coarse balls skipped: grid net exceeds the candidate budget\n";
      }
      detail::emit(shared, detail::dump(io::to_json(fit.ball, fit.coverage)));
    };
  });

  // ball-iso
  double beta = 1.0;
  auto* iso = app.add_subcommand("ball-iso", "smallest ball for near-isotropic inliers");
  common(iso);
  iso->add_option("--beta", beta, "isotropy parameter");
  iso->add_option("--seed", seed, "random seed");
  iso->callback([&] {
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      detail::sample_size_warning(shared, pts, gamma);
      IsotropicBallParams p;
      p.delta = delta;
      p.gamma = gamma;
      p.beta = beta;
      p.seed = seed;
      const BallFit fit = dense_ball_isotropic(pts, p);
      detail::emit(shared, detail::dump(io::to_json(fit.ball, fit.coverage)));
    };
  });

  // ellipsoid
  std::optional<double> tau_hat;
  std::size_t coarse_limit = 32;
  auto* ell = app.add_subcommand("ellipsoid", "small-volume ellipsoid by two-level preconditioning");
  common(ell);
  ell->add_option("--tau-hat", tau_hat, "shape threshold (default d^(1/4))");
  ell->add_option("--coarse-limit", coarse_limit, "tightest pair balls to refine (0: all pair balls)");
  ell->callback([&] {
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      detail::sample_size_warning(shared, pts, gamma);
      EllipsoidParams p;
      p.delta = delta;
      p.gamma = gamma;
      p.tau_hat = tau_hat;
      p.coarse_limit = coarse_limit;
      const EllipsoidFit fit = dense_ellipsoid(pts, p);
      detail::emit(shared, detail::dump(io::to_json(fit.set, fit.coverage)));
    };
  });

  // union
  std::size_t k = 1;
  std::string base_name = "ball";
  std::optional<std::size_t> max_rounds;
  auto* uni = app.add_subcommand("union", "greedy union of base sets");
  common(uni);
  uni->add_option("--k", k, "number of competitor components");
  uni->add_option("--base", base_name, "base learner")->check(CLI::IsMember({"ball", "ball-iso", "ellipsoid"}));
  uni->add_option("--beta", beta, "isotropy parameter for ball-iso");
  uni->add_option("--seed", seed, "random seed for ball-iso");
  uni->add_option("--tau-hat", tau_hat, "shape threshold for ellipsoid");
  uni->add_option("--max-rounds", max_rounds, "round cap (default ceil(8 delta k / gamma) + 1)");
  uni->callback([&] {
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      detail::sample_size_warning(shared, pts, gamma);
      BaseLearner base;
      if (base_name == "ball") {
        base = [](const PointSet& y, double dl, double gm) {
          BallSearchParams p;
          p.delta = dl;
          p.gamma = gm;
          return dense_ball(y, p).ball;
        };
      } else if (base_name == "ball-iso") {
        base = [&](const PointSet& y, double dl, double gm) {
          IsotropicBallParams p;
          p.delta = dl;
          p.gamma = gm;
          p.beta = beta;
          p.seed = seed;
          return dense_ball_isotropic(y, p).ball;
        };
      } else {
        base = [&](const PointSet& y, double dl, double gm) {
          EllipsoidParams p;
          p.delta = dl;
          p.gamma = gm;
          p.tau_hat = tau_hat;
          return dense_ellipsoid(y, p).set;
        };
      }
      GreedyParams gp;
      gp.delta = delta;
      gp.gamma = gamma;
      gp.k = k;
      gp.max_rounds = max_rounds;
      const GreedyFit fit = greedy_union(pts, gp, base);
      detail::emit(shared, detail::dump(io::to_json(fit.union_set, fit.coverage)));
    };
  });

  // conformal, conformal query
  double alpha = 0.1;
  std::size_t grid_size = 64;
  std::string predictor_path;
  auto* conf = app.add_subcommand("conformal", "fit a split-conformal predictor and save it as JSON");
  conf->require_subcommand(0, 1);
  detail::add_input(conf, input);
  conf->add_option("--alpha", alpha, "miscoverage level");
  conf->add_option("--gamma", gamma, "slack passed to the base learner");
  conf->add_option("--grid", grid_size, "number of scalings in the nested family");
  conf->add_option("--seed", seed, "shuffle seed");
  conf->add_option("--coarse-limit", coarse_limit, "tightest pair balls to refine (0: all pair balls)");
  conf->add_option("-o,--out", shared.out_path, "write the predictor here instead of the output stream");
  auto* query = conf->add_subcommand("query", "print 1/0 membership for each query row");
  query->add_option("--predictor", predictor_path, "predictor JSON from 'conformal'")->required();
  detail::add_input(query, input);
  query->add_option("-o,--out", shared.out_path, "write the answers here instead of the output stream");
  conf->callback([&] {
    if (conf->got_subcommand(query)) {
      return;
    }
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      ConformalParams p;
      p.alpha = alpha;
      p.gamma = gamma;
      p.grid_size = grid_size;
      p.seed = seed;
      p.coarse_limit = coarse_limit;
      const ConformalPredictor pred = fit_conformal(pts, p);
      if (pred.infeasible) {
        err << "warning: ceil((1 - alpha)(n_cal + 1)) exceeds n_cal; using the largest scaling\n";
      }
      detail::emit(shared, detail::dump(io::to_json(pred)));
    };
  });
  query->callback([&] {
    action = [&] {
      std::ifstream file(predictor_path);
      if (!file) {
        throw InvalidArgument("cannot open predictor file '" + predictor_path + "'");
      }
      io::json j;
      try {
        j = io::json::parse(file);
      } catch (const io::json::exception& ex) {
        throw InvalidArgument(std::string("predictor file is not valid JSON: ") + ex.what());
      }
      const ConformalPredictor pred = io::predictor_from_json(j);
      const PointSet pts = detail::load_points(input, shared);
      const Ellipsoid set = pred.chosen_set();
      denseset::detail::require_dim(set.dim(), pts.dim(), "conformal query");
      std::ostringstream text;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        text << (set.contains(pts[i]) ? 1 : 0) << '\n';
      }
      detail::emit(shared, text.str());
    };
  });

  // oracle
  std::size_t m = 1;
  auto* orc = app.add_subcommand("oracle", "exact smallest ball covering m points (n <= 16)");
  detail::add_input(orc, input);
  orc->add_option("--m", m, "points to cover")->required();
  orc->add_option("-o,--out", shared.out_path, "write the result here instead of the output stream");
  orc->callback([&] {
    action = [&] {
      const PointSet pts = detail::load_points(input, shared);
      const OptimalBall best = opt_k_ball(pts, m);
      detail::emit(shared, detail::dump(io::to_json(best.ball, coverage_count(best.ball, pts))));
    };
  });

  // gen
  std::size_t n = 100;
  std::size_t d = 2;
  double r_star = 1.0;
  double outlier_scale = 2.0;
  std::size_t k_high = 1;
  double separation = 8.0;
  std::size_t degree = 3;
  std::optional<std::size_t> pad_dim;
  std::string truth_path;
  std::string family;
  auto* gen = app.add_subcommand("gen", "write a synthetic instance as CSV plus a truth JSON");
  gen->add_option("family", family, "planted | pancake | clusters | incidence")
      ->required()
      ->check(CLI::IsMember({"planted", "pancake", "clusters", "incidence"}));
  gen->add_option("--n", n, "point count (vertex count for incidence)");
  gen->add_option("--d", d, "dimension");
  gen->add_option("--delta", delta, "inlier fraction");
  gen->add_option("--r-star", r_star, "planted radius");
  gen->add_option("--outlier-scale", outlier_scale, "outlier shell scale (>= 2)");
  gen->add_option("--k-high", k_high, "high-variance directions (pancake)");
  gen->add_option("--k", k, "cluster count (clusters)");
  gen->add_option("--separation", separation, "cluster center separation (clusters)");
  gen->add_option("--degree", degree, "vertex degree (incidence)");
  gen->add_option("--pad-dim", pad_dim, "padded dimension (incidence; default edge count)");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("-o,--out", shared.out_path, "CSV destination (default: output stream)");
  gen->add_option("--truth", truth_path, "truth JSON destination (default: <out>.truth.json when --out is set)");
  gen->callback([&] {
    action = [&] {
      io::json truth;
      PointSet pts;
      if (family == "planted" || family == "pancake") {
        const PlantedInstance inst = family == "planted"
                                         ? gen_planted(n, d, delta, r_star, outlier_scale, seed)
                                         : gen_pancake(n, d, k_high, delta, seed, r_star, outlier_scale);
        pts = inst.points;
        truth["planted"] = io::to_json(inst.planted, coverage_count(inst.planted, pts));
        truth["inlier_indices"] = inst.inlier_indices;
      } else if (family == "clusters") {
        const ClusterInstance inst = gen_clusters(n, d, k, delta, separation, seed);
        pts = inst.points;
        truth["planted"] = io::json::array();
        for (const auto& b : inst.planted) {
          truth["planted"].push_back(io::to_json(b, coverage_count(b, pts)));
        }
        truth["members"] = inst.members;
      } else {
        denseset::detail::require(n * degree % 2 == 0, "gen incidence: n * degree must be even");
        const std::size_t edges = n * degree / 2;
        pts = gen_incidence_hard(n, degree, pad_dim.value_or(edges), seed);
        truth["edges"] = edges;
      }
      truth["spec"] = {{"family", family}, {"n", n},       {"d", pts.dim()}, {"delta", delta},
                       {"seed", seed},     {"r_star", r_star}, {"outlier_scale", outlier_scale},
                       {"k_high", k_high}, {"k", k},       {"separation", separation}, {"degree", degree}};
      std::ostringstream csv;
      io::write_csv(csv, pts);
      detail::emit(shared, csv.str());
      const std::string tpath = !truth_path.empty() ? truth_path
                                : !shared.out_path.empty() ? shared.out_path + ".truth.json"
                                                           : std::string();
      if (!tpath.empty()) {
        detail::write_file(tpath, detail::dump(truth));
      }
    };
  });

  // bench
  BenchConfig bench_cfg;
  std::vector<std::size_t> dims;
  auto* bench = app.add_subcommand("bench", "volume-ratio sweep over generated instances (CSV)");
  bench->add_option("--family", bench_cfg.family, "planted | pancake")
      ->check(CLI::IsMember({"planted", "pancake"}));
  bench->add_option("--dims", dims, "comma-separated dimensions")->delimiter(',');
  bench->add_option("--instances", bench_cfg.instances, "instances per dimension");
  bench->add_option("--n-per-dim", bench_cfg.n_per_dim, "points per dimension (n = this * d)");
  bench->add_option("--delta", bench_cfg.delta, "coverage fraction");
  bench->add_option("--gamma", bench_cfg.gamma, "coverage slack");
  bench->add_option("--k-high", bench_cfg.k_high, "high-variance directions (pancake)");
  bench->add_option("--algos", bench_cfg.algos, "comma-separated subset of coarse,ball,ball-iso,ellipsoid")
      ->delimiter(',');
  bench->add_option("--seed", bench_cfg.seed, "master seed");
  bench->add_option("-o,--out", shared.out_path, "write the CSV here instead of the output stream");
  bench->callback([&] {
    action = [&] {
      if (!dims.empty()) {
        bench_cfg.dims = dims;
      }
      const auto rows = run_bench(bench_cfg);
      std::ostringstream csv;
      write_bench_csv(csv, rows);
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          err << "warning: " << r.instance_id << " " << r.algo << ": " << r.error << "\n";
        }
      }
      detail::emit(shared, csv.str());
    };
  });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (action) {
      action();
    }
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, out, err);
}

}  // namespace denseset::cli
