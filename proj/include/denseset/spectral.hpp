#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

// Eigenvalues sorted descending; eigenvectors stored as the rows of `vectors`, aligned with
// `values`.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

struct JacobiOptions {
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Converges when the off-diagonal
// Frobenius mass falls below tolerance * max(|trace|, ||M||_F).
inline EigenDecomposition sym_eig(const Matrix& m, JacobiOptions opts = {}) {
  const std::size_t n = m.rows();
  detail::require(n == m.cols(), "sym_eig: matrix must be square");
  detail::require(n >= 1, "sym_eig: empty matrix");

  const double asym_tol = 1e-12 * m.max_abs();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > asym_tol) {
        throw InvalidArgument("sym_eig: matrix is not symmetric");
      }
      a(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  }

  Matrix vt = Matrix::identity(n);  // rows are the running eigenvectors

  double frob2 = 0.0;
  for (double v : a.data()) {
    frob2 += v * v;
  }
  const double scale = std::max(std::abs(a.trace()), std::sqrt(frob2));
  const double target = opts.tolerance * scale;

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        s += 2.0 * a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (off_mass() <= target) {
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) {
            continue;
          }
          const double arp = rp[r];
          const double arq = rq[r];
          const double np = c * arp - s * arq;
          const double nq = s * arp + c * arq;
          rp[r] = np;
          rq[r] = nq;
          a(r, p) = np;
          a(r, q) = nq;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          const double x = vp[r];
          const double y = vq[r];
          vp[r] = c * x - s * y;
          vq[r] = s * x + c * y;
        }
      }
    }
  }

  // Sign convention: the largest-magnitude component of each eigenvector is positive.
  for (std::size_t i = 0; i < n; ++i) {
    auto v = vt.row(i);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (std::abs(v[j]) > std::abs(v[arg])) {
        arg = j;
      }
    }
    if (v[arg] < 0.0) {
      for (double& x : v) {
        x = -x;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (a(i, i) != a(j, j)) {
      return a(i, i) > a(j, j);
    }
    return lexicographic_less(vt.row(i), vt.row(j));
  });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    const auto src = vt.row(order[k]);
    std::copy(src.begin(), src.end(), out.vectors.row(k).begin());
  }
  return out;
}

struct SpectralSummary {
  Vector mean;
  Matrix covariance;
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // row k pairs with eigenvalues[k]

  double lambda_max() const noexcept { return eigenvalues.front(); }
};

// Population (1/n) covariance of the selected rows about `mean`.
inline Matrix covariance_of(const PointSet& pts, std::span<const std::size_t> indices,
                            std::span<const double> mean) {
  const std::size_t d = pts.dim();
  Matrix cov(d, d);
  Vector diff(d);
  for (std::size_t idx : indices) {
    const auto p = pts[idx];
    for (std::size_t j = 0; j < d; ++j) {
      diff[j] = p[j] - mean[j];
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double di = diff[i];
      if (di == 0.0) {
        continue;
      }
      auto row = cov.row(i);
      for (std::size_t j = i; j < d; ++j) {
        row[j] += di * diff[j];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) *= inv;
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

inline SpectralSummary summarize(const PointSet& pts, std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw InvalidArgument("summarize: empty point set");
  }
  SpectralSummary s;
  s.mean = mean_of(pts, indices);
  s.covariance = covariance_of(pts, indices, s.mean);
  auto eig = sym_eig(s.covariance);
  s.eigenvalues = std::move(eig.values);
  s.eigenvectors = std::move(eig.vectors);
  return s;
}

inline SpectralSummary summarize(const PointSet& pts) {
  const auto idx = all_indices(pts.size());
  return summarize(pts, idx);
}

inline std::size_t count_eigs_above(const SpectralSummary& s, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [&](double v) { return v > threshold; }));
}

}  // namespace denseset
