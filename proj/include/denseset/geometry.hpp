#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/linalg.hpp"
#include "denseset/point_set.hpp"

namespace denseset {

// Boundary slack for membership tests, relative to the squared normalized radius.
inline constexpr double kMembershipSlack = 1e-12;
inline constexpr double kOrthonormalTol = 1e-9;

// log of the volume of the unit ball in R^d.
inline double unit_ball_log_volume(std::size_t d) {
  if (d == 0) {
    throw InvalidArgument("unit_ball_log_volume: invalid dimension 0");
  }
  const double half = 0.5 * static_cast<double>(d);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

// A closed ellipsoid { x : sum_i (<x - center, axis_i> / semi_axis_i)^2 <= 1 } kept in its
// eigen-frame. Balls carry identity axes and equal semi-axes. A zero semi-axis is allowed and
// gives a degenerate set with log_volume = -inf.
class Ellipsoid {
public:
  Ellipsoid() = default;

  Ellipsoid(Vector center, Matrix axes, Vector semi_axes)
      : center_(std::move(center)), axes_(std::move(axes)), semi_axes_(std::move(semi_axes)) {
    validate();
    is_ball_ = all_equal(semi_axes_);
    log_volume_ = compute_log_volume();
  }

  // Same as the validating constructor, minus the O(d^3) orthonormality check. Only for axes
  // already known to be orthonormal (copied from a validated ellipsoid or from sym_eig).
  static Ellipsoid from_trusted_axes(Vector center, Matrix axes, Vector semi_axes) {
    Ellipsoid e;
    e.center_ = std::move(center);
    e.axes_ = std::move(axes);
    e.semi_axes_ = std::move(semi_axes);
    detail::require(e.axes_.rows() == e.dim() && e.axes_.cols() == e.dim(), "Ellipsoid: axes must be d x d");
    detail::require_dim(e.dim(), e.semi_axes_.size(), "Ellipsoid semi_axes");
    for (double s : e.semi_axes_) {
      detail::require(std::isfinite(s) && s >= 0.0, "Ellipsoid: semi-axes must be finite and >= 0");
    }
    e.is_ball_ = all_equal(e.semi_axes_);
    e.log_volume_ = e.compute_log_volume();
    return e;
  }

  static Ellipsoid ball(Vector center, double radius) {
    const std::size_t d = center.size();
    detail::require(d >= 1, "Ellipsoid::ball: dimension must be >= 1");
    detail::require(std::isfinite(radius) && radius >= 0.0, "Ellipsoid::ball: radius must be finite and >= 0");
    Ellipsoid e;
    e.center_ = std::move(center);
    for (double c : e.center_) {
      detail::require(std::isfinite(c), "Ellipsoid::ball: non-finite center");
    }
    e.axes_ = Matrix::identity(d);
    e.semi_axes_.assign(d, radius);
    e.is_ball_ = true;
    e.log_volume_ = e.compute_log_volume();
    return e;
  }

  std::size_t dim() const noexcept { return center_.size(); }
  const Vector& center() const noexcept { return center_; }
  const Matrix& axes() const noexcept { return axes_; }
  const Vector& semi_axes() const noexcept { return semi_axes_; }
  double log_volume() const noexcept { return log_volume_; }
  bool is_ball() const noexcept { return is_ball_; }

  // Radius of a ball; for a general ellipsoid the largest semi-axis.
  double radius() const noexcept {
    double r = 0.0;
    for (double s : semi_axes_) {
      r = std::max(r, s);
    }
    return r;
  }

  // sum_i (<y - c, v_i> / s_i)^2. A zero semi-axis contributes 0 when the projection is
  // exactly 0 and +inf otherwise.
  double normalized_squared_norm(std::span<const double> y) const {
    detail::require_dim(dim(), y.size(), "Ellipsoid");
    if (is_ball_) {
      const double d2 = squared_distance(y, center_);
      const double r2 = semi_axes_.front() * semi_axes_.front();
      if (r2 == 0.0) {
        return d2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return d2 / r2;
    }
    const Vector diff = subtract(y, center_);
    double total = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double p = dot(axes_.row(i), diff);
      const double s = semi_axes_[i];
      if (s == 0.0) {
        if (p != 0.0) {
          return std::numeric_limits<double>::infinity();
        }
        continue;
      }
      const double t = p / s;
      total += t * t;
    }
    return total;
  }

  bool contains(std::span<const double> y) const {
    if (is_ball_) {
      detail::require_dim(dim(), y.size(), "Ellipsoid");
      const double r = semi_axes_.front();
      return squared_distance(y, center_) <= r * r * (1.0 + kMembershipSlack);
    }
    return normalized_squared_norm(y) <= 1.0 + kMembershipSlack;
  }

  friend bool operator==(const Ellipsoid&, const Ellipsoid&) = default;

private:
  static bool all_equal(const Vector& v) {
    for (double x : v) {
      if (x != v.front()) {
        return false;
      }
    }
    return true;
  }

  void validate() const {
    const std::size_t d = center_.size();
    detail::require(d >= 1, "Ellipsoid: dimension must be >= 1");
    detail::require(axes_.rows() == d && axes_.cols() == d, "Ellipsoid: axes must be d x d");
    detail::require_dim(d, semi_axes_.size(), "Ellipsoid semi_axes");
    for (double c : center_) {
      detail::require(std::isfinite(c), "Ellipsoid: non-finite center");
    }
    for (double s : semi_axes_) {
      detail::require(std::isfinite(s) && s >= 0.0, "Ellipsoid: semi-axes must be finite and >= 0");
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        const double g = dot(axes_.row(i), axes_.row(j));
        const double expect = (i == j) ? 1.0 : 0.0;
        if (std::abs(g - expect) > kOrthonormalTol) {
          throw InvalidArgument("Ellipsoid: axes are not orthonormal (rows " + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        }
      }
    }
  }

  double compute_log_volume() const {
    double lv = unit_ball_log_volume(dim());
    for (double s : semi_axes_) {
      if (s == 0.0) {
        return -std::numeric_limits<double>::infinity();
      }
      lv += std::log(s);
    }
    return lv;
  }

  Vector center_;
  Matrix axes_;
  Vector semi_axes_;
  double log_volume_ = 0.0;
  bool is_ball_ = false;
};

inline bool contains(const Ellipsoid& e, std::span<const double> y) { return e.contains(y); }

// Natural scaling about the center: semi-axes multiplied by factor.
inline Ellipsoid scale(const Ellipsoid& e, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("scale: factor must be finite and >= 0");
  }
  if (factor == 1.0) {
    return e;
  }
  if (e.is_ball()) {
    return Ellipsoid::ball(e.center(), e.semi_axes().front() * factor);
  }
  Vector s = e.semi_axes();
  for (double& v : s) {
    v *= factor;
  }
  return Ellipsoid::from_trusted_axes(e.center(), e.axes(), std::move(s));
}

// vol(a)^{1/d} / vol(b)^{1/d}
inline double volume_ratio_per_dim(const Ellipsoid& a, const Ellipsoid& b) {
  detail::require_dim(a.dim(), b.dim(), "volume_ratio_per_dim");
  return std::exp((a.log_volume() - b.log_volume()) / static_cast<double>(a.dim()));
}

inline std::size_t coverage_count(const Ellipsoid& e, const PointSet& pts) {
  detail::require_dim(e.dim(), pts.dim(), "coverage_count");
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (e.contains(pts[i])) {
      ++count;
    }
  }
  return count;
}

// Deterministic ordering used for every argmin over candidate sets: smaller volume first,
// then lexicographically smaller center, then lexicographically smaller semi-axes.
inline bool volume_order_less(const Ellipsoid& a, const Ellipsoid& b) {
  if (a.log_volume() != b.log_volume()) {
    return a.log_volume() < b.log_volume();
  }
  if (a.center() != b.center()) {
    return lexicographic_less(a.center(), b.center());
  }
  return lexicographic_less(a.semi_axes(), b.semi_axes());
}

// A union of ellipsoids. Volume is tracked only as the sum-of-members upper bound.
class CoverageSet {
public:
  CoverageSet() = default;
  explicit CoverageSet(std::vector<Ellipsoid> members) : members_(std::move(members)) {
    for (const auto& m : members_) {
      detail::require_dim(members_.front().dim(), m.dim(), "CoverageSet");
    }
  }

  void add(Ellipsoid e) {
    if (!members_.empty()) {
      detail::require_dim(members_.front().dim(), e.dim(), "CoverageSet");
    }
    members_.push_back(std::move(e));
  }

  const std::vector<Ellipsoid>& members() const noexcept { return members_; }
  std::size_t dim() const noexcept { return members_.empty() ? 0 : members_.front().dim(); }
  bool empty() const noexcept { return members_.empty(); }

  // log(sum_i vol(member_i)), computed by log-sum-exp.
  double log_volume_upper() const noexcept {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& m : members_) {
      hi = std::max(hi, m.log_volume());
    }
    if (!std::isfinite(hi)) {
      return hi;
    }
    double acc = 0.0;
    for (const auto& m : members_) {
      acc += std::exp(m.log_volume() - hi);
    }
    return hi + std::log(acc);
  }

  bool contains(std::span<const double> y) const {
    for (const auto& m : members_) {
      if (m.contains(y)) {
        return true;
      }
    }
    return false;
  }

  friend bool operator==(const CoverageSet&, const CoverageSet&) = default;

private:
  std::vector<Ellipsoid> members_;
};

inline std::size_t coverage_count(const CoverageSet& s, const PointSet& pts) {
  if (s.empty()) {
    return 0;
  }
  detail::require_dim(s.dim(), pts.dim(), "coverage_count");
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (s.contains(pts[i])) {
      ++count;
    }
  }
  return count;
}

}  // namespace denseset
