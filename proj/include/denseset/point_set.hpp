#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/linalg.hpp"

namespace denseset {

// An immutable n x d table of finite coordinates, stored row-major.
class PointSet {
public:
  PointSet() = default;

  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    detail::require(dim_ >= 1, "PointSet: dimension must be >= 1");
    detail::require(coords_.size() % dim_ == 0, "PointSet: coordinate count is not a multiple of d");
    detail::require(!coords_.empty(), "PointSet: at least one point is required");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!std::isfinite(coords_[i])) {
        throw InvalidArgument("PointSet: non-finite coordinate at point " + std::to_string(i / dim_) +
                              ", column " + std::to_string(i % dim_));
      }
    }
  }

  static PointSet from_rows(const std::vector<Vector>& rows) {
    detail::require(!rows.empty(), "PointSet: at least one point is required");
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& r : rows) {
      detail::require_dim(d, r.size(), "PointSet");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return PointSet(d, std::move(flat));
  }

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  const std::vector<double>& coords() const noexcept { return coords_; }

  PointSet subset(std::span<const std::size_t> indices) const {
    std::vector<double> flat;
    flat.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
      const auto p = (*this)[i];
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return PointSet(dim_, std::move(flat));
  }

  std::vector<Vector> rows() const {
    std::vector<Vector> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      out.emplace_back((*this)[i].begin(), (*this)[i].end());
    }
    return out;
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Mean of the selected rows. Accumulates offsets from the first selected row, so a set
// of identical points returns that point exactly.
inline Vector mean_of(const PointSet& pts, std::span<const std::size_t> indices) {
  detail::require(!indices.empty(), "mean_of: empty selection");
  const std::size_t d = pts.dim();
  const auto base = pts[indices.front()];
  Vector acc(d, 0.0);
  for (std::size_t i : indices) {
    const auto p = pts[i];
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] += p[j] - base[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (std::size_t j = 0; j < d; ++j) {
    acc[j] = base[j] + acc[j] * inv;
  }
  return acc;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = i;
  }
  return idx;
}

inline Vector mean_of(const PointSet& pts) {
  const auto idx = all_indices(pts.size());
  return mean_of(pts, idx);
}

// Smallest count meeting a fractional coverage target: ceil(fraction * n), guarded against
// round-off pushing exact products (0.5 * 12) to the next integer.
inline std::size_t required_count(double fraction, std::size_t n) {
  const double raw = fraction * static_cast<double>(n);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw)) {
    return static_cast<std::size_t>(rounded);
  }
  return static_cast<std::size_t>(std::ceil(raw));
}

}  // namespace denseset
