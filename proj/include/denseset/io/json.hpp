#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "denseset/conformal.hpp"
#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/point_set.hpp"

namespace denseset::io {

using nlohmann::json;

namespace detail {

// JSON has no infinities; -inf (degenerate sets) is written as null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline Vector read_vector(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw InvalidArgument(std::string("json: missing array field '") + field + "'");
  }
  Vector out;
  for (const auto& v : j.at(field)) {
    if (!v.is_number()) {
      throw InvalidArgument(std::string("json: non-numeric entry in '") + field + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

inline json to_json(const Ellipsoid& e, std::optional<std::size_t> coverage = std::nullopt) {
  json j;
  j["kind"] = e.is_ball() ? "ball" : "ellipsoid";
  j["center"] = e.center();
  j["axes"] = e.axes().data();
  j["semi_axes"] = e.semi_axes();
  j["log_volume"] = detail::number_or_null(e.log_volume());
  j["coverage_count"] = coverage ? json(*coverage) : json(nullptr);
  return j;
}

inline json to_json(const CoverageSet& s, std::optional<std::size_t> coverage = std::nullopt) {
  json j;
  j["kind"] = "union";
  j["members"] = json::array();
  for (const auto& m : s.members()) {
    j["members"].push_back(to_json(m));
  }
  j["log_volume"] = detail::number_or_null(s.log_volume_upper());
  j["coverage_count"] = coverage ? json(*coverage) : json(nullptr);
  return j;
}

inline Ellipsoid ellipsoid_from_json(const json& j) {
  const Vector center = detail::read_vector(j, "center");
  const Vector flat = detail::read_vector(j, "axes");
  Vector semi = detail::read_vector(j, "semi_axes");
  const std::size_t d = center.size();
  if (d == 0 || flat.size() != d * d) {
    throw InvalidArgument("json: axes must hold d*d entries");
  }
  Matrix axes(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      axes(i, k) = flat[i * d + k];
    }
  }
  if (axes == Matrix::identity(d) && !semi.empty() && std::all_of(semi.begin(), semi.end(),
                                                                  [&](double s) { return s == semi.front(); })) {
    return Ellipsoid::ball(center, semi.front());
  }
  return Ellipsoid(center, std::move(axes), std::move(semi));
}

inline CoverageSet coverage_set_from_json(const json& j) {
  if (j.value("kind", "") != "union") {
    return CoverageSet({ellipsoid_from_json(j)});
  }
  CoverageSet s;
  for (const auto& m : j.at("members")) {
    s.add(ellipsoid_from_json(m));
  }
  return s;
}

inline json to_json(const ConformalPredictor& p) {
  json j;
  j["base"] = to_json(p.base);
  j["grid"] = p.grid;
  j["chosen_index"] = p.chosen_index;
  j["alpha"] = p.alpha;
  j["n_cal"] = p.n_cal;
  j["infeasible"] = p.infeasible;
  return j;
}

inline ConformalPredictor predictor_from_json(const json& j) {
  ConformalPredictor p;
  try {
    p.base = ellipsoid_from_json(j.at("base"));
    p.grid = detail::read_vector(j, "grid");
    p.chosen_index = j.at("chosen_index").get<std::size_t>();
    p.alpha = j.at("alpha").get<double>();
    p.n_cal = j.at("n_cal").get<std::size_t>();
    p.infeasible = j.value("infeasible", false);
  } catch (const json::exception& ex) {
    throw InvalidArgument(std::string("json: malformed predictor: ") + ex.what());
  }
  if (p.chosen_index >= p.grid.size()) {
    throw InvalidArgument("json: chosen_index out of range");
  }
  return p;
}

}  // namespace denseset::io
