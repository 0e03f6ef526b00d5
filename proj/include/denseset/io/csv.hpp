#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "denseset/error.hpp"
#include "denseset/point_set.hpp"

namespace denseset::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// One point per row, comma-separated. Blank lines are skipped. Errors name the 1-based line
// and column.
inline PointSet read_csv(std::istream& in, bool header = false) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  std::vector<double> flat;
  if (header && std::getline(in, line)) {
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    std::size_t col = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      const auto field = detail::trim(rest.substr(0, comma));
      ++col;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw InvalidArgument("csv: line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                              ": not a number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw InvalidArgument("csv: line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                              ": non-finite value");
      }
      flat.push_back(v);
      if (comma == std::string_view::npos) {
        break;
      }
      rest = rest.substr(comma + 1);
    }
    if (d == 0) {
      d = col;
    } else if (col != d) {
      throw InvalidArgument("csv: line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                            " columns, found " + std::to_string(col));
    }
  }
  if (flat.empty()) {
    throw InvalidArgument("csv: no data rows");
  }
  return PointSet(d, std::move(flat));
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const PointSet& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = pts[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      out << (j ? "," : "") << format_double(p[j]);
    }
    out << '\n';
  }
}

}  // namespace denseset::io
