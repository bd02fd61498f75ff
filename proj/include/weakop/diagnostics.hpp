#pragma once

// Keyed (parameter, value) sequences with a fitted asymptotic rate: the
// least-squares slope of log(value) against log(parameter) over the last half
// of the grid. Parameters must be strictly increasing and values finite
// nonnegative.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "weakop/errors.hpp"

namespace weakop {

struct TableMeta {
  std::uint64_t seed = 0;
  int dim = 0;
  double lambda0 = 0.0;
};

struct DiagnosticsTable {
  std::vector<std::pair<double, double>> rows;  // (parameter, value)
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();
  TableMeta meta;

  double first_value() const { return rows.empty() ? 0.0 : rows.front().second; }
  double last_value() const { return rows.empty() ? 0.0 : rows.back().second; }
  double max_value() const {
    double m = 0.0;
    for (const auto& [p, v] : rows) m = std::max(m, v);
    return m;
  }
};

/// Slope of log(value) vs log(parameter) over the last half of the rows.
/// Rows with value <= floor are skipped; fewer than two usable rows yield NaN.
inline double fit_loglog_rate(const std::vector<std::pair<double, double>>& rows,
                              double floor = 1e-300) {
  const std::size_t start = rows.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = start; i < rows.size(); ++i) {
    const auto [p, v] = rows[i];
    if (!(v > floor) || !(p > 0)) continue;
    const double x = std::log(p), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / denom;
}

inline DiagnosticsTable make_table(std::vector<std::pair<double, double>> rows,
                                   TableMeta meta) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].second) || rows[i].second < 0.0)
      throw Error("diagnostics table: value must be finite nonnegative");
    if (i > 0 && !(rows[i].first > rows[i - 1].first))
      throw Error("diagnostics table: parameters must be strictly increasing");
  }
  DiagnosticsTable t;
  t.fitted_rate = fit_loglog_rate(rows);
  t.rows = std::move(rows);
  t.meta = meta;
  return t;
}

/// Geometric grid of purely imaginary shifts sign * i * lambda0 * 2^k,
/// k = 0 .. count-1.
inline std::vector<std::complex<double>> lambda_grid(double lambda0, int count,
                                                     int sign = +1) {
  if (!(lambda0 > 0)) throw Error("lambda_grid: lambda0 must be positive");
  if (count < 1) throw Error("lambda_grid: count must be at least 1");
  std::vector<std::complex<double>> grid;
  grid.reserve(static_cast<std::size_t>(count));
  double mag = lambda0;
  for (int k = 0; k < count; ++k, mag *= 2.0)
    grid.emplace_back(0.0, sign > 0 ? mag : -mag);
  return grid;
}

}  // namespace weakop
