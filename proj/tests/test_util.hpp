#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "extcalc/connection.hpp"
#include "extcalc/geometry.hpp"
#include "extcalc/sampling.hpp"

namespace extcalc::testing {

inline ChartPtr r3() { return make_chart("R3", {"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}}); }
inline ChartPtr sphere_chart() {
  return make_chart("S2", {"phi", "psi"}, {{0.3, 2.8}, {0.0, 6.2}}, true);
}
inline ChartPtr r4() { return make_chart("R4", {"x", "y", "z", "w"}, {{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}); }

/// Largest |a - b| over `points` random points of the chart.
inline double max_diff(const ChartPtr& chart, const Expr& a, const Expr& b, std::uint64_t seed = 1,
                       int points = 8) {
  FieldSampler s(chart, seed);
  double worst = 0;
  for (int i = 0; i < points; ++i) {
    Point p = s.random_point();
    worst = std::max(worst, std::abs(evaluate_at(a, p) - evaluate_at(b, p)));
  }
  return worst;
}

inline double max_abs(const ChartPtr& chart, const Expr& a, std::uint64_t seed = 1, int points = 8) {
  return max_diff(chart, a, Expr(), seed, points);
}

inline double max_diff(const PForm& a, const PForm& b, std::uint64_t seed = 1) {
  double worst = 0;
  for (std::size_t i = 0; i < a.components().size(); ++i)
    worst = std::max(worst, max_diff(a.chart(), a.components()[i], b.components()[i], seed));
  return worst;
}

inline double max_diff(const VectorField& a, const VectorField& b, std::uint64_t seed = 1) {
  double worst = 0;
  for (int i = 0; i < a.dim(); ++i) worst = std::max(worst, max_diff(a.chart(), a[i], b[i], seed));
  return worst;
}

inline double max_diff(const TensorValue& a, const TensorValue& b, std::uint64_t seed = 1) {
  double worst = 0;
  for (std::size_t i = 0; i < a.comps.size(); ++i)
    worst = std::max(worst, max_diff(a.chart, a.comps[i], b.comps[i], seed));
  return worst;
}

/// Christoffel symbols that are random affine functions with small integer coefficients.
inline Connection random_connection(const ChartPtr& chart, std::uint64_t seed) {
  FieldSampler s(chart, seed);
  const int n = chart->dim();
  std::vector<Expr> g;
  for (int k = 0; k < n * n * n; ++k) {
    Expr e(s.uniform_int(-2, 2));
    for (int i = 0; i < n; ++i) e = e + Expr(s.uniform_int(-2, 2)) * Expr::var(i);
    g.push_back(e);
  }
  return Connection(chart, std::move(g));
}

}  // namespace extcalc::testing
