#pragma once

// Deterministic random fields, forms and points for identity testing.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "extcalc/geometry.hpp"

namespace extcalc {

/// Stable 64-bit FNV-1a hash, used to derive per-check seeds.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

class FieldSampler {
 public:
  FieldSampler(ChartPtr chart, std::uint64_t seed);

  const ChartPtr& chart() const { return chart_; }

  /// Polynomial of degree <= 2 with integer coefficients in [-3, 3]; on
  /// trig charts it is multiplied, with probability 1/2, by sin or cos of
  /// one coordinate.
  Expr random_function();
  VectorField random_vector_field();
  std::vector<VectorField> random_vector_fields(int count);
  PForm random_form(int degree);
  Point random_point();
  std::vector<Point> random_points(int count);

  int uniform_int(int lo, int hi);
  double uniform_real(double lo, double hi);

 private:
  ChartPtr chart_;
  std::mt19937_64 rng_;
};

}  // namespace extcalc
