#include "extcalc/sampling.hpp"

namespace extcalc {

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

FieldSampler::FieldSampler(ChartPtr chart, std::uint64_t seed) : chart_(std::move(chart)), rng_(seed) {}

// Distributions are written out by hand so sequences do not depend on the
// standard library implementation.
int FieldSampler::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng_() % span);
}

double FieldSampler::uniform_real(double lo, double hi) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Expr FieldSampler::random_function() {
  const int n = chart_->dim();
  std::vector<Expr> terms;
  if (int c = uniform_int(-3, 3)) terms.emplace_back(c);
  for (int i = 0; i < n; ++i)
    if (int c = uniform_int(-3, 3)) terms.push_back(Expr(c) * Expr::var(i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (int c = uniform_int(-3, 3)) terms.push_back(Expr(c) * Expr::var(i) * Expr::var(j));
  Expr f = sum(terms);
  if (chart_->trig() && uniform_int(0, 1) == 1) {
    const Expr x = Expr::var(uniform_int(0, n - 1));
    f = f * (uniform_int(0, 1) == 0 ? sin(x) : cos(x));
  }
  return f;
}

VectorField FieldSampler::random_vector_field() {
  std::vector<Expr> c;
  for (int i = 0; i < chart_->dim(); ++i) c.push_back(random_function());
  return VectorField(chart_, std::move(c));
}

std::vector<VectorField> FieldSampler::random_vector_fields(int count) {
  std::vector<VectorField> out;
  for (int i = 0; i < count; ++i) out.push_back(random_vector_field());
  return out;
}

PForm FieldSampler::random_form(int degree) {
  if (degree > chart_->dim())
    throw DegreeError("cannot sample a " + std::to_string(degree) + "-form on a " + std::to_string(chart_->dim()) +
                      "-dimensional chart");
  PForm zero(chart_, degree);
  std::vector<Expr> c;
  for (std::size_t i = 0; i < zero.components().size(); ++i) c.push_back(random_function());
  return PForm(chart_, degree, std::move(c));
}

Point FieldSampler::random_point() {
  Point p;
  for (const auto& iv : chart_->domain()) p.x.push_back(uniform_real(iv.lo, iv.hi));
  return p;
}

std::vector<Point> FieldSampler::random_points(int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(random_point());
  return out;
}

}  // namespace extcalc
