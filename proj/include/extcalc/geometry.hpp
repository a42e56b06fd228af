#pragma once

// Charts, tensor fields with symbolic components, and basis-free exterior
// calculus on a single coordinate chart.
//
// Conventions:
//  * forms are stored by components on strictly increasing index tuples;
//  * wedge uses the unnormalised shuffle sum, so (dx^dy)(d/dx, d/dy) = 1;
//  * d is the matching coordinate formula, d(f dx^I) = df ^ dx^I, which
//    agrees with the alternating-sum (intrinsic) formula.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "extcalc/symexpr.hpp"

namespace extcalc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class ChartMismatch : public std::invalid_argument {
 public:
  ChartMismatch() : std::invalid_argument("objects live on different charts") {}
};

class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Chart {
 public:
  /// `trig` marks charts whose geometry uses trigonometric functions; the
  /// field sampler then mixes sin/cos factors into random components.
  Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain, bool trig = false);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::vector<Interval>& domain() const { return domain_; }
  bool trig() const { return trig_; }

  int index_of(std::string_view coord) const;
  Expr coord(int i) const { return Expr::var(i); }
  Expr coord(std::string_view name) const { return Expr::var(index_of(name)); }
  Expr parse(std::string_view text) const { return extcalc::parse(text, coords_); }
  std::string print(const Expr& e) const { return extcalc::print(e, coords_); }

 private:
  std::string name_;
  std::vector<std::string> coords_;
  std::vector<Interval> domain_;
  bool trig_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain,
                    bool trig = false);

/// A coordinate assignment, indexed in chart coordinate order.
struct Point {
  std::vector<double> x;
  double operator[](std::size_t i) const { return x[i]; }
};

/// Scalar fields are plain expressions in the chart coordinates.
using ScalarField = Expr;

double evaluate_at(const Expr& f, const Point& p);

// ---------------------------------------------------------------------------

class VectorField {
 public:
  VectorField(ChartPtr chart, std::vector<Expr> components);

  static VectorField zero(ChartPtr chart);
  /// The coordinate field d/dx^i.
  static VectorField coordinate(ChartPtr chart, int i);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return static_cast<int>(comps_.size()); }
  const Expr& operator[](int i) const { return comps_[i]; }
  const std::vector<Expr>& components() const { return comps_; }
  std::vector<double> at(const Point& p) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a);
  friend VectorField operator*(const Expr& f, const VectorField& a);

 private:
  ChartPtr chart_;
  std::vector<Expr> comps_;
};

void require_same_chart(const ChartPtr& a, const ChartPtr& b);

/// X(f) = sum_i X^i df/dx^i.
ScalarField apply_vector_field(const VectorField& X, const ScalarField& f);

/// [X,Y]^k = X(Y^k) - Y(X^k).
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// ---------------------------------------------------------------------------

/// Strictly increasing index tuples of length p drawn from {0..n-1}, in
/// lexicographic order. Cached.
const std::vector<std::vector<int>>& index_tuples(int n, int p);
/// Position of an increasing tuple in index_tuples(n, tuple.size()).
int tuple_position(int n, std::span<const int> tuple);

class PForm {
 public:
  /// The zero form of the given degree. Degrees above the chart dimension
  /// have no components and represent the canonical zero form.
  PForm(ChartPtr chart, int degree);
  PForm(ChartPtr chart, int degree, std::vector<Expr> components);

  static PForm scalar(ChartPtr chart, Expr f);
  static PForm one_form(ChartPtr chart, std::vector<Expr> components);
  /// dx^i
  static PForm differential(ChartPtr chart, int i);

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }
  int dim() const { return chart_->dim(); }
  const std::vector<Expr>& components() const { return comps_; }

  /// Component on an increasing tuple.
  const Expr& component(std::span<const int> increasing) const;
  /// Component on an arbitrary index list: antisymmetrised, zero on repeats.
  Expr component_any(std::span<const int> indices) const;

  /// Theta(X_1, ..., X_p).
  Expr operator()(std::span<const VectorField> args) const;
  Expr operator()(std::initializer_list<VectorField> args) const {
    return (*this)(std::span<const VectorField>(args.begin(), args.size()));
  }

  friend PForm operator+(const PForm& a, const PForm& b);
  friend PForm operator-(const PForm& a, const PForm& b);
  friend PForm operator*(const Expr& f, const PForm& a);

 private:
  ChartPtr chart_;
  int degree_;
  std::vector<Expr> comps_;
};

PForm wedge(const PForm& a, const PForm& b);
/// (a^b)(X_1..X_{p+q}) evaluated by the shuffle sum, without materialising
/// the product; valid even when p+q exceeds the chart dimension (value 0).
Expr wedge_at(const PForm& a, const PForm& b, std::span<const VectorField> args);
PForm interior_product(const VectorField& X, const PForm& form);
PForm exterior_derivative(const PForm& form);

/// A form described by its action on vector fields (not necessarily
/// stored by components). Must be alternating and function-linear.
using FormRule = std::function<Expr(std::span<const VectorField>)>;

/// Materialises components by evaluating `rule` on coordinate fields.
PForm form_from_rule(const ChartPtr& chart, int degree, const FormRule& rule);

/// d applied through the alternating-sum formula
///   sum_i (-1)^i X_i(rule(..^i..)) + sum_{i<j} (-1)^{i+j} rule([X_i,X_j], ..^i..^j..)
/// (indices from 0). `degree` is the degree of the form the rule describes.
Expr exterior_derivative_at(const FormRule& rule, int degree, std::span<const VectorField> args);
Expr exterior_derivative_at(const PForm& form, std::span<const VectorField> args);

/// Numeric value of d(form)(X_1..X_{p+1}) at p by the intrinsic formula.
double exterior_derivative_intrinsic(const PForm& form, std::span<const VectorField> args, const Point& p);

// ---------------------------------------------------------------------------

/// Dense n x n matrix of expressions (row-major).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
  static SymMatrix identity(int n);

  int size() const { return n_; }
  Expr& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  const Expr& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

  Expr determinant() const;
  /// Adjugate over determinant.
  SymMatrix inverse() const;
  SymMatrix transpose() const;
  std::vector<double> at(const Point& p) const;

  friend SymMatrix operator*(const SymMatrix& a, const SymMatrix& b);

 private:
  int n_ = 0;
  std::vector<Expr> a_;
};

// ---------------------------------------------------------------------------

enum class ValueKind { Scalar, Vector, Covector, Endomorphism };

const char* to_string(ValueKind kind);

/// A value of a tensor-valued form at given arguments. Vector and covector
/// values have n coordinate components; an endomorphism A stores A^a_b at
/// comps[a*n + b], acting as (A v)^a = A^a_b v^b.
struct TensorValue {
  ValueKind kind = ValueKind::Scalar;
  ChartPtr chart;
  std::vector<Expr> comps;

  static TensorValue scalar(ChartPtr chart, Expr f);
  static TensorValue vector(const VectorField& v);
  static TensorValue covector(const PForm& one_form);
  static TensorValue endomorphism(ChartPtr chart, const SymMatrix& m);

  Expr as_scalar() const;
  VectorField as_vector() const;
  PForm as_covector() const;
  SymMatrix as_matrix() const;

  friend TensorValue operator+(const TensorValue& a, const TensorValue& b);
  friend TensorValue operator-(const TensorValue& a, const TensorValue& b);
  friend TensorValue operator*(const Expr& f, const TensorValue& a);
};

TensorValue zero_value(ValueKind kind, const ChartPtr& chart);

/// Contracts a covector or endomorphism value with a vector; a covector gives
/// a scalar value, an endomorphism a vector value.
TensorValue contract(const TensorValue& value, const VectorField& v);

/// What a tensor-valued form represents; tensor wedge products are only
/// defined for specific pairings of roles.
enum class FormRole {
  Generic,
  Soldering,               // I
  CovectorDifferential,    // nabla theta for a 1-form theta
  VectorDifferential,      // nabla Z
  Torsion,                 // T
  Curvature,               // R, endomorphism valued
  CurvatureOnVector,       // R_Z
  CurvatureCovector,       // R_theta : (X,Y) -> theta o R(X,Y)
};

const char* to_string(FormRole role);

/// Alternating, function-linear map from k vector fields to TensorValues.
class TensorValuedForm {
 public:
  using Rule = std::function<TensorValue(std::span<const VectorField>)>;

  TensorValuedForm(ChartPtr chart, ValueKind kind, int arity, Rule rule, FormRole role = FormRole::Generic);

  const ChartPtr& chart() const { return chart_; }
  ValueKind kind() const { return kind_; }
  int arity() const { return arity_; }
  FormRole role() const { return role_; }

  TensorValue operator()(std::span<const VectorField> args) const;
  TensorValue operator()(std::initializer_list<VectorField> args) const {
    return (*this)(std::span<const VectorField>(args.begin(), args.size()));
  }

 private:
  ChartPtr chart_;
  ValueKind kind_;
  int arity_;
  Rule rule_;
  FormRole role_;
};

/// The identity endomorphism viewed as a vector-valued 1-form.
TensorValuedForm soldering_form(const ChartPtr& chart);
/// A scalar p-form as a scalar-valued tensor form.
TensorValuedForm as_tensor_valued(const PForm& form);

}  // namespace extcalc
