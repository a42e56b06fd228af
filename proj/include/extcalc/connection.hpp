#pragma once

// Linear connections from Christoffel data.
//
// Convention: nabla_{d_i} d_j = Gamma^k_{ij} d_k. No symmetry is assumed.

#include <memory>
#include <span>
#include <vector>

#include "extcalc/geometry.hpp"

namespace extcalc {

class Connection {
 public:
  /// gamma[(k*n + i)*n + j] = Gamma^k_{ij}.
  Connection(ChartPtr chart, std::vector<Expr> gamma);

  static Connection flat(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  const Expr& gamma(int k, int i, int j) const;
  const std::vector<Expr>& gammas() const;

  Connection with_gamma(int k, int i, int j, Expr value) const;
  /// Gamma~^k_{ij} = (Gamma^k_{ij} + Gamma^k_{ji}) / 2.
  Connection symmetrized() const;

  /// T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}, index (k*n + i)*n + j.
  const std::vector<Expr>& torsion_components() const;
  /// R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik},
  /// index ((l*n + k)*n + i)*n + j, so that R(d_i, d_j) d_k = R^l_{kij} d_l.
  const std::vector<Expr>& curvature_components() const;

  /// W^k_j = X^i Gamma^k_{ij}, so nabla_X d_j = W^k_j d_k.
  SymMatrix connection_matrix(const VectorField& X) const;

 private:
  struct Data;
  ChartPtr chart_;
  std::shared_ptr<Data> data_;
};

class Metric {
 public:
  /// Symmetry of `g` is checked structurally or at sample points by validate().
  Metric(ChartPtr chart, SymMatrix g);

  const ChartPtr& chart() const { return chart_; }
  const Expr& operator()(int i, int j) const { return g_(i, j); }
  const SymMatrix& matrix() const { return g_; }
  const SymMatrix& inverse() const;
  Expr apply(const VectorField& X, const VectorField& Y) const;
  /// g(X, .) as a 1-form.
  PForm lower(const VectorField& X) const;

  /// Throws std::domain_error if g is asymmetric or singular at any point.
  void validate(std::span<const Point> points, double tol = 1e-12) const;

 private:
  ChartPtr chart_;
  SymMatrix g_;
  struct InverseCache;
  std::shared_ptr<InverseCache> inverse_;
};

// Covariant derivatives. Each requires a shared chart.
Expr covariant_derivative(const Connection& nabla, const VectorField& X, const Expr& f);
VectorField covariant_derivative(const Connection& nabla, const VectorField& X, const VectorField& Y);
PForm covariant_derivative(const Connection& nabla, const VectorField& X, const PForm& theta);
TensorValue covariant_derivative(const Connection& nabla, const VectorField& X, const TensorValue& value);
/// (nabla_X A)(Y_1..Y_k) = nabla_X(A(Y_1..Y_k)) - sum_i A(.., nabla_X Y_i, ..).
TensorValuedForm covariant_derivative(const Connection& nabla, const VectorField& X, const TensorValuedForm& A);

/// T(X,Y) = nabla_X Y - nabla_Y X - [X,Y], evaluated from the definition.
VectorField torsion_at(const Connection& nabla, const VectorField& X, const VectorField& Y);
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, evaluated from the definition.
VectorField curvature_at(const Connection& nabla, const VectorField& X, const VectorField& Y,
                         const VectorField& Z);
/// R(X,Y)Z contracted from curvature_components().
VectorField curvature_from_components(const Connection& nabla, const VectorField& X, const VectorField& Y,
                                      const VectorField& Z);

/// T as a vector-valued 2-form (computed from components).
TensorValuedForm torsion(const Connection& nabla);
/// R as an endomorphism-valued 2-form.
TensorValuedForm curvature(const Connection& nabla);
/// R_Z : (X,Y) -> R(X,Y)Z.
TensorValuedForm curvature_on(const Connection& nabla, const VectorField& Z);

/// Gamma^k_{ij} = 1/2 g^{kl}(d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
/// When points are given the metric is validated there first.
Connection levi_civita(const Metric& g, std::span<const Point> points = {});

/// (nabla_X g)(Y,Z).
Expr metric_derivative_at(const Connection& nabla, const Metric& g, const VectorField& X, const VectorField& Y,
                          const VectorField& Z);

/// Connection with nabla_{U_a} U_b = C^c_{ab} U_c for a frame U and its dual
/// coframe theta; coeffs[(c*n + a)*n + b] = C^c_{ab}.
Connection connection_from_frame(std::span<const VectorField> frame, std::span<const PForm> coframe,
                                 std::span<const Expr> coeffs);

}  // namespace extcalc
