#pragma once

// Scalar-valued torsion and curvature forms built from a connection, the
// tensor-valued wedge pairings between them, the exterior covariant
// derivative and the Cartan forms of a coframe.
//
// Argument order convention: the removed arguments X_i (and X_j) are
// dropped and the rest keep their relative order; the inserted value goes in
// slot 1 (and the second inserted value in slot 2). Sums over i<j are strict.
// Every operator has an `_at` form evaluating the definition on arbitrary
// vector fields and a materialised PForm obtained on coordinate fields.

#include <span>
#include <vector>

#include "extcalc/connection.hpp"
#include "extcalc/geometry.hpp"

namespace extcalc {

using Args = std::span<const VectorField>;

class UnsupportedPairing : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// --- evaluators -------------------------------------------------------------

/// T_Theta(X_1..X_{p+1}) = sum_{i<j} (-1)^{i+j+1} Theta(T(X_i,X_j), ..).
Expr torsion_form_at(const Connection& nabla, const PForm& theta, Args args);
/// Xi_Theta(X_1..X_{p+1}) = sum_i (-1)^i (nabla_{X_i} Theta)(..).
Expr xi_form_at(const Connection& nabla, const PForm& theta, Args args);
/// omega_{Theta,Z}(X_1..X_p) = sum_i (-1)^{i+1} Theta(nabla_{X_i} Z, ..). A p-form.
Expr connection_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args);
/// R_{Theta,Z}(X_1..X_{p+1}) = sum_{i<j} (-1)^{i+j+1} Theta(R(X_i,X_j)Z, ..).
Expr curvature_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args);
/// Psi_{Theta,Z} = sum_{i<j} (-1)^{i+j} [(nabla_{X_i}Theta)(nabla_{X_j}Z, ..) - (nabla_{X_j}Theta)(nabla_{X_i}Z, ..)].
Expr psi_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args);
/// T_{Theta,Z}: zero for p = 1; otherwise over triples i<j<k with sign
/// (-1)^{i+j+k}, the three cyclic role assignments of Theta(T(X_i,X_j), nabla_{X_k}Z, ..).
Expr torsion_mixed_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args);
/// R_theta(X,Y,W) = theta(R(X,Y)W) + cyclic, for a 1-form theta.
Expr curvature_three_form_at(const Connection& nabla, const PForm& theta, Args args);
/// -cyclic( (nabla_X nabla_Y theta)(W) - (nabla_Y nabla_X theta)(W) - (nabla_[X,Y] theta)(W) ).
Expr curvature_three_form_second_derivative_at(const Connection& nabla, const PForm& theta, Args args);
/// (nabla Theta ^ T)(X_1..X_{p+2}): over i<k<j and cyclic role assignments,
/// (-1)^{i+j+k+1} (nabla_{X_k} Theta)(T(X_i,X_j), ..).
Expr nabla_form_wedge_torsion_at(const Connection& nabla, const PForm& theta, Args args);

/// Candidate curvature form of a p-form: dT_Theta - nabla Theta ^ T.
Expr curvature_form_candidate_at(const Connection& nabla, const PForm& theta, Args args);
/// sum_{a<b<c} (-1)^{a+b+c} Theta(R(X_a,X_b)X_c + cyclic, ..), 1-based indices.
Expr curvature_form_cyclic_at(const Connection& nabla, const PForm& theta, Args args);

// --- materialised forms -------------------------------------------------------

PForm torsion_form(const Connection& nabla, const PForm& theta);
PForm xi_form(const Connection& nabla, const PForm& theta);
PForm connection_form(const Connection& nabla, const PForm& theta, const VectorField& Z);
PForm curvature_form(const Connection& nabla, const PForm& theta, const VectorField& Z);
PForm psi_form(const Connection& nabla, const PForm& theta, const VectorField& Z);
PForm torsion_mixed_form(const Connection& nabla, const PForm& theta, const VectorField& Z);
PForm curvature_three_form(const Connection& nabla, const PForm& theta);
PForm nabla_form_wedge_torsion(const Connection& nabla, const PForm& theta);

// --- tensor-valued forms ----------------------------------------------------

/// nabla theta : X -> nabla_X theta for a 1-form theta.
TensorValuedForm covariant_differential(const Connection& nabla, const PForm& theta);
/// nabla Z : X -> nabla_X Z.
TensorValuedForm covariant_differential(const Connection& nabla, const VectorField& Z);
/// R_theta as a covector-valued 2-form: (X,Y) -> theta o R(X,Y).
TensorValuedForm curvature_covector(const Connection& nabla, const PForm& theta);

/// Wedge of tensor-valued forms followed by the natural contraction. Supported
/// pairings (first, second):
///   (nabla theta, I), (nabla theta, nabla Z), (nabla theta, T),
///   (nabla theta, R_Z), (R_theta, nabla Z)   -> scalar forms
///   (R, I)                                   -> vector-valued 3-form
/// The first factor takes the leading arguments of each shuffle.
TensorValuedForm tensor_wedge(const TensorValuedForm& a, const TensorValuedForm& b);

/// Scalar-valued tensor form as a PForm (components on coordinate fields).
PForm to_pform(const TensorValuedForm& form);

/// d^nabla A(X_0..X_k) = sum_i (-1)^i nabla_{X_i}(A(..)) + sum_{i<j} (-1)^{i+j} A([X_i,X_j], ..).
/// For arity 0 this is nabla A. Value kind must be vector or endomorphism.
TensorValuedForm exterior_covariant_derivative(const Connection& nabla, const TensorValuedForm& a);
/// d^nabla of a vector field, i.e. nabla Z.
TensorValuedForm exterior_covariant_derivative(const Connection& nabla, const VectorField& Z);

// --- coframes ---------------------------------------------------------------

struct CoFrame {
  std::vector<VectorField> frame;  // U_a
  std::vector<PForm> coframe;      // theta^a

  static CoFrame coordinate(const ChartPtr& chart);
  /// Dual coframe computed by symbolic matrix inversion.
  static CoFrame from_frame(std::vector<VectorField> frame);
  /// max |theta^a(U_b) - delta^a_b| over the points.
  double duality_residual(std::span<const Point> points) const;
};

struct CartanForms {
  int n = 0;
  std::vector<PForm> omega;      // omega^a_b at a*n + b
  std::vector<PForm> torsion;    // Theta^a
  std::vector<PForm> curvature;  // Omega^a_b at a*n + b
  const PForm& connection_form(int a, int b) const { return omega[a * n + b]; }
  const PForm& curvature_form(int a, int b) const { return curvature[a * n + b]; }
};

/// omega^a_b(V) = theta^a(nabla_V U_b), Theta^a(X,Y) = theta^a(T(X,Y)),
/// Omega^a_b(X,Y) = theta^a(R(X,Y)U_b). Throws std::domain_error if the
/// coframe is not dual to the frame at the points.
CartanForms cartan_coframe_forms(const Connection& nabla, const CoFrame& frame, std::span<const Point> points,
                                 double tol = 1e-10);

}  // namespace extcalc
