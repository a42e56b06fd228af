#pragma once

// Concrete geometries: baseline connections, a contact metric structure, an
// adapted connection for a codimension-one foliation and the evolution space
// of a second-order ODE with its Cartan form.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "extcalc/connection.hpp"
#include "extcalc/identity_suite.hpp"
#include "extcalc/structure_forms.hpp"

namespace extcalc {

struct GeometryCase {
  std::string id;
  std::string description;
  ChartPtr chart;
  Connection connection;
  /// When set, left-hand sides of checks use this connection instead
  /// (mutation testing of the harness).
  std::optional<Connection> lhs_connection;
  std::optional<Metric> metric;
  std::optional<CoFrame> coframe;
  /// Distinguished objects as (label, printed value) pairs.
  std::vector<std::pair<std::string, std::string>> details;
  std::vector<IdentityCheck> case_checks;

  const Connection& lhs() const { return lhs_connection ? *lhs_connection : connection; }
  /// The declared coframe, or the coordinate one.
  CoFrame frame() const { return coframe ? *coframe : CoFrame::coordinate(chart); }
};

class UnknownCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A declared structural property did not hold numerically.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string property, const std::string& detail)
      : std::runtime_error("validation failed: " + property + " (" + detail + ")"), property_(std::move(property)) {}
  const std::string& property() const { return property_; }

 private:
  std::string property_;
};

struct CaseOptions {
  std::uint64_t seed = 0;  // used by random_poly when the id carries no seed
  int dim = 3;             // likewise
};

struct CaseInfo {
  std::string id;
  std::string description;
};

/// The built-in case ids with one-line descriptions.
const std::vector<CaseInfo>& case_catalog();

/// Builds and validates a case. Besides the catalog ids, "random_poly:SEED"
/// and "random_poly:SEED:DIM" select a specific random connection.
GeometryCase build_case(std::string_view id, const CaseOptions& options = {});

/// Numeric checks run at load: the coframe is dual, the metric is symmetric
/// and nondegenerate, and, if `levi_civita`, the connection is torsion-free
/// and metric compatible. Throws ValidationError.
void validate_case(const GeometryCase& c, bool levi_civita);

std::string to_text(const VectorField& X);
std::string to_text(const PForm& form);

/// Copy of `base` whose left-hand-side connection has Gamma^k_{ij} increased by delta.
GeometryCase mutate_case(const GeometryCase& base, int k, int i, int j, const Expr& delta);

/// Christoffel symbols that are random affine functions with integer
/// coefficients in [-2, 2].
Connection random_poly_connection(const ChartPtr& chart, std::uint64_t seed);

// --- contact structure ----------------------------------------------------

struct ContactStructure {
  PForm alpha;
  VectorField reeb;
  Metric metric;
  SymMatrix phi;  // Phi^a_b
  CoFrame frame;  // (e1, e2, V) with dual (eta1, eta2, alpha)

  VectorField apply_phi(const VectorField& X) const;
};

/// Reeb field from ker(d alpha) normalised by alpha(V) = 1, then
/// g = 1/2 (eta1^2 + eta2^2) + alpha^2 and Phi = -e2 (x) eta1 + e1 (x) eta2 for
/// e1 = P(d_x), e2 = P(d_y) / d alpha(e1, P(d_y)), with P the projection onto ker
/// alpha along V. Three-dimensional charts only. Every invariant is checked
/// at `points`; throws ValidationError naming the violated one.
ContactStructure derive_contact_structure(const PForm& alpha, std::span<const Point> points);

/// Named residuals of the contact structure invariants at the points, using
/// random argument fields from `sampler`. The nondegeneracy of alpha ^ d alpha
/// is reported as 0 when |alpha ^ d alpha| > 1e-9 at every point, else +inf.
std::vector<std::pair<std::string, double>> contact_invariant_residuals(const ContactStructure& c,
                                                                        std::span<const Point> points,
                                                                        FieldSampler& sampler);

// --- second-order ODE on the evolution space ------------------------------

struct SodeStructure {
  ChartPtr chart;  // (t, x^a, u^a)
  int n = 0;
  std::vector<Expr> force;        // f^a
  std::vector<Expr> gamma;        // Gamma^a_b = -1/2 df^a/du^b at a*n + b
  VectorField semispray;          // d_t + u^a d_x^a + f^a d_u^a
  SymMatrix vertical;             // S = V_a (x) theta^a
  std::vector<VectorField> horizontal;  // H_a
  std::vector<VectorField> vertical_fields;  // V_a
  CoFrame frame;                  // (Gamma, H_a, V_a) with dual (dt, theta^a, psi^a)

  int t_index() const { return 0; }
  int x_index(int a) const { return 1 + a; }
  int u_index(int a) const { return 1 + n + a; }
  const PForm& theta(int a) const { return frame.coframe[1 + a]; }
  const PForm& psi(int a) const { return frame.coframe[1 + n + a]; }
};

/// Evolution space of x'' = f(t, x, x'). `force` is parsed on the chart
/// (t, x, u) for n = 1 and (t, x1.., u1..) otherwise.
SodeStructure make_sode(int n, const std::vector<std::string>& force);

/// The Massa-Pagani connection: nabla Gamma = 0 and, for A^b_a(X) with
/// A(Gamma) = Gamma^b_a, A(H_c) = V_a(Gamma^b_c), A(V_c) = 0,
/// nabla_X H_a = A^b_a(X) H_b and nabla_X V_a = A^b_a(X) V_b.
/// The four defining properties are verified at `points`.
Connection derive_massa_pagani(const SodeStructure& sode, std::span<const Point> points);

/// Named residuals of nabla Gamma = 0, nabla dt = 0, nabla S = 0 and
/// R(Y1, Y2) = 0 for vertical Y1, Y2.
std::vector<std::pair<std::string, double>> massa_pagani_residuals(const SodeStructure& sode,
                                                                   const Connection& nabla,
                                                                   std::span<const Point> points,
                                                                   FieldSampler& sampler);

struct CartanForm {
  PForm theta_l;  // L dt + dL o S
  PForm omega;    // d theta_L
  SymMatrix hessian;  // g_ab = d^2 L / du^a du^b
  VectorField euler_lagrange;  // Gamma_L
};

/// Throws ValidationError if the Hessian is singular at a point.
CartanForm build_cartan_form(const SodeStructure& sode, const Expr& lagrangian, std::span<const Point> points);

/// g_ab psi^a ^ theta^b.
PForm multiplier_form(const SodeStructure& sode, const SymMatrix& g);

/// Numeric rank of the component matrix of a 2-form at a point, singular
/// values below 1e-8 times the largest counted as zero.
int numeric_rank(const PForm& two_form, const Point& p);

// --- foliation ------------------------------------------------------------

/// Check that T_theta restricted to D equals -(nabla theta ^ I) restricted to D,
/// with D spanned by `basis`. True for every connection exactly when theta is
/// Frobenius integrable.
IdentityCheck restricted_torsion_check(std::string id, PForm theta, std::vector<VectorField> basis);

}  // namespace extcalc
