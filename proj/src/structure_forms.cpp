#include "extcalc/structure_forms.hpp"

#include <cmath>
#include <stdexcept>

namespace extcalc {

namespace {

int sign_of(int exponent) { return exponent % 2 == 0 ? 1 : -1; }

Expr signed_term(int exponent, const Expr& e) { return sign_of(exponent) > 0 ? e : -e; }

/// front..., then args with the positions in `skip` removed.
std::vector<VectorField> assemble(std::initializer_list<VectorField> front, Args args,
                                  std::initializer_list<std::size_t> skip) {
  std::vector<VectorField> out(front);
  for (std::size_t m = 0; m < args.size(); ++m) {
    bool skipped = false;
    for (std::size_t s : skip) skipped = skipped || s == m;
    if (!skipped) out.push_back(args[m]);
  }
  return out;
}

void require_degree(const PForm& theta, int min_degree) {
  if (theta.degree() < min_degree)
    throw DegreeError("operator needs a form of degree at least " + std::to_string(min_degree));
}

void require_args(std::size_t got, int expected) {
  if (static_cast<int>(got) != expected)
    throw DegreeError("expected " + std::to_string(expected) + " arguments, got " + std::to_string(got));
}

void require_chart(const Connection& nabla, const PForm& theta, Args args) {
  require_same_chart(nabla.chart(), theta.chart());
  for (const auto& a : args) require_same_chart(nabla.chart(), a.chart());
}

VectorField torsion_vector(const TensorValuedForm& T, const VectorField& X, const VectorField& Y) {
  return T({X, Y}).as_vector();
}

std::vector<PForm> derivatives_along(const Connection& nabla, const PForm& theta, Args args) {
  std::vector<PForm> out;
  for (const auto& X : args) out.push_back(covariant_derivative(nabla, X, theta));
  return out;
}

std::vector<VectorField> derivatives_of(const Connection& nabla, const VectorField& Z, Args args) {
  std::vector<VectorField> out;
  for (const auto& X : args) out.push_back(covariant_derivative(nabla, X, Z));
  return out;
}

}  // namespace

Expr torsion_form_at(const Connection& nabla, const PForm& theta, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 1);
  require_chart(nabla, theta, args);
  const TensorValuedForm T = torsion(nabla);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i)
    for (std::size_t j = i + 1; j < args.size(); ++j) {
      Expr v = theta(assemble({torsion_vector(T, args[i], args[j])}, args, {i, j}));
      terms.push_back(signed_term(static_cast<int>(i + j + 3), v));
    }
  return sum(terms);
}

Expr xi_form_at(const Connection& nabla, const PForm& theta, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 1);
  require_chart(nabla, theta, args);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Expr v = covariant_derivative(nabla, args[i], theta)(assemble({}, args, {i}));
    terms.push_back(signed_term(static_cast<int>(i + 1), v));
  }
  return sum(terms);
}

Expr connection_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree());
  require_chart(nabla, theta, args);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Expr v = theta(assemble({covariant_derivative(nabla, args[i], Z)}, args, {i}));
    terms.push_back(signed_term(static_cast<int>(i + 2), v));
  }
  return sum(terms);
}

Expr curvature_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 1);
  require_chart(nabla, theta, args);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i)
    for (std::size_t j = i + 1; j < args.size(); ++j) {
      VectorField r = curvature_from_components(nabla, args[i], args[j], Z);
      terms.push_back(signed_term(static_cast<int>(i + j + 3), theta(assemble({r}, args, {i, j}))));
    }
  return sum(terms);
}

Expr psi_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 1);
  require_chart(nabla, theta, args);
  const auto dtheta = derivatives_along(nabla, theta, args);
  const auto dZ = derivatives_of(nabla, Z, args);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < args.size(); ++i)
    for (std::size_t j = i + 1; j < args.size(); ++j) {
      Expr v = dtheta[i](assemble({dZ[j]}, args, {i, j})) - dtheta[j](assemble({dZ[i]}, args, {i, j}));
      terms.push_back(signed_term(static_cast<int>(i + j + 2), v));
    }
  return sum(terms);
}

Expr torsion_mixed_form_at(const Connection& nabla, const PForm& theta, const VectorField& Z, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 1);
  require_chart(nabla, theta, args);
  if (theta.degree() == 1) return Expr();
  const TensorValuedForm T = torsion(nabla);
  const auto dZ = derivatives_of(nabla, Z, args);
  const std::size_t m = args.size();
  std::vector<Expr> terms;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        const std::size_t roles[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
        std::vector<Expr> cyc;
        for (const auto& r : roles)
          cyc.push_back(theta(assemble({torsion_vector(T, args[r[0]], args[r[1]]), dZ[r[2]]}, args, {a, b, c})));
        terms.push_back(signed_term(static_cast<int>(a + b + c + 3), sum(cyc)));
      }
  return sum(terms);
}

Expr curvature_three_form_at(const Connection& nabla, const PForm& theta, Args args) {
  if (theta.degree() != 1) throw DegreeError("the curvature 3-form takes a 1-form");
  require_args(args.size(), 3);
  require_chart(nabla, theta, args);
  std::vector<Expr> terms;
  for (int s = 0; s < 3; ++s) {
    const VectorField& X = args[s];
    const VectorField& Y = args[(s + 1) % 3];
    const VectorField& W = args[(s + 2) % 3];
    terms.push_back(theta({curvature_from_components(nabla, X, Y, W)}));
  }
  return sum(terms);
}

Expr curvature_three_form_second_derivative_at(const Connection& nabla, const PForm& theta, Args args) {
  if (theta.degree() != 1) throw DegreeError("the curvature 3-form takes a 1-form");
  require_args(args.size(), 3);
  require_chart(nabla, theta, args);
  const auto d1 = derivatives_along(nabla, theta, args);
  std::vector<Expr> terms;
  for (int s = 0; s < 3; ++s) {
    const int x = s, y = (s + 1) % 3, w = (s + 2) % 3;
    const VectorField& X = args[x];
    const VectorField& Y = args[y];
    const VectorField& W = args[w];
    terms.push_back(covariant_derivative(nabla, X, d1[y])({W}));
    terms.push_back(-covariant_derivative(nabla, Y, d1[x])({W}));
    terms.push_back(-covariant_derivative(nabla, lie_bracket(X, Y), theta)({W}));
  }
  return -sum(terms);
}

Expr nabla_form_wedge_torsion_at(const Connection& nabla, const PForm& theta, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 2);
  require_chart(nabla, theta, args);
  const TensorValuedForm T = torsion(nabla);
  const auto dtheta = derivatives_along(nabla, theta, args);
  const std::size_t m = args.size();
  std::vector<Expr> terms;
  // positions a<b<c; the displayed roles are i=a, k=b, j=c and their cyclic shifts
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        const std::size_t roles[3][3] = {{a, c, b}, {c, b, a}, {b, a, c}};  // (i, j, k)
        std::vector<Expr> cyc;
        for (const auto& r : roles)
          cyc.push_back(dtheta[r[2]](assemble({torsion_vector(T, args[r[0]], args[r[1]])}, args, {a, b, c})));
        terms.push_back(signed_term(static_cast<int>(a + b + c + 4), sum(cyc)));
      }
  return sum(terms);
}

Expr curvature_form_candidate_at(const Connection& nabla, const PForm& theta, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 2);
  FormRule t_theta = [&nabla, &theta](Args a) { return torsion_form_at(nabla, theta, a); };
  return exterior_derivative_at(t_theta, theta.degree() + 1, args) - nabla_form_wedge_torsion_at(nabla, theta, args);
}

Expr curvature_form_cyclic_at(const Connection& nabla, const PForm& theta, Args args) {
  require_degree(theta, 1);
  require_args(args.size(), theta.degree() + 2);
  require_chart(nabla, theta, args);
  const std::size_t m = args.size();
  std::vector<Expr> terms;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        VectorField r = curvature_from_components(nabla, args[a], args[b], args[c]) +
                        curvature_from_components(nabla, args[b], args[c], args[a]) +
                        curvature_from_components(nabla, args[c], args[a], args[b]);
        terms.push_back(signed_term(static_cast<int>(a + b + c + 3), theta(assemble({r}, args, {a, b, c}))));
      }
  return sum(terms);
}

// ---------------------------------------------------------------------------

PForm torsion_form(const Connection& nabla, const PForm& theta) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 1, [&](Args a) { return torsion_form_at(nabla, theta, a); });
}

PForm xi_form(const Connection& nabla, const PForm& theta) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 1, [&](Args a) { return xi_form_at(nabla, theta, a); });
}

PForm connection_form(const Connection& nabla, const PForm& theta, const VectorField& Z) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree(),
                        [&](Args a) { return connection_form_at(nabla, theta, Z, a); });
}

PForm curvature_form(const Connection& nabla, const PForm& theta, const VectorField& Z) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 1,
                        [&](Args a) { return curvature_form_at(nabla, theta, Z, a); });
}

PForm psi_form(const Connection& nabla, const PForm& theta, const VectorField& Z) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 1, [&](Args a) { return psi_form_at(nabla, theta, Z, a); });
}

PForm torsion_mixed_form(const Connection& nabla, const PForm& theta, const VectorField& Z) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 1,
                        [&](Args a) { return torsion_mixed_form_at(nabla, theta, Z, a); });
}

PForm curvature_three_form(const Connection& nabla, const PForm& theta) {
  return form_from_rule(theta.chart(), 3, [&](Args a) { return curvature_three_form_at(nabla, theta, a); });
}

PForm nabla_form_wedge_torsion(const Connection& nabla, const PForm& theta) {
  require_degree(theta, 1);
  return form_from_rule(theta.chart(), theta.degree() + 2,
                        [&](Args a) { return nabla_form_wedge_torsion_at(nabla, theta, a); });
}

// ---------------------------------------------------------------------------

TensorValuedForm covariant_differential(const Connection& nabla, const PForm& theta) {
  if (theta.degree() != 1) throw DegreeError("covariant differential as a covector-valued form needs a 1-form");
  require_same_chart(nabla.chart(), theta.chart());
  return TensorValuedForm(
      theta.chart(), ValueKind::Covector, 1,
      [nabla, theta](Args a) { return TensorValue::covector(covariant_derivative(nabla, a[0], theta)); },
      FormRole::CovectorDifferential);
}

TensorValuedForm covariant_differential(const Connection& nabla, const VectorField& Z) {
  require_same_chart(nabla.chart(), Z.chart());
  return TensorValuedForm(
      Z.chart(), ValueKind::Vector, 1,
      [nabla, Z](Args a) { return TensorValue::vector(covariant_derivative(nabla, a[0], Z)); },
      FormRole::VectorDifferential);
}

TensorValuedForm curvature_covector(const Connection& nabla, const PForm& theta) {
  if (theta.degree() != 1) throw DegreeError("R_theta needs a 1-form");
  require_same_chart(nabla.chart(), theta.chart());
  const TensorValuedForm R = curvature(nabla);
  return TensorValuedForm(
      theta.chart(), ValueKind::Covector, 2,
      [R, theta](Args a) {
        const SymMatrix m = R(a).as_matrix();
        const int n = m.size();
        std::vector<Expr> c(n);
        for (int k = 0; k < n; ++k) {
          std::vector<Expr> terms;
          for (int l = 0; l < n; ++l) terms.push_back(theta.components()[l] * m(l, k));
          c[k] = sum(terms);
        }
        return TensorValue::covector(PForm(theta.chart(), 1, std::move(c)));
      },
      FormRole::CurvatureCovector);
}

namespace {

bool supported_pairing(FormRole a, FormRole b) {
  using R = FormRole;
  if (a == R::CovectorDifferential)
    return b == R::Soldering || b == R::VectorDifferential || b == R::Torsion || b == R::CurvatureOnVector;
  if (a == R::CurvatureCovector) return b == R::VectorDifferential;
  if (a == R::Curvature) return b == R::Soldering;
  return false;
}

}  // namespace

TensorValuedForm tensor_wedge(const TensorValuedForm& a, const TensorValuedForm& b) {
  if (!supported_pairing(a.role(), b.role()))
    throw UnsupportedPairing(std::string("unsupported tensor wedge pairing (") + to_string(a.role()) + ", " +
                             to_string(b.role()) + ")");
  require_same_chart(a.chart(), b.chart());
  const int p = a.arity(), q = b.arity();
  const ValueKind kind = a.kind() == ValueKind::Endomorphism ? ValueKind::Vector : ValueKind::Scalar;
  return TensorValuedForm(a.chart(), kind, p + q, [a, b, p, q, kind](Args args) {
    TensorValue total = zero_value(kind, a.chart());
    for (const auto& pos : index_tuples(p + q, p)) {
      std::vector<bool> first(p + q, false);
      for (int m : pos) first[m] = true;
      std::vector<VectorField> A, B;
      int inversions = 0, seen_second = 0;
      for (int m = 0; m < p + q; ++m) {
        if (first[m]) {
          A.push_back(args[m]);
          inversions += seen_second;
        } else {
          B.push_back(args[m]);
          ++seen_second;
        }
      }
      TensorValue term = contract(a(A), b(B).as_vector());
      total = inversions % 2 == 0 ? total + term : total - term;
    }
    return total;
  });
}

PForm to_pform(const TensorValuedForm& form) {
  if (form.kind() != ValueKind::Scalar) throw std::invalid_argument("to_pform needs a scalar-valued form");
  return form_from_rule(form.chart(), form.arity(), [&form](Args a) { return form(a).as_scalar(); });
}

TensorValuedForm exterior_covariant_derivative(const Connection& nabla, const TensorValuedForm& a) {
  if (a.kind() != ValueKind::Vector && a.kind() != ValueKind::Endomorphism)
    throw std::invalid_argument(std::string("exterior covariant derivative of a ") + to_string(a.kind()) +
                                "-valued form is not supported");
  require_same_chart(nabla.chart(), a.chart());
  const int k = a.arity();
  return TensorValuedForm(a.chart(), a.kind(), k + 1, [nabla, a](Args args) {
    TensorValue total = zero_value(a.kind(), a.chart());
    for (std::size_t i = 0; i < args.size(); ++i) {
      TensorValue t = covariant_derivative(nabla, args[i], a(assemble({}, args, {i})));
      total = i % 2 == 0 ? total + t : total - t;
    }
    for (std::size_t i = 0; i < args.size(); ++i)
      for (std::size_t j = i + 1; j < args.size(); ++j) {
        TensorValue t = a(assemble({lie_bracket(args[i], args[j])}, args, {i, j}));
        total = (i + j) % 2 == 0 ? total + t : total - t;
      }
    return total;
  });
}

TensorValuedForm exterior_covariant_derivative(const Connection& nabla, const VectorField& Z) {
  return covariant_differential(nabla, Z);
}

// ---------------------------------------------------------------------------

CoFrame CoFrame::coordinate(const ChartPtr& chart) {
  CoFrame f;
  for (int i = 0; i < chart->dim(); ++i) {
    f.frame.push_back(VectorField::coordinate(chart, i));
    f.coframe.push_back(PForm::differential(chart, i));
  }
  return f;
}

CoFrame CoFrame::from_frame(std::vector<VectorField> frame) {
  if (frame.empty()) throw std::invalid_argument("empty frame");
  const ChartPtr chart = frame[0].chart();
  const int n = chart->dim();
  if (static_cast<int>(frame.size()) != n) throw std::invalid_argument("frame needs n vector fields");
  SymMatrix m(n);
  for (int b = 0; b < n; ++b) {
    require_same_chart(chart, frame[b].chart());
    for (int i = 0; i < n; ++i) m(i, b) = frame[b][i];
  }
  const SymMatrix inv = m.inverse();
  CoFrame f;
  f.frame = std::move(frame);
  for (int a = 0; a < n; ++a) {
    std::vector<Expr> c(n);
    for (int i = 0; i < n; ++i) c[i] = inv(a, i);
    f.coframe.emplace_back(chart, 1, std::move(c));
  }
  return f;
}

double CoFrame::duality_residual(std::span<const Point> points) const {
  const std::size_t n = frame.size();
  if (coframe.size() != n) return INFINITY;
  std::vector<Expr> pairings;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) pairings.push_back(coframe[a]({frame[b]}) - Expr(a == b ? 1 : 0));
  Tape tape(pairings);
  double worst = 0;
  for (const auto& p : points)
    for (double v : tape.run(p.x)) worst = std::max(worst, std::abs(v));
  return worst;
}

CartanForms cartan_coframe_forms(const Connection& nabla, const CoFrame& frame, std::span<const Point> points,
                                 double tol) {
  const double residual = frame.duality_residual(points);
  if (!(residual <= tol)) throw std::domain_error("coframe is not dual to the frame (residual " +
                                                  std::to_string(residual) + ")");
  const ChartPtr& chart = nabla.chart();
  const int n = chart->dim();
  CartanForms out;
  out.n = n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const PForm& th = frame.coframe[a];
      const VectorField& U = frame.frame[b];
      out.omega.push_back(form_from_rule(chart, 1, [&](Args v) { return th({covariant_derivative(nabla, v[0], U)}); }));
      out.curvature.push_back(
          form_from_rule(chart, 2, [&](Args v) { return th({curvature_from_components(nabla, v[0], v[1], U)}); }));
    }
  const TensorValuedForm T = torsion(nabla);
  for (int a = 0; a < n; ++a) {
    const PForm& th = frame.coframe[a];
    out.torsion.push_back(form_from_rule(chart, 2, [&](Args v) { return th({T(v).as_vector()}); }));
  }
  return out;
}

}  // namespace extcalc
