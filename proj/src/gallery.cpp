#include "extcalc/gallery.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace extcalc {

namespace {

using VF = VectorField;

ChartPtr euclidean_chart(int n) {
  static const char* names[] = {"x", "y", "z", "w", "v", "s"};
  if (n < 1 || n > 6) throw std::invalid_argument("dimension must be between 1 and 6");
  std::vector<std::string> coords(names, names + n);
  return make_chart("R" + std::to_string(n), coords, std::vector<Interval>(n, Interval{-1.0, 1.0}));
}

std::string point_text(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << p.x[i];
  os << ")";
  return os.str();
}

void require_small(const std::string& property, double residual, double tol = 1e-9) {
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "residual " << residual << " exceeds " << tol;
    throw ValidationError(property, os.str());
  }
}

double max_abs_at(std::span<const Expr> exprs, std::span<const Point> points) {
  if (exprs.empty()) return 0.0;
  const Tape tape(exprs);
  double worst = 0.0;
  for (const auto& p : points)
    for (double v : tape.run(p.x)) worst = std::max(worst, std::isnan(v) ? INFINITY : std::abs(v));
  return worst;
}

double max_abs_at(const Expr& e, std::span<const Point> points) { return max_abs_at(std::span(&e, 1), points); }

std::vector<Expr> differences(const VF& a, const VF& b) {
  std::vector<Expr> out;
  for (int i = 0; i < a.dim(); ++i) out.push_back(a[i] - b[i]);
  return out;
}

std::string vector_text_impl(const VF& X) {
  const auto& coords = X.chart()->coords();
  std::string out;
  for (int i = 0; i < X.dim(); ++i) {
    if (X[i].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += X[i].is_one() ? "d_" + coords[i] : "(" + X.chart()->print(X[i]) + ") d_" + coords[i];
  }
  return out.empty() ? "0" : out;
}

std::string form_text_impl(const PForm& f) {
  const auto& coords = f.chart()->coords();
  const auto& tuples = index_tuples(f.dim(), f.degree());
  std::string out;
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    const Expr& c = f.components()[t];
    if (c.is_zero()) continue;
    std::string basis;
    for (int i : tuples[t]) basis += (basis.empty() ? "d" : "^d") + coords[i];
    if (!out.empty()) out += " + ";
    out += c.is_one() ? basis : "(" + f.chart()->print(c) + ") " + basis;
  }
  if (f.degree() == 0 && !f.components().empty()) return f.chart()->print(f.components()[0]);
  return out.empty() ? "0" : out;
}

std::string matrix_text(const ChartPtr& chart, const SymMatrix& m) {
  std::string out = "[";
  for (int r = 0; r < m.size(); ++r) {
    out += r ? "; " : "";
    for (int c = 0; c < m.size(); ++c) out += (c ? ", " : "") + chart->print(m(r, c));
  }
  return out + "]";
}

VF apply(const SymMatrix& m, const VF& X) {
  std::vector<Expr> c;
  for (int a = 0; a < m.size(); ++a) {
    std::vector<Expr> t;
    for (int b = 0; b < m.size(); ++b) t.push_back(m(a, b) * X[b]);
    c.push_back(sum(t));
  }
  return VF(X.chart(), std::move(c));
}

VF combination(FieldSampler& s, const std::vector<VF>& basis) {
  VF out = VF::zero(s.chart());
  for (const auto& b : basis) out = out + s.random_function() * b;
  return out;
}

std::vector<VF> combinations(FieldSampler& s, const std::vector<VF>& basis, int count) {
  std::vector<VF> out;
  for (int i = 0; i < count; ++i) out.push_back(combination(s, basis));
  return out;
}

IdentityCheck make_check(std::string id, std::string name, std::string anchor,
                         std::function<Residual(CheckInputs&)> build) {
  return IdentityCheck{std::move(id), std::move(name), std::move(anchor), {}, std::move(build)};
}

std::vector<Point> validation_points(const ChartPtr& chart, std::string_view tag) {
  FieldSampler s(chart, stable_hash(tag, 0x5eed));
  return s.random_points(20);
}

/// Torsion and curvature from components agree with the definitions, the
/// coframe is dual, and a declared Levi-Civita connection is torsion-free and
/// metric compatible.
void validate_common_impl(const GeometryCase& c, bool levi_civita_declared) {
  const auto points = validation_points(c.chart, c.id);
  FieldSampler s(c.chart, stable_hash(c.id + "/validate"));
  if (c.coframe) require_small("dual coframe", c.coframe->duality_residual(points));
  if (c.metric) {
    try {
      c.metric->validate(points);
    } catch (const std::exception& e) {
      throw ValidationError("metric nondegenerate and symmetric", e.what());
    }
  }
  if (levi_civita_declared) {
    require_small("torsion-free", max_abs_at(c.connection.torsion_components(), points));
    if (c.metric) {
      auto X = s.random_vector_fields(3);
      require_small("metric compatible",
                    max_abs_at(metric_derivative_at(c.connection, *c.metric, X[0], X[1], X[2]), points));
    }
  }
}

// --- baseline cases ---------------------------------------------------------

GeometryCase flat_euclidean() {
  const ChartPtr chart = euclidean_chart(3);
  GeometryCase c{"flat_euclidean", "R^3 with the flat connection, Gamma = 0", chart, Connection::flat(chart),
                 {}, Metric(chart, SymMatrix::identity(3)), CoFrame::coordinate(chart), {}, {}};
  c.details = {{"Gamma", "0"}, {"metric", "dx^2 + dy^2 + dz^2"}};
  validate_case(c, true);
  return c;
}

GeometryCase flat_with_torsion() {
  const ChartPtr chart = euclidean_chart(3);
  Connection nabla = Connection::flat(chart).with_gamma(2, 0, 1, 1).with_gamma(2, 1, 0, -1);
  GeometryCase c{"flat_with_torsion", "R^3 with Gamma^z_xy = 1, Gamma^z_yx = -1; flat with constant torsion",
                 chart, nabla, {}, {}, CoFrame::coordinate(chart), {}, {}};
  c.details = {{"Gamma^z_xy", "1"}, {"Gamma^z_yx", "-1"}, {"T(d_x, d_y)", "2 d_z"}};
  validate_case(c, false);
  return c;
}

GeometryCase sphere_lc() {
  const ChartPtr chart = make_chart("S2", {"phi", "psi"}, {{0.3, 2.8}, {0.0, 6.2}}, true);
  const Expr phi = chart->coord(0);
  SymMatrix g(2);
  g(0, 0) = 1;
  g(1, 1) = pow(sin(phi), 2);
  Metric metric(chart, g);
  std::vector<Expr> gamma(8);
  gamma[(0 * 2 + 1) * 2 + 1] = -(sin(phi) * cos(phi));
  gamma[(1 * 2 + 0) * 2 + 1] = cos(phi) / sin(phi);
  gamma[(1 * 2 + 1) * 2 + 0] = cos(phi) / sin(phi);
  Connection nabla(chart, gamma);

  const auto points = validation_points(chart, "sphere_lc");
  const Connection reference = levi_civita(metric, points);
  std::vector<Expr> diff;
  for (std::size_t i = 0; i < gamma.size(); ++i) diff.push_back(gamma[i] - reference.gammas()[i]);
  require_small("Christoffel symbols match the metric", max_abs_at(diff, points));

  GeometryCase c{"sphere_lc", "unit sphere (phi, psi), g = dphi^2 + sin^2 phi dpsi^2, Levi-Civita", chart, nabla,
                 {}, metric, CoFrame::coordinate(chart), {}, {}};
  c.details = {{"metric", "dphi^2 + sin(phi)^2 dpsi^2"},
               {"Gamma^phi_psipsi", "-sin(phi)*cos(phi)"},
               {"Gamma^psi_phipsi = Gamma^psi_psiphi", "cos(phi)/sin(phi)"}};
  validate_case(c, true);
  return c;
}

GeometryCase random_poly(std::uint64_t seed, int dim) {
  const ChartPtr chart = euclidean_chart(dim);
  std::string id = "random_poly:" + std::to_string(seed);
  if (dim != 3) id += ":" + std::to_string(dim);
  GeometryCase c{id, "R^" + std::to_string(dim) + " with random affine Christoffel symbols (seed " +
                         std::to_string(seed) + ")",
                 chart, random_poly_connection(chart, seed), {}, {}, CoFrame::coordinate(chart), {}, {}};
  c.details = {{"Gamma^x_xx", chart->print(c.connection.gamma(0, 0, 0))}};
  validate_case(c, false);
  return c;
}

// --- contact ------------------------------------------------------------------

GeometryCase contact_r3() {
  const ChartPtr chart = euclidean_chart(3);
  const PForm alpha = PForm::one_form(chart, {-chart->coord("y"), 0, 1});
  const auto points = validation_points(chart, "contact_r3");
  ContactStructure cs = derive_contact_structure(alpha, points);
  Connection nabla = levi_civita(cs.metric, points);

  GeometryCase c{"contact_r3", "contact form alpha = dz - y dx on R^3 with its contact metric, Levi-Civita",
                 chart, nabla, {}, cs.metric, cs.frame, {}, {}};
  c.details = {{"alpha", to_text(cs.alpha)},
               {"V", to_text(cs.reeb)},
               {"g", matrix_text(chart, cs.metric.matrix())},
               {"Phi", matrix_text(chart, cs.phi)}};
  validate_case(c, true);

  const PForm a = cs.alpha;
  const VF V = cs.reeb;
  const TensorValue phi = TensorValue::endomorphism(chart, cs.phi);
  auto& checks = c.case_checks;
  checks.push_back(make_check("contact.nabla_V_V", "nabla_V V = 0", "Reeb field is a geodesic", [=](CheckInputs& in) {
    Residual r;
    r.add(covariant_derivative(in.lhs, V, V), VF::zero(V.chart()));
    return r;
  }));
  checks.push_back(make_check("contact.nabla_V_alpha", "nabla_V alpha = 0", "alpha parallel along V",
                              [=](CheckInputs& in) {
                                VF X = in.sampler.random_vector_field();
                                Residual r;
                                r.add(covariant_derivative(in.lhs, V, a)({X}), Expr());
                                return r;
                              }));
  checks.push_back(make_check("contact.nabla_V_Phi", "nabla_V Phi = 0", "Phi parallel along V", [=](CheckInputs& in) {
    Residual r;
    r.add(covariant_derivative(in.lhs, V, phi), zero_value(ValueKind::Endomorphism, V.chart()));
    return r;
  }));
  checks.push_back(make_check("contact.omega_alpha_V", "omega_{alpha,V} = 0", "first structure equation applied to alpha",
                              [=](CheckInputs& in) {
                                VF X = in.sampler.random_vector_field();
                                Residual r;
                                r.add(connection_form_at(in.lhs, a, V, std::span(&X, 1)), Expr());
                                return r;
                              }));
  checks.push_back(make_check("contact.R_alpha_V", "R_{alpha,V} = 0", "second structure equation applied to alpha, V",
                              [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(2);
                                Residual r;
                                r.add(curvature_form_at(in.lhs, a, V, X), Expr());
                                return r;
                              }));
  checks.push_back(make_check(
      "contact.V_dR_alpha_V", "V _| dR_{alpha,V} = nabla alpha ^ (V _| R_V)",
      "contracted second Bianchi identity as stated for contact metrics", [=](CheckInputs& in) {
        auto X = in.sampler.random_vector_fields(2);
        const PForm dR = exterior_derivative(curvature_form(in.lhs, a, V));
        // (V _| R_V)(X) = R(V, X) V
        auto inserted = [&](const VF& Y) { return curvature_at(in.rhs, V, Y, V); };
        Residual r;
        r.add(dR({V, X[0], X[1]}), covariant_derivative(in.rhs, X[0], a)({inserted(X[1])}) -
                                       covariant_derivative(in.rhs, X[1], a)({inserted(X[0])}));
        return r;
      }));
  checks.push_back(make_check(
      "contact.V_dR_alpha_V_full", "V _| dR_{alpha,V} = V _| (nabla alpha ^ R_V + R_alpha ^ nabla V)",
      "second Bianchi identity contracted with V, keeping the R_alpha ^ nabla V term", [=](CheckInputs& in) {
        auto X = in.sampler.random_vector_fields(2);
        const PForm dR = exterior_derivative(curvature_form(in.lhs, a, V));
        const TensorValuedForm rhs =
            [&] {
              const TensorValuedForm f = tensor_wedge(covariant_differential(in.rhs, a), curvature_on(in.rhs, V));
              const TensorValuedForm h = tensor_wedge(curvature_covector(in.rhs, a), covariant_differential(in.rhs, V));
              return TensorValuedForm(V.chart(), ValueKind::Scalar, 3, [f, h](std::span<const VF> args) {
                return f(args) + h(args);
              });
            }();
        Residual r;
        r.add(dR({V, X[0], X[1]}), rhs({V, X[0], X[1]}).as_scalar());
        return r;
      }));
  return c;
}

// --- foliation ----------------------------------------------------------------

GeometryCase foliation_adapted(int n) {
  const ChartPtr chart = euclidean_chart(n);
  const int v = n - 1;  // theta = dx^v, V = d_v, D spanned by the other coordinate fields
  // Random affine Christoffels masked to the adapted block structure:
  // nabla d_j stays in D for j in D, nabla d_v stays along d_v.
  const Connection base = random_poly_connection(chart, 11 + static_cast<std::uint64_t>(n));
  std::vector<Expr> gamma = base.gammas();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((j != v) == (k == v)) gamma[(k * n + i) * n + j] = Expr();
  Connection nabla(chart, gamma);

  const PForm theta = PForm::differential(chart, v);
  const VF V = VF::coordinate(chart, v);
  std::vector<VF> basis;
  for (int i = 0; i < v; ++i) basis.push_back(VF::coordinate(chart, i));

  const std::string id = n == 3 ? "foliation_adapted" : "foliation_adapted_n" + std::to_string(n);
  GeometryCase c{id,
                 "R^" + std::to_string(n) + " foliated by theta = d" + chart->coords()[v] +
                     " with an adapted connection carrying in-leaf torsion",
                 chart, nabla, {}, {}, CoFrame::coordinate(chart), {}, {}};
  c.details = {{"theta", to_text(theta)}, {"V", to_text(V)}, {"D", "span of the other coordinate fields"}};
  validate_case(c, false);

  const auto points = validation_points(chart, id);
  FieldSampler s(chart, stable_hash(id + "/adapted"));
  {
    VF X = s.random_vector_field();
    VF U = combination(s, basis);
    std::vector<Expr> off{theta({covariant_derivative(nabla, X, U)})};
    const VF dV = covariant_derivative(nabla, X, V);
    for (int i = 0; i < v; ++i) off.push_back(dV[i]);
    require_small("adapted to D and span{V}", max_abs_at(off, points));
    // The theta component of T vanishes on D while T itself does not.
    const VF T01 = torsion_at(nabla, basis[0], basis[1]);
    if (max_abs_at(std::span(T01.components()).first(v), points) < 1e-3)
      throw ValidationError("nonzero in-leaf torsion", "T(d_0, d_1) has no D component");
  }

  auto& checks = c.case_checks;
  checks.push_back(make_check("foliation.integrable", "d theta ^ theta = 0", "Frobenius integrability",
                              [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(3);
                                Residual r;
                                r.add(wedge_at(exterior_derivative(theta), theta, X), Expr());
                                return r;
                              }));
  checks.push_back(restricted_torsion_check("foliation.T_theta_D_frobenius", theta, basis));
  checks.push_back(make_check("foliation.lambda", "nabla_X theta = lambda_X theta, lambda_X = nabla_X theta(V)",
                              "adapted connection preserves theta up to scale", [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(2);
                                const PForm dth = covariant_derivative(in.lhs, X[0], theta);
                                const Expr lambda = covariant_derivative(in.rhs, X[0], theta)({V});
                                Residual r;
                                r.add(dth({X[1]}), lambda * theta({X[1]}));
                                r.add(covariant_derivative(in.lhs, X[0], V), -lambda * V);
                                return r;
                              }));
  checks.push_back(make_check("foliation.T_theta_D", "T_theta restricted to D = 0",
                              "integrability through torsion for adapted connections", [=](CheckInputs& in) {
                                auto X = combinations(in.sampler, basis, 2);
                                Residual r;
                                r.add(torsion_form_at(in.lhs, theta, X), Expr());
                                return r;
                              }));
  checks.push_back(make_check("foliation.R_theta_X", "R_{theta,X} = 0 for X in D", "curvature preserves D",
                              [=](CheckInputs& in) {
                                VF Z = combination(in.sampler, basis);
                                auto X = in.sampler.random_vector_fields(2);
                                Residual r;
                                r.add(curvature_form_at(in.lhs, theta, Z, X), Expr());
                                return r;
                              }));
  if (n >= 4) {
    checks.push_back(make_check("foliation.dT_theta_D", "dT_theta restricted to D = 0",
                                "first Bianchi identity on the leaves", [=](CheckInputs& in) {
                                  auto X = combinations(in.sampler, basis, 3);
                                  Residual r;
                                  r.add(exterior_derivative(torsion_form(in.lhs, theta))(X), Expr());
                                  return r;
                                }));
    checks.push_back(make_check("foliation.dR_theta_X_D", "dR_{theta,X} restricted to D = 0 for X in D",
                                "second Bianchi identity on the leaves", [=](CheckInputs& in) {
                                  VF Z = combination(in.sampler, basis);
                                  auto X = combinations(in.sampler, basis, 3);
                                  Residual r;
                                  r.add(exterior_derivative(curvature_form(in.lhs, theta, Z))(X), Expr());
                                  return r;
                                }));
  }
  return c;
}

// --- mechanics ----------------------------------------------------------------

TensorValue lie_derivative_of_endomorphism_at(const VF& G, const SymMatrix& S, const VF& X) {
  // (L_G S)(X) = [G, S X] - S [G, X]
  return TensorValue::vector(lie_bracket(G, apply(S, X)) - apply(S, lie_bracket(G, X)));
}

GeometryCase sode_oscillator() {
  SodeStructure sode = make_sode(1, {"-x"});
  const ChartPtr chart = sode.chart;
  const auto points = validation_points(chart, "sode_oscillator");
  Connection nabla = derive_massa_pagani(sode, points);
  const Expr L = chart->parse("(u^2 - x^2)/2");
  CartanForm cf = build_cartan_form(sode, L, points);
  const PForm omega_psi_theta = multiplier_form(sode, cf.hessian);

  GeometryCase c{"sode_oscillator", "evolution space (t, x, u) of x'' = -x with L = (u^2 - x^2)/2, Massa-Pagani",
                 chart, nabla, {}, {}, sode.frame, {}, {}};
  c.details = {{"f", "-x"},
               {"Gamma (semispray)", to_text(sode.semispray)},
               {"H", to_text(sode.horizontal[0])},
               {"theta", to_text(sode.theta(0))},
               {"psi", to_text(sode.psi(0))},
               {"L", chart->print(L)},
               {"theta_L", to_text(cf.theta_l)},
               {"Omega", to_text(cf.omega)}};
  validate_case(c, false);
  require_small("Omega = g psi ^ theta", max_abs_at((cf.omega - omega_psi_theta).components(), points));
  require_small("Euler-Lagrange field equals the semispray",
                max_abs_at(differences(cf.euler_lagrange, sode.semispray), points));

  const PForm omega = cf.omega;
  const PForm theta_l = cf.theta_l;
  const VF G = sode.semispray;
  const VF GL = cf.euler_lagrange;
  const VF H = sode.horizontal[0];
  const VF Vf = sode.vertical_fields[0];
  const SymMatrix S = sode.vertical;
  const SodeStructure sd = sode;
  auto& checks = c.case_checks;

  checks.push_back(make_check("sode.theta_L", "theta_L = u dx - (u^2 + x^2)/2 dt", "Cartan 1-form of the oscillator",
                              [=](CheckInputs&) {
                                const PForm expected =
                                    PForm::one_form(chart, {chart->parse("-(u^2 + x^2)/2"), chart->parse("u"), 0});
                                Residual r;
                                for (std::size_t i = 0; i < expected.components().size(); ++i)
                                  r.add(theta_l.components()[i], expected.components()[i]);
                                return r;
                              }));
  checks.push_back(make_check("sode.Omega_psi_theta", "d theta_L = g_ab psi^a ^ theta^b", "Cartan 2-form",
                              [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(2);
                                Residual r;
                                r.add(omega(X), omega_psi_theta(X));
                                return r;
                              }));
  checks.push_back(make_check("sode.euler_lagrange", "Gamma_L _| d theta_L = 0", "Euler-Lagrange equations",
                              [=](CheckInputs& in) {
                                VF X = in.sampler.random_vector_field();
                                Residual r;
                                r.add(omega({GL, X}), Expr());
                                return r;
                              }));
  checks.push_back(make_check("sode.dOmega", "d Omega = 0", "Omega is closed", [=](CheckInputs& in) {
    auto X = in.sampler.random_vector_fields(3);
    Residual r;
    r.add(exterior_derivative(omega)(X), Expr());
    return r;
  }));
  checks.push_back(make_check("sode.T_Omega", "T_Omega = 0", "closure through the first structure equation",
                              [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(3);
                                Residual r;
                                r.add(torsion_form_at(in.lhs, omega, X), Expr());
                                return r;
                              }));
  checks.push_back(make_check("sode.Xi_Omega", "Xi_Omega = 0", "closure through the first structure equation",
                              [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(3);
                                Residual r;
                                r.add(xi_form_at(in.lhs, omega, X), Expr());
                                return r;
                              }));
  auto frame_check = [&](std::string id, std::string name, bool use_torsion, std::vector<VF> args) {
    return make_check(std::move(id), std::move(name), "Helmholtz conditions in structure form",
                      [=](CheckInputs& in) {
                        Residual r;
                        r.add(use_torsion ? torsion_form_at(in.lhs, omega, args) : xi_form_at(in.lhs, omega, args),
                              Expr());
                        return r;
                      });
  };
  checks.push_back(frame_check("sode.helmholtz_T_GHH", "T_Omega(Gamma, H_a, H_b) = 0", true, {G, H, H}));
  checks.push_back(frame_check("sode.helmholtz_T_GVV", "T_Omega(Gamma, V_a, V_b) = 0", true, {G, Vf, Vf}));
  checks.push_back(frame_check("sode.helmholtz_Xi_GVH", "Xi_Omega(Gamma, V_a, H_b) = 0", false, {G, Vf, H}));
  checks.push_back(frame_check("sode.helmholtz_Xi_VVH", "Xi_Omega(V_a, V_b, H_c) = 0", false, {Vf, Vf, H}));
  checks.push_back(make_check("sode.rank", "Omega has maximal rank 2n", "numeric rank of the component matrix",
                              [=](CheckInputs&) {
                                Residual r;
                                r.numeric.push_back([=](const Point& p) {
                                  return std::abs(static_cast<double>(numeric_rank(omega, p) - 2 * sd.n));
                                });
                                return r;
                              }));
  checks.push_back(make_check("sode.massa_pagani", "nabla Gamma = 0, nabla dt = 0, nabla S = 0, R(V_a, V_b) = 0",
                              "defining properties of the Massa-Pagani connection", [=](CheckInputs& in) {
                                auto X = in.sampler.random_vector_fields(3);
                                Residual r;
                                r.add(covariant_derivative(in.lhs, X[0], G), VF::zero(chart));
                                r.add(covariant_derivative(in.lhs, X[0], PForm::differential(chart, 0))({X[1]}),
                                      Expr());
                                r.add(covariant_derivative(in.lhs, X[0], TensorValue::endomorphism(chart, S)),
                                      zero_value(ValueKind::Endomorphism, chart));
                                for (const auto& Va : sd.vertical_fields)
                                  r.add(curvature_at(in.lhs, X[1], X[2], Va), VF::zero(chart));
                                return r;
                              }));
  checks.push_back(make_check("sode.lie_eigen", "L_Gamma S has eigenvalues 0, -1, 1 on Gamma, H_a, V_a",
                              "eigenstructure of the Lie derivative of S", [=](CheckInputs&) {
                                Residual r;
                                r.add(lie_derivative_of_endomorphism_at(G, S, G), TensorValue::vector(VF::zero(chart)));
                                for (const auto& Ha : sd.horizontal)
                                  r.add(lie_derivative_of_endomorphism_at(G, S, Ha), TensorValue::vector(-Ha));
                                for (const auto& Va : sd.vertical_fields)
                                  r.add(lie_derivative_of_endomorphism_at(G, S, Va), TensorValue::vector(Va));
                                return r;
                              }));
  return c;
}

void sort_checks(GeometryCase& c) {
  std::sort(c.case_checks.begin(), c.case_checks.end(),
            [](const IdentityCheck& a, const IdentityCheck& b) { return a.id < b.id; });
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view id) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos || text.size() > 19)
    throw UnknownCase("unknown case '" + std::string(id) + "'");
  return std::stoull(std::string(text));
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_text(const VectorField& X) { return vector_text_impl(X); }
std::string to_text(const PForm& form) { return form_text_impl(form); }
void validate_case(const GeometryCase& c, bool levi_civita) { validate_common_impl(c, levi_civita); }

const std::vector<CaseInfo>& case_catalog() {
  static const std::vector<CaseInfo> cases{
      {"contact_r3", "contact form dz - y dx on R^3, contact metric, Levi-Civita connection"},
      {"flat_euclidean", "R^3, Gamma = 0"},
      {"flat_with_torsion", "R^3, Gamma^z_xy = 1, Gamma^z_yx = -1"},
      {"foliation_adapted", "R^3 foliated by dz, adapted connection with torsion"},
      {"foliation_adapted_n4", "R^4 foliated by dw, adapted connection with torsion"},
      {"random_poly", "random affine Christoffel symbols; random_poly:SEED[:DIM] or --seed"},
      {"sode_oscillator", "harmonic oscillator on (t, x, u), Cartan form and Massa-Pagani connection"},
      {"sphere_lc", "unit sphere, Levi-Civita connection"},
  };
  return cases;
}

GeometryCase build_case(std::string_view id, const CaseOptions& options) {
  GeometryCase c = [&] {
    if (id == "flat_euclidean") return flat_euclidean();
    if (id == "flat_with_torsion") return flat_with_torsion();
    if (id == "sphere_lc") return sphere_lc();
    if (id == "contact_r3") return contact_r3();
    if (id == "foliation_adapted") return foliation_adapted(3);
    if (id == "foliation_adapted_n4") return foliation_adapted(4);
    if (id == "sode_oscillator") return sode_oscillator();
    if (id == "random_poly") return random_poly(options.seed, options.dim);
    if (id.starts_with("random_poly:")) {
      std::string_view rest = id.substr(12);
      const auto colon = rest.find(':');
      const std::uint64_t seed = parse_unsigned(rest.substr(0, colon), id);
      int dim = options.dim;
      if (colon != std::string_view::npos) {
        const std::uint64_t d = parse_unsigned(rest.substr(colon + 1), id);
        if (d < 2 || d > 6) throw UnknownCase("random_poly dimension must be between 2 and 6");
        dim = static_cast<int>(d);
      }
      return random_poly(seed, dim);
    }
    throw UnknownCase("unknown case '" + std::string(id) + "'");
  }();
  sort_checks(c);
  return c;
}

GeometryCase mutate_case(const GeometryCase& base, int k, int i, int j, const Expr& delta) {
  GeometryCase c = base;
  c.lhs_connection = base.connection.with_gamma(k, i, j, base.connection.gamma(k, i, j) + delta);
  c.id = base.id + "+mutant";
  return c;
}

Connection random_poly_connection(const ChartPtr& chart, std::uint64_t seed) {
  FieldSampler s(chart, stable_hash("random_poly", seed));
  const int n = chart->dim();
  std::vector<Expr> g;
  for (int k = 0; k < n * n * n; ++k) {
    std::vector<Expr> terms{Expr(s.uniform_int(-2, 2))};
    for (int i = 0; i < n; ++i) terms.push_back(Expr(s.uniform_int(-2, 2)) * Expr::var(i));
    g.push_back(sum(terms));
  }
  return Connection(chart, std::move(g));
}

// --- contact ------------------------------------------------------------------

VectorField ContactStructure::apply_phi(const VectorField& X) const { return apply(phi, X); }

ContactStructure derive_contact_structure(const PForm& alpha, std::span<const Point> points) {
  const ChartPtr& chart = alpha.chart();
  if (chart->dim() != 3 || alpha.degree() != 1)
    throw std::invalid_argument("contact structures are built for 1-forms on 3-dimensional charts");
  const PForm da = exterior_derivative(alpha);
  const int i01[] = {0, 1}, i02[] = {0, 2}, i12[] = {1, 2};
  // w spans ker d alpha; alpha(w) is the coefficient of alpha ^ d alpha.
  const VF w(chart, {da.component(i12), -da.component(i02), da.component(i01)});
  const Expr volume = alpha({w});
  for (const auto& p : points)
    if (!(std::abs(evaluate_at(volume, p)) > 1e-9))
      throw ValidationError("contact condition alpha ^ d alpha != 0", "degenerate at " + point_text(p));
  const VF V = (Expr(1) / volume) * w;

  auto project = [&](const VF& X) { return X - alpha({X}) * V; };
  const VF e1 = project(VF::coordinate(chart, 0));
  const VF p2 = project(VF::coordinate(chart, 1));
  const Expr scale = da({e1, p2});
  for (const auto& p : points)
    if (!(std::abs(evaluate_at(scale, p)) > 1e-9))
      throw ValidationError("d alpha nondegenerate on ker alpha", "degenerate at " + point_text(p));
  const VF e2 = (Expr(1) / scale) * p2;

  CoFrame frame = CoFrame::from_frame({e1, e2, V});
  require_small("dual frame", frame.duality_residual(points));
  const PForm& eta1 = frame.coframe[0];
  const PForm& eta2 = frame.coframe[1];

  SymMatrix g(3), phi(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      g(i, j) = (eta1.components()[i] * eta1.components()[j] + eta2.components()[i] * eta2.components()[j]) /
                    Expr(2) +
                alpha.components()[i] * alpha.components()[j];
      phi(i, j) = e1[i] * eta2.components()[j] - e2[i] * eta1.components()[j];
    }
  ContactStructure c{alpha, V, Metric(chart, g), phi, frame};
  try {
    c.metric.validate(points);
  } catch (const std::exception& e) {
    throw ValidationError("metric nondegenerate and symmetric", e.what());
  }
  FieldSampler s(chart, stable_hash("contact invariants"));
  for (const auto& [name, residual] : contact_invariant_residuals(c, points, s)) require_small(name, residual);
  return c;
}

std::vector<std::pair<std::string, double>> contact_invariant_residuals(const ContactStructure& c,
                                                                        std::span<const Point> points,
                                                                        FieldSampler& sampler) {
  const ChartPtr& chart = c.alpha.chart();
  const PForm da = exterior_derivative(c.alpha);
  const VF X = sampler.random_vector_field();
  const VF Y = sampler.random_vector_field();
  const VF& V = c.reeb;

  double min_volume = INFINITY;
  const Expr volume = wedge_at(c.alpha, da, std::vector<VF>{VF::coordinate(chart, 0), VF::coordinate(chart, 1),
                                                            VF::coordinate(chart, 2)});
  for (const auto& p : points) min_volume = std::min(min_volume, std::abs(evaluate_at(volume, p)));

  std::vector<std::pair<std::string, double>> out;
  out.emplace_back("alpha ^ d alpha != 0", min_volume > 1e-9 ? 0.0 : INFINITY);
  out.emplace_back("V _| d alpha = 0", max_abs_at(da({V, X}), points));
  out.emplace_back("alpha(V) = 1", max_abs_at(c.alpha({V}) - Expr(1), points));
  out.emplace_back("g(V, X) = alpha(X)", max_abs_at(c.metric.apply(V, X) - c.alpha({X}), points));
  out.emplace_back("g(V, V) = 1", max_abs_at(c.metric.apply(V, V) - Expr(1), points));
  out.emplace_back("2 g(X, Phi Y) = d alpha(X, Y)",
                   max_abs_at(Expr(2) * c.metric.apply(X, c.apply_phi(Y)) - da({X, Y}), points));
  out.emplace_back("Phi^2 X = -X + alpha(X) V",
                   max_abs_at(differences(c.apply_phi(c.apply_phi(X)), -X + c.alpha({X}) * V), points));
  return out;
}

// --- mechanics ----------------------------------------------------------------

SodeStructure make_sode(int n, const std::vector<std::string>& force_text) {
  if (n < 1 || static_cast<int>(force_text.size()) != n)
    throw std::invalid_argument("need one force function per x^a");
  std::vector<std::string> coords{"t"};
  for (int a = 0; a < n; ++a) coords.push_back(n == 1 ? "x" : "x" + std::to_string(a + 1));
  for (int a = 0; a < n; ++a) coords.push_back(n == 1 ? "u" : "u" + std::to_string(a + 1));
  const ChartPtr chart = make_chart("E", coords, std::vector<Interval>(2 * n + 1, Interval{-1.0, 1.0}));
  const int N = 2 * n + 1;
  auto xi = [](int a) { return 1 + a; };
  auto ui = [n](int a) { return 1 + n + a; };

  std::vector<Expr> force;
  for (const auto& f : force_text) force.push_back(chart->parse(f));
  std::vector<Expr> gamma(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gamma[a * n + b] = -differentiate(force[a], ui(b)) / Expr(2);

  std::vector<Expr> g(N);
  g[0] = 1;
  for (int a = 0; a < n; ++a) {
    g[xi(a)] = chart->coord(ui(a));
    g[ui(a)] = force[a];
  }
  const VF semispray(chart, g);

  std::vector<VF> horizontal, vertical_fields;
  for (int a = 0; a < n; ++a) {
    VF H = VF::coordinate(chart, xi(a));
    for (int b = 0; b < n; ++b) H = H - gamma[b * n + a] * VF::coordinate(chart, ui(b));
    horizontal.push_back(H);
    vertical_fields.push_back(VF::coordinate(chart, ui(a)));
  }

  // dt, theta^a = dx^a - u^a dt, psi^a = du^a - f^a dt + Gamma^a_b theta^b
  CoFrame frame;
  frame.frame.push_back(semispray);
  frame.frame.insert(frame.frame.end(), horizontal.begin(), horizontal.end());
  frame.frame.insert(frame.frame.end(), vertical_fields.begin(), vertical_fields.end());
  const PForm dt = PForm::differential(chart, 0);
  frame.coframe.push_back(dt);
  std::vector<PForm> theta;
  for (int a = 0; a < n; ++a) theta.push_back(PForm::differential(chart, xi(a)) - chart->coord(ui(a)) * dt);
  frame.coframe.insert(frame.coframe.end(), theta.begin(), theta.end());
  for (int a = 0; a < n; ++a) {
    PForm psi = PForm::differential(chart, ui(a)) - force[a] * dt;
    for (int b = 0; b < n; ++b) psi = psi + gamma[a * n + b] * theta[b];
    frame.coframe.push_back(psi);
  }

  SymMatrix S(N);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < N; ++j) S(ui(a), j) = theta[a].components()[j];
  return SodeStructure{chart, n, force, gamma, semispray, S, horizontal, vertical_fields, frame};
}

Connection derive_massa_pagani(const SodeStructure& sode, std::span<const Point> points) {
  const int n = sode.n;
  const int N = 2 * n + 1;
  auto H = [&](int a) { return 1 + a; };
  auto V = [&](int a) { return 1 + n + a; };
  std::vector<Expr> C(static_cast<std::size_t>(N) * N * N);
  auto set = [&](int c, int a, int b, const Expr& e) { C[(c * N + a) * N + b] = e; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // nabla_Gamma H_a = Gamma^b_a H_b, nabla_Gamma V_a = Gamma^b_a V_b
      set(H(b), 0, H(a), sode.gamma[b * n + a]);
      set(V(b), 0, V(a), sode.gamma[b * n + a]);
      for (int c = 0; c < n; ++c) {
        // nabla_{H_c} H_a = V_a(Gamma^b_c) H_b, likewise on V_a
        const Expr coeff = differentiate(sode.gamma[b * n + c], sode.u_index(a));
        set(H(b), H(c), H(a), coeff);
        set(V(b), H(c), V(a), coeff);
      }
    }
  Connection nabla = connection_from_frame(sode.frame.frame, sode.frame.coframe, C);
  FieldSampler s(sode.chart, stable_hash("massa-pagani"));
  for (const auto& [name, residual] : massa_pagani_residuals(sode, nabla, points, s)) require_small(name, residual);
  return nabla;
}

std::vector<std::pair<std::string, double>> massa_pagani_residuals(const SodeStructure& sode,
                                                                   const Connection& nabla,
                                                                   std::span<const Point> points,
                                                                   FieldSampler& sampler) {
  const ChartPtr& chart = sode.chart;
  auto X = sampler.random_vector_fields(3);
  std::vector<std::pair<std::string, double>> out;
  out.emplace_back("nabla Gamma = 0",
                   max_abs_at(covariant_derivative(nabla, X[0], sode.semispray).components(), points));
  out.emplace_back("nabla dt = 0",
                   max_abs_at(covariant_derivative(nabla, X[0], PForm::differential(chart, 0)).components(), points));
  out.emplace_back(
      "nabla S = 0",
      max_abs_at(covariant_derivative(nabla, X[0], TensorValue::endomorphism(chart, sode.vertical)).comps, points));
  // Flat along the fibres: R(Y1, Y2) = 0 for vertical Y1, Y2.
  const auto Y = combinations(sampler, sode.vertical_fields, 2);
  out.emplace_back("vertical sub-bundle flat",
                   max_abs_at(curvature_at(nabla, Y[0], Y[1], X[1]).components(), points));
  return out;
}

CartanForm build_cartan_form(const SodeStructure& sode, const Expr& L, std::span<const Point> points) {
  const ChartPtr& chart = sode.chart;
  const int n = sode.n;
  const int N = 2 * n + 1;
  std::vector<Expr> dLdu(n);
  for (int a = 0; a < n; ++a) dLdu[a] = differentiate(L, sode.u_index(a));

  SymMatrix hess(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hess(a, b) = differentiate(dLdu[a], sode.u_index(b));
  const Expr det = hess.determinant();
  for (const auto& p : points)
    if (!(std::abs(evaluate_at(det, p)) > 1e-9))
      throw ValidationError("regular Lagrangian", "singular Hessian at " + point_text(p));

  // theta_L = (L - u^a dL/du^a) dt + dL/du^a dx^a
  std::vector<Expr> comps(N);
  std::vector<Expr> dt_terms{L};
  for (int a = 0; a < n; ++a) {
    dt_terms.push_back(-(chart->coord(sode.u_index(a)) * dLdu[a]));
    comps[sode.x_index(a)] = dLdu[a];
  }
  comps[0] = sum(dt_terms);
  PForm theta_l(chart, 1, comps);

  // Gamma_L = d_t + u^a d_x^a + F^a d_u^a, with g_ab F^b = dL/dx^a - (d_t + u^b d_x^b)(dL/du^a)
  std::vector<Expr> base(N);
  base[0] = 1;
  for (int a = 0; a < n; ++a) base[sode.x_index(a)] = chart->coord(sode.u_index(a));
  const VF total(chart, base);
  const SymMatrix inv = hess.inverse();
  std::vector<Expr> rhs(n);
  for (int a = 0; a < n; ++a)
    rhs[a] = differentiate(L, sode.x_index(a)) - apply_vector_field(total, dLdu[a]);
  std::vector<Expr> field = base;
  for (int a = 0; a < n; ++a) {
    std::vector<Expr> t;
    for (int b = 0; b < n; ++b) t.push_back(inv(a, b) * rhs[b]);
    field[sode.u_index(a)] = sum(t);
  }
  return CartanForm{theta_l, exterior_derivative(theta_l), hess, VF(chart, field)};
}

PForm multiplier_form(const SodeStructure& sode, const SymMatrix& g) {
  PForm out(sode.chart, 2);
  for (int a = 0; a < sode.n; ++a)
    for (int b = 0; b < sode.n; ++b) out = out + g(a, b) * wedge(sode.psi(a), sode.theta(b));
  return out;
}

int numeric_rank(const PForm& two_form, const Point& p) {
  if (two_form.degree() != 2) throw DegreeError("numeric_rank needs a 2-form");
  const int n = two_form.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int idx[] = {i, j};
      m(i, j) = evaluate_at(two_form.component_any(idx), p);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  return rank;
}

IdentityCheck restricted_torsion_check(std::string id, PForm theta, std::vector<VectorField> basis) {
  return make_check(std::move(id), "T_theta restricted to D = -(nabla theta ^ I) restricted to D",
                    "Frobenius integrability through torsion", [=](CheckInputs& in) {
                      auto X = combinations(in.sampler, basis, 2);
                      Residual r;
                      r.add(torsion_form_at(in.lhs, theta, X),
                            -(covariant_derivative(in.rhs, X[0], theta)({X[1]}) -
                              covariant_derivative(in.rhs, X[1], theta)({X[0]})));
                      return r;
                    });
}

}  // namespace extcalc
