#include <gtest/gtest.h>

#include <map>

#include "extcalc/gallery.hpp"
#include "test_util.hpp"

using namespace extcalc;
using namespace extcalc::testing;

namespace {

std::vector<Point> points_on(const ChartPtr& chart, std::uint64_t seed = 9, int count = 12) {
  FieldSampler s(chart, seed);
  return s.random_points(count);
}

std::map<std::string, Report> case_reports(const GeometryCase& c) {
  std::map<std::string, Report> out;
  for (const auto& r : run_case_checks(c, SuiteConfig{})) out[r.check_id] = r;
  return out;
}

}  // namespace

TEST(Catalog, ListsBuiltInCases) {
  std::vector<std::string> ids;
  for (const auto& c : case_catalog()) ids.push_back(c.id);
  for (const char* id : {"flat_euclidean", "flat_with_torsion", "sphere_lc", "contact_r3", "foliation_adapted",
                         "sode_oscillator"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
}

TEST(Catalog, UnknownIdsRejected) {
  EXPECT_THROW(build_case("nonexistent"), UnknownCase);
  EXPECT_THROW(build_case("random_poly:abc"), UnknownCase);
  EXPECT_THROW(build_case("random_poly:1:2:3"), UnknownCase);
}

TEST(Catalog, RandomPolyIdsAndOptions) {
  EXPECT_EQ(build_case("random_poly:4").id, "random_poly:4");
  EXPECT_EQ(build_case("random_poly:4:4").chart->dim(), 4);
  const GeometryCase a = build_case("random_poly", CaseOptions{4, 3});
  const GeometryCase b = build_case("random_poly:4");
  EXPECT_EQ(a.id, b.id);
  for (std::size_t i = 0; i < a.connection.gammas().size(); ++i)
    EXPECT_TRUE(a.connection.gammas()[i].structurally_equal(b.connection.gammas()[i]));
}

TEST(Cases, FlatWithTorsionHasTorsionButNoCurvature) {
  const GeometryCase c = build_case("flat_with_torsion");
  const ChartPtr& ch = c.chart;
  const VectorField dx = VectorField::coordinate(ch, 0), dy = VectorField::coordinate(ch, 1);
  const VectorField expected = Expr(2) * VectorField::coordinate(ch, 2);
  EXPECT_LE(max_diff(torsion_at(c.connection, dx, dy), expected), 1e-14);
  FieldSampler s(ch, 4);
  auto X = s.random_vector_fields(3);
  EXPECT_LE(max_diff(curvature_at(c.connection, X[0], X[1], X[2]), VectorField::zero(ch)), 1e-12);
}

TEST(Cases, SphereChristoffelsMatchLeviCivita) {
  const GeometryCase c = build_case("sphere_lc");
  ASSERT_TRUE(c.metric.has_value());
  const Connection lc = levi_civita(*c.metric);
  for (std::size_t i = 0; i < lc.gammas().size(); ++i)
    EXPECT_LE(max_diff(c.chart, lc.gammas()[i], c.connection.gammas()[i]), 1e-12);
}

TEST(Cases, MutationOnlyTouchesLeftHandSide) {
  const GeometryCase base = build_case("flat_euclidean");
  const GeometryCase m = mutate_case(base, 2, 0, 1, Expr(1));
  EXPECT_EQ(m.id, "flat_euclidean+mutant");
  ASSERT_TRUE(m.lhs_connection.has_value());
  EXPECT_LE(max_diff(m.chart, m.lhs().gamma(2, 0, 1), Expr(1)), 0.0);
  EXPECT_LE(max_abs(m.chart, m.connection.gamma(2, 0, 1)), 0.0);
  EXPECT_THROW(mutate_case(base, 3, 0, 0, Expr(1)), std::out_of_range);
}

// --- contact --------------------------------------------------------------

TEST(Contact, DerivedStructureOfStandardForm) {
  const ChartPtr ch = r3();
  const PForm alpha = PForm::one_form(ch, {-ch->coord("y"), 0, 1});
  const auto pts = points_on(ch);
  const ContactStructure cs = derive_contact_structure(alpha, pts);
  // alpha ^ d alpha = dx ^ dy ^ dz
  const int all[] = {0, 1, 2};
  EXPECT_LE(max_diff(ch, wedge(alpha, exterior_derivative(alpha)).component(all), Expr(1)), 1e-14);
  EXPECT_LE(max_diff(cs.reeb, VectorField::coordinate(ch, 2)), 1e-14);
  FieldSampler s(ch, 17);
  for (const auto& [name, residual] : contact_invariant_residuals(cs, pts, s)) EXPECT_LE(residual, 1e-12) << name;
}

TEST(Contact, ClosedFormIsRejected) {
  const ChartPtr ch = r3();
  try {
    derive_contact_structure(PForm::one_form(ch, {0, 0, 1}), points_on(ch));
    FAIL() << "dz accepted as a contact form";
  } catch (const ValidationError& e) {
    EXPECT_NE(e.property().find("alpha ^ d alpha"), std::string::npos);
  }
}

TEST(Contact, WrongDimensionRejected) {
  EXPECT_THROW(derive_contact_structure(PForm::one_form(r4(), {0, 0, 0, 1}), points_on(r4())),
               std::invalid_argument);
}

TEST(Contact, CaseChecks) {
  const auto m = case_reports(build_case("contact_r3"));
  for (const char* id : {"contact.nabla_V_V", "contact.nabla_V_alpha", "contact.nabla_V_Phi", "contact.omega_alpha_V",
                         "contact.R_alpha_V", "contact.V_dR_alpha_V_full"}) {
    ASSERT_TRUE(m.count(id)) << id;
    EXPECT_TRUE(m.at(id).pass) << id << " residual " << m.at(id).max_residual;
  }
}

// R_{alpha,V} vanishes, so V _| dR_{alpha,V} = 0, yet nabla alpha ^ (V _| R_V)
// does not. The R_alpha ^ nabla V term restores the balance.
TEST(Contact, ContractedIdentityWithoutCurvatureCovectorTermFails) {
  const auto m = case_reports(build_case("contact_r3"));
  ASSERT_TRUE(m.count("contact.V_dR_alpha_V"));
  EXPECT_FALSE(m.at("contact.V_dR_alpha_V").pass);
  EXPECT_GT(m.at("contact.V_dR_alpha_V").max_residual, 1.0);
}

TEST(Contact, NonIntegrableDistributionFailsRestrictedTorsionCheck) {
  GeometryCase c = build_case("contact_r3");
  const CoFrame f = c.frame();
  const PForm alpha = f.coframe[2];
  c.case_checks = {restricted_torsion_check("negative", alpha, {f.frame[0], f.frame[1]})};
  const auto reports = run_case_checks(c, SuiteConfig{});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE(reports[0].pass);
}

// --- foliation ------------------------------------------------------------

TEST(Foliation, CaseChecksPass) {
  for (const char* id : {"foliation_adapted", "foliation_adapted_n4"}) {
    const auto m = case_reports(build_case(id));
    EXPECT_GE(m.size(), 5u);
    for (const auto& [cid, r] : m) EXPECT_TRUE(r.pass) << id << " " << cid << " " << r.max_residual;
  }
  EXPECT_TRUE(case_reports(build_case("foliation_adapted_n4")).count("foliation.dR_theta_X_D"));
}

TEST(Foliation, ConnectionHasTorsionInsideLeaves) {
  const GeometryCase c = build_case("foliation_adapted");
  const VectorField dx = VectorField::coordinate(c.chart, 0), dy = VectorField::coordinate(c.chart, 1);
  EXPECT_GT(max_diff(torsion_at(c.connection, dx, dy), VectorField::zero(c.chart)), 1e-3);
}

// --- second-order ODE -----------------------------------------------------

TEST(Sode, MassaPaganiProperties) {
  const SodeStructure sode = make_sode(1, {"-x"});
  const auto pts = points_on(sode.chart);
  const Connection nabla = derive_massa_pagani(sode, pts);
  FieldSampler s(sode.chart, 3);
  for (const auto& [name, residual] : massa_pagani_residuals(sode, nabla, pts, s))
    EXPECT_LE(residual, 1e-12) << name;
}

TEST(Sode, MassaPaganiForNonlinearForce) {
  const SodeStructure sode = make_sode(2, {"-x1 + u2*u1", "t*u1^2 - x2"});
  const auto pts = points_on(sode.chart);
  const Connection nabla = derive_massa_pagani(sode, pts);
  FieldSampler s(sode.chart, 5);
  for (const auto& [name, residual] : massa_pagani_residuals(sode, nabla, pts, s))
    EXPECT_LE(residual, 1e-10) << name;
  // Only the fibres are flat: with u-dependent Gamma^a_b, R(X, Y) V_a picks up dA + A ^ A.
  auto X = s.random_vector_fields(2);
  EXPECT_GT(max_diff(curvature_at(nabla, X[0], X[1], sode.vertical_fields[0]), VectorField::zero(sode.chart)), 1e-3);
}

TEST(Sode, OscillatorCartanForm) {
  const SodeStructure sode = make_sode(1, {"-x"});
  const ChartPtr& ch = sode.chart;
  const Expr x = ch->coord("x"), u = ch->coord("u");
  const auto pts = points_on(ch);
  const CartanForm cf = build_cartan_form(sode, (u * u - x * x) / Expr(2), pts);

  const PForm expected_theta = PForm::one_form(ch, {-(u * u + x * x) / Expr(2), u, 0});
  EXPECT_LE(max_diff(cf.theta_l, expected_theta), 1e-14);

  // du ^ dx - u du ^ dt - x dx ^ dt, expanded by hand
  const PForm dt = PForm::one_form(ch, {1, 0, 0});
  const PForm dx = PForm::one_form(ch, {0, 1, 0});
  const PForm du = PForm::one_form(ch, {0, 0, 1});
  const PForm expected_omega = wedge(du, dx) - u * wedge(du, dt) - x * wedge(dx, dt);
  EXPECT_LE(max_diff(cf.omega, expected_omega), 1e-14);
  EXPECT_LE(max_diff(exterior_derivative(cf.omega), PForm(ch, 3)), 1e-14);
  EXPECT_LE(max_diff(cf.omega, multiplier_form(sode, cf.hessian)), 1e-14);
  EXPECT_LE(max_diff(cf.euler_lagrange, sode.semispray), 1e-14);
  for (const auto& p : pts) EXPECT_EQ(numeric_rank(cf.omega, p), 2);
}

TEST(Sode, SingularLagrangianRejected) {
  const SodeStructure sode = make_sode(1, {"-x"});
  EXPECT_THROW(build_cartan_form(sode, sode.chart->coord("u") * sode.chart->coord("x"), points_on(sode.chart)),
               ValidationError);
}

TEST(Sode, ForceCountMustMatch) { EXPECT_THROW(make_sode(2, {"-x1"}), std::invalid_argument); }

TEST(Sode, OscillatorCaseChecksPass) {
  const auto m = case_reports(build_case("sode_oscillator"));
  EXPECT_EQ(m.size(), 13u);
  for (const auto& [id, r] : m) EXPECT_TRUE(r.pass) << id << " " << r.max_residual;
}

TEST(Rank, DegenerateAndFullForms) {
  const ChartPtr ch = r4();
  const PForm dx = PForm::one_form(ch, {1, 0, 0, 0}), dy = PForm::one_form(ch, {0, 1, 0, 0});
  const PForm dz = PForm::one_form(ch, {0, 0, 1, 0}), dw = PForm::one_form(ch, {0, 0, 0, 1});
  const Point p{{0.1, 0.2, 0.3, 0.4}};
  EXPECT_EQ(numeric_rank(wedge(dx, dy), p), 2);
  EXPECT_EQ(numeric_rank(wedge(dx, dy) + wedge(dz, dw), p), 4);
  EXPECT_EQ(numeric_rank(PForm(ch, 2), p), 0);
  EXPECT_THROW(numeric_rank(dx, p), DegreeError);
}
