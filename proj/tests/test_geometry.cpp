#include <gtest/gtest.h>

#include "extcalc/geometry.hpp"
#include "extcalc/sampling.hpp"
#include "test_util.hpp"

using namespace extcalc;
using namespace extcalc::testing;

namespace {

constexpr double kTol = 1e-9;

VectorField coord(const ChartPtr& c, int i) { return VectorField::coordinate(c, i); }

}  // namespace

TEST(IndexTuples, LexicographicAndPositioned) {
  const auto& t = index_tuples(4, 2);
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(t[5], (std::vector<int>{2, 3}));
  for (int n = 1; n <= 5; ++n)
    for (int p = 0; p <= n; ++p) {
      const auto& all = index_tuples(n, p);
      for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(tuple_position(n, all[i]), static_cast<int>(i));
    }
}

TEST(Chart, RejectsBadDefinitions) {
  EXPECT_THROW(make_chart("bad", {"x", "x"}, {{0, 1}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(make_chart("bad", {"x"}, {}), std::invalid_argument);
  EXPECT_THROW(make_chart("bad", {"x"}, {{1, 0}}), std::invalid_argument);
}

TEST(Wedge, UnnormalisedConvention) {
  auto c = r3();
  PForm dxdy = wedge(PForm::differential(c, 0), PForm::differential(c, 1));
  EXPECT_TRUE(dxdy({coord(c, 0), coord(c, 1)}).is_one());
  EXPECT_DOUBLE_EQ(evaluate_at(dxdy({coord(c, 1), coord(c, 0)}), Point{{0, 0, 0}}), -1.0);
  PForm vol = wedge(dxdy, PForm::differential(c, 2));
  EXPECT_TRUE(vol({coord(c, 0), coord(c, 1), coord(c, 2)}).is_one());
}

TEST(Wedge, OneFormsMatchDeterminantOracle) {
  auto c = r3();
  FieldSampler s(c, 3);
  for (int trial = 0; trial < 5; ++trial) {
    PForm a = s.random_form(1), b = s.random_form(1);
    VectorField X = s.random_vector_field(), Y = s.random_vector_field();
    Expr oracle = a({X}) * b({Y}) - a({Y}) * b({X});
    EXPECT_LT(max_diff(c, wedge(a, b)({X, Y}), oracle), kTol);
  }
}

TEST(Wedge, GradedCommutativeAndAssociative) {
  for (auto c : {r3(), r4()}) {
    FieldSampler s(c, 5);
    for (int p = 0; p <= c->dim(); ++p)
      for (int q = 0; p + q <= c->dim(); ++q) {
        PForm a = s.random_form(p), b = s.random_form(q);
        PForm ab = wedge(a, b), ba = wedge(b, a);
        PForm expect = ((p * q) % 2 == 0) ? ba : Expr(-1) * ba;
        EXPECT_LT(max_diff(ab, expect), kTol) << p << "," << q;
      }
    PForm a = s.random_form(1), b = s.random_form(1), d = s.random_form(1);
    EXPECT_LT(max_diff(wedge(wedge(a, b), d), wedge(a, wedge(b, d))), kTol);
  }
}

TEST(Wedge, DegreeOverflowIsRejected) {
  auto c = r3();
  FieldSampler s(c, 1);
  EXPECT_THROW(wedge(s.random_form(2), s.random_form(2)), DegreeError);
}

TEST(ExteriorDerivative, SquaresToZero) {
  for (auto c : {r3(), r4()}) {
    FieldSampler s(c, 9);
    for (int p = 0; p < c->dim(); ++p) {
      PForm ddf = exterior_derivative(exterior_derivative(s.random_form(p)));
      for (const auto& comp : ddf.components()) EXPECT_LT(max_abs(c, comp), kTol);
    }
  }
}

TEST(ExteriorDerivative, TopDegreeGivesEmptyForm) {
  auto c = r3();
  FieldSampler s(c, 2);
  PForm d = exterior_derivative(s.random_form(3));
  EXPECT_EQ(d.degree(), 4);
  EXPECT_TRUE(d.components().empty());
}

TEST(ExteriorDerivative, CoordinateAgreesWithIntrinsic) {
  for (auto c : {r3(), r4()}) {
    FieldSampler s(c, 13);
    for (int p = 0; p < c->dim(); ++p) {
      PForm f = s.random_form(p);
      auto X = s.random_vector_fields(p + 1);
      Expr coordinate = exterior_derivative(f)(X);
      Expr intrinsic = exterior_derivative_at(f, X);
      EXPECT_LT(max_diff(c, coordinate, intrinsic), 1e-8 * (1 + max_abs(c, coordinate))) << "p=" << p;
    }
  }
}

TEST(ExteriorDerivative, LeibnizRule) {
  auto c = r4();
  FieldSampler s(c, 17);
  for (int p = 0; p <= 2; ++p) {
    PForm a = s.random_form(p), b = s.random_form(1);
    PForm lhs = exterior_derivative(wedge(a, b));
    PForm da_b = wedge(exterior_derivative(a), b);
    PForm a_db = wedge(a, exterior_derivative(b));
    PForm rhs = p % 2 == 0 ? da_b + a_db : da_b - a_db;
    EXPECT_LT(max_diff(lhs, rhs), 1e-8);
  }
}

TEST(ExteriorDerivative, ZeroFormIsGradient) {
  auto c = r3();
  Expr f = c->parse("x^2*y + sin(z)");
  PForm df = exterior_derivative(PForm::scalar(c, f));
  EXPECT_LT(max_diff(c, df.components()[0], c->parse("2*x*y")), kTol);
  EXPECT_LT(max_diff(c, df.components()[1], c->parse("x^2")), kTol);
  EXPECT_LT(max_diff(c, df.components()[2], c->parse("cos(z)")), kTol);
}

TEST(InteriorProduct, AntiDerivation) {
  auto c = r4();
  FieldSampler s(c, 21);
  VectorField X = s.random_vector_field();
  for (int p = 1; p <= 2; ++p) {
    PForm a = s.random_form(p), b = s.random_form(2);
    PForm lhs = interior_product(X, wedge(a, b));
    PForm l = wedge(interior_product(X, a), b);
    PForm r = wedge(a, interior_product(X, b));
    PForm rhs = p % 2 == 0 ? l + r : l - r;
    EXPECT_LT(max_diff(lhs, rhs), kTol);
  }
  EXPECT_THROW(interior_product(X, PForm::scalar(c, Expr(1))), DegreeError);
}

TEST(InteriorProduct, InsertsIntoFirstSlot) {
  auto c = r3();
  FieldSampler s(c, 23);
  PForm a = s.random_form(3);
  auto X = s.random_vector_fields(3);
  Expr lhs = interior_product(X[0], a)({X[1], X[2]});
  EXPECT_LT(max_diff(c, lhs, a(X)), kTol);
}

TEST(LieBracket, JacobiAndAntisymmetry) {
  auto c = r3();
  FieldSampler s(c, 29);
  auto X = s.random_vector_field(), Y = s.random_vector_field(), Z = s.random_vector_field();
  VectorField jac = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) +
                    lie_bracket(Z, lie_bracket(X, Y));
  EXPECT_LT(max_diff(jac, VectorField::zero(c)), 1e-8);
  EXPECT_LT(max_diff(lie_bracket(X, Y), -lie_bracket(Y, X)), kTol);
  EXPECT_LT(max_diff(lie_bracket(coord(c, 0), coord(c, 1)), VectorField::zero(c)), kTol);
}

TEST(Evaluation, AlternatingAndFunctionLinear) {
  auto c = r3();
  FieldSampler s(c, 31);
  PForm a = s.random_form(2);
  auto X = s.random_vector_field(), Y = s.random_vector_field();
  Expr f = s.random_function();
  EXPECT_LT(max_diff(c, a({X, Y}), -a({Y, X})), kTol);
  EXPECT_LT(max_abs(c, a({X, X})), kTol);
  EXPECT_LT(max_diff(c, a({f * X, Y}), f * a({X, Y})), kTol);
}

TEST(Evaluation, ChartMismatchIsRejected) {
  auto a = r3(), b = make_chart("other", {"u", "v", "w"}, {{0, 1}, {0, 1}, {0, 1}});
  EXPECT_THROW(PForm::differential(a, 0)({coord(b, 0)}), ChartMismatch);
  EXPECT_THROW(lie_bracket(coord(a, 0), coord(b, 0)), ChartMismatch);
  EXPECT_NO_THROW(PForm::differential(a, 0)({coord(r3(), 0)}));
}

TEST(SymMatrix, InverseTimesMatrixIsIdentity) {
  auto c = r3();
  FieldSampler s(c, 37);
  SymMatrix m(3);
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) m(r, k) = s.random_function() + Expr(r == k ? 10 : 0);
  SymMatrix id = m * m.inverse();
  auto v = id.at(Point{{0.2, -0.3, 0.5}});
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(v[r * 3 + k], r == k ? 1.0 : 0.0, 1e-10);
}

TEST(Wedge, EvaluatedProductMatchesMaterialised) {
  auto c = r4();
  FieldSampler s(c, 41);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      PForm a = s.random_form(p), b = s.random_form(q);
      auto X = s.random_vector_fields(p + q);
      Expr direct = wedge_at(a, b, X);
      EXPECT_LT(max_diff(c, wedge(a, b)(X), direct), 1e-9 * (1 + max_abs(c, direct)));
    }
  auto c2 = make_chart("plane", {"x", "y"}, {{-1, 1}, {-1, 1}});
  FieldSampler s2(c2, 43);
  EXPECT_LT(max_abs(c2, wedge_at(s2.random_form(1), s2.random_form(2), s2.random_vector_fields(3))), 1e-9);
}

TEST(InteriorProduct, RepeatedInsertionVanishes) {
  auto c = r4();
  FieldSampler s(c, 47);
  VectorField X = s.random_vector_field();
  PForm twice = interior_product(X, interior_product(X, s.random_form(3)));
  for (const auto& comp : twice.components()) EXPECT_LT(max_abs(c, comp), 1e-9);
}

TEST(ExteriorDerivative, HandComputedExamples) {
  auto c = r3();
  PForm theta = c->parse("x^2*y") * PForm::differential(c, 2);
  const PForm ddtheta = exterior_derivative(exterior_derivative(theta));
  for (const auto& comp : ddtheta.components())
    EXPECT_LT(max_abs(c, comp, 3, 10), 1e-12);
  // d(u dx - (u^2 + x^2)/2 dt) = du^dx - u du^dt - x dx^dt on (t, x, u)
  auto e = make_chart("evolution", {"t", "x", "u"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  PForm dt = PForm::differential(e, 0), dx = PForm::differential(e, 1), du = PForm::differential(e, 2);
  PForm thetaL = e->parse("u") * dx - e->parse("(u^2 + x^2)/2") * dt;
  PForm expect = wedge(du, dx) - e->parse("u") * wedge(du, dt) - e->parse("x") * wedge(dx, dt);
  EXPECT_LT(max_diff(exterior_derivative(thetaL), expect), 1e-12);
}

TEST(ExteriorDerivative, LeibnizWithFunction) {
  auto c = r4();
  FieldSampler s(c, 53);
  Expr f = s.random_function();
  PForm theta = s.random_form(2);
  PForm lhs = exterior_derivative(f * theta);
  PForm rhs = wedge(exterior_derivative(PForm::scalar(c, f)), theta) + f * exterior_derivative(theta);
  EXPECT_LT(max_diff(lhs, rhs), 1e-9);
}
