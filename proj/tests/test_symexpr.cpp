#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "extcalc/symexpr.hpp"

using namespace extcalc;

namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

double at(const Expr& e, std::vector<double> p) { return evaluate(e, p, kXYZ); }

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_int_distribution<int> var(0, 2);
  std::uniform_int_distribution<int> small(-3, 3);
  switch (pick(rng)) {
    case 0:
      return Expr(small(rng));
    case 1:
      return Expr::var(var(rng));
    case 2:
    case 3:
      return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 4:
    case 5:
      return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6:
      return sin(random_expr(rng, depth - 1));
    case 7:
      return cos(random_expr(rng, depth - 1));
    case 8:
      return pow(random_expr(rng, depth - 1), 2 + var(rng));
    default:
      return random_expr(rng, depth - 1) / (Expr(4) + pow(random_expr(rng, depth - 1), 2));
  }
}

}  // namespace

TEST(Rational, ArithmeticNormalises) {
  Rational a(2, 4);
  EXPECT_EQ(a.num(), 1);
  EXPECT_EQ(a.den(), 2);
  EXPECT_EQ((a + Rational(1, 3)).str(), "5/6");
  EXPECT_EQ(Rational(3, -6).str(), "-1/2");
  EXPECT_THROW(Rational(1, 0), std::exception);
}

TEST(Parse, PrecedenceAndFunctions) {
  EXPECT_DOUBLE_EQ(at(parse("1 + 2*x^2", kXYZ), {3, 0, 0}), 19.0);
  EXPECT_DOUBLE_EQ(at(parse("-x^2", kXYZ), {3, 0, 0}), -9.0);
  EXPECT_DOUBLE_EQ(at(parse("x/y/z", kXYZ), {8, 2, 2}), 2.0);
  EXPECT_DOUBLE_EQ(at(parse("x - y - z", kXYZ), {1, 2, 3}), -4.0);
  EXPECT_DOUBLE_EQ(at(parse("2^3^2", kXYZ), {0, 0, 0}), 512.0);
  EXPECT_NEAR(at(parse("sin(x)*cos(y) + exp(z) - ln(x)", kXYZ), {0.5, 0.2, 0.1}),
              std::sin(0.5) * std::cos(0.2) + std::exp(0.1) - std::log(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(at(parse("1.25e1 * x", kXYZ), {2, 0, 0}), 25.0);
  EXPECT_DOUBLE_EQ(at(parse("x^-2", kXYZ), {2, 0, 0}), 0.25);
}

TEST(Parse, ReportsOffsets) {
  try {
    parse("x +* y", kXYZ);
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
  try {
    parse("x + w", kXYZ);
    FAIL() << "expected unknown identifier";
  } catch (const UnknownIdentifierError& e) {
    EXPECT_EQ(e.name(), "w");
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse("(x + y", kXYZ), ParseError);
  EXPECT_THROW(parse("x^y", kXYZ), ParseError);
  EXPECT_THROW(parse("", kXYZ), ParseError);
  EXPECT_THROW(parse("x y", kXYZ), ParseError);
}

TEST(Differentiate, PolynomialAndExponential) {
  Expr e = parse("x^3 + exp(2*x)", kXYZ);
  Expr d = differentiate(e, 0);
  EXPECT_NEAR(at(d, {1, 0, 0}), 3 + 2 * std::exp(2.0), 1e-12);
  EXPECT_TRUE(differentiate(e, 1).is_zero());
}

TEST(Differentiate, AgreesWithFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = random_expr(rng, 4);
    for (int v = 0; v < 3; ++v) {
      Expr d = differentiate(e, v);
      std::vector<double> p{u(rng), u(rng), u(rng)};
      const double h = 1e-5;
      auto pp = p, pm = p;
      pp[v] += h;
      pm[v] -= h;
      const double fd = (at(e, pp) - at(e, pm)) / (2 * h);
      const double exact = at(d, p);
      EXPECT_NEAR(exact, fd, 1e-5 * (1 + std::abs(exact))) << print(e, kXYZ);
    }
  }
}

TEST(Print, RoundTripsThroughParse) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    Expr e = random_expr(rng, 4);
    std::string s = print(e, kXYZ);
    Expr back = parse(s, kXYZ);
    std::vector<double> p{u(rng), u(rng), u(rng)};
    const double a = at(e, p);
    EXPECT_NEAR(at(back, p), a, 1e-12 * (1 + std::abs(a))) << s;
    EXPECT_EQ(print(back, kXYZ), s);
  }
}

TEST(Print, MinimalParentheses) {
  EXPECT_EQ(print(parse("(x + y) * z", kXYZ), kXYZ), "(x + y)*z");
  EXPECT_EQ(print(parse("x - (y - z)", kXYZ), kXYZ), "x - (y - z)");
  EXPECT_EQ(print(parse("(-x)^2", kXYZ), kXYZ), "(-x)^2");
  EXPECT_EQ(print(parse("x*y/z", kXYZ), kXYZ), "x*y/z");
}

TEST(Evaluate, DomainErrorNamesSubexpression) {
  Expr e = parse("1/x + y", kXYZ);
  try {
    at(e, {0, 1, 0});
    FAIL() << "expected domain error";
  } catch (const DomainError& err) {
    EXPECT_NE(std::string(err.what()).find("x"), std::string::npos);
  }
  EXPECT_THROW(at(parse("ln(x)", kXYZ), {-1, 0, 0}), DomainError);
}

TEST(Expr, FoldingKeepsExpressionsSmall) {
  Expr x = Expr::var(0);
  EXPECT_TRUE((x * Expr(0)).is_zero());
  EXPECT_TRUE((x * Expr(1)).same_node(x));
  EXPECT_TRUE((x + Expr(0)).same_node(x));
  EXPECT_TRUE((Expr(2) + Expr(3)).structurally_equal(Expr(5)));
  EXPECT_EQ(x.var_mask(), 1u);
  EXPECT_EQ((x * Expr::var(2)).var_mask(), 5u);
}

TEST(Tape, EvaluatesManyRoots) {
  std::vector<Expr> roots{parse("x*y", kXYZ), parse("sin(z)", kXYZ), Expr(3)};
  Tape tape(roots);
  auto v = tape.run(std::vector<double>{2, 3, 0.5});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[0], 6);
  EXPECT_DOUBLE_EQ(v[1], std::sin(0.5));
  EXPECT_DOUBLE_EQ(v[2], 3);
}
