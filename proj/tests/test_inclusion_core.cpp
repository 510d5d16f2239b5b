#include <gtest/gtest.h>

#include <random>

#include "arcert/inclusion.hpp"
#include "support.hpp"

using namespace arcert;
using testing_support::uniform;

namespace {

// Quad precision holds sums of doubles of similar magnitude and all products
// exactly, so it decides containment independently of the library's rounding.
using quad = __float128;

bool encloses(const Interval& x, quad exact) { return quad(x.lo()) <= exact && exact <= quad(x.hi()); }

PiecewiseInclusion switching() {
  RegionPiece left{"left", {AffineGuard{{1.0}, 0.0}}, {parse_polynomial("0", 1)}};
  RegionPiece right{"right", {AffineGuard{{-1.0}, 0.0}}, {parse_polynomial("1 - x1", 1)}};
  Override origin{IntervalVector{Interval(0.0)}, IntervalVector{Interval(0.0, 1.0)}};
  return PiecewiseInclusion(IntervalVector{Interval(-1, 1)}, {left, right}, {origin});
}

}  // namespace

TEST(Rounding, SumsAndProductsEncloseTheExactResult) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const double a = uniform(rng, -10, 10), b = uniform(rng, -10, 10);
    EXPECT_TRUE(encloses(Interval(a) + Interval(b), quad(a) + quad(b)));
    EXPECT_TRUE(encloses(Interval(a) - Interval(b), quad(a) - quad(b)));
    EXPECT_TRUE(encloses(Interval(a) * Interval(b), quad(a) * quad(b)));
  }
}

TEST(Rounding, DirectedResultsAreTightWhenExact) {
  EXPECT_EQ(rounding::add_down(0.5, 0.25), 0.75);
  EXPECT_EQ(rounding::add_up(0.5, 0.25), 0.75);
  EXPECT_EQ(rounding::mul_up(3.0, 0.5), 1.5);
  EXPECT_LT(rounding::add_down(0.1, 0.2), rounding::add_up(0.1, 0.2));
}

TEST(Interval, IntervalProductCoversAllPointProducts) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    double a = uniform(rng, -3, 3), b = uniform(rng, -3, 3), c = uniform(rng, -3, 3), d = uniform(rng, -3, 3);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const Interval p = Interval(a, b) * Interval(c, d);
    for (int k = 0; k < 10; ++k) {
      const double x = uniform(rng, a, b), y = uniform(rng, c, d);
      EXPECT_TRUE(encloses(p, quad(x) * quad(y)));
    }
  }
}

TEST(Interval, EmptyIsDistinctAndAbsorbing) {
  EXPECT_TRUE(Interval::empty().is_empty());
  EXPECT_TRUE((Interval::empty() + Interval(1.0)).is_empty());
  EXPECT_TRUE(intersect(Interval(0, 1), Interval(2, 3)).is_empty());
  EXPECT_THROW(Interval(1.0, 0.0), Error);
  EXPECT_EQ(hull(Interval(0, 1), Interval(2, 3)), Interval(0, 3));
}

TEST(Interval, EvenPowerIsNonNegative) {
  EXPECT_EQ(Interval(-2, 1).pow(2).lo(), 0.0);
  EXPECT_GE(Interval(-2, 1).pow(2).hi(), 4.0);
  EXPECT_TRUE(Interval(-2, 1).pow(3).contains(Interval(-8, 1)));
}

TEST(Polynomial, ParsesAndEvaluates) {
  const Polynomial p = parse_polynomial("x1^2 + lambda", 1);
  const Interval v = p.evaluate(IntervalVector{Interval(0.0)}, Interval(1.0));
  EXPECT_EQ(v, Interval(1.0));
  EXPECT_DOUBLE_EQ(p.evaluate_point({0.5}, 0.25), 0.5);
  EXPECT_TRUE(p.depends_on_lambda());
  EXPECT_EQ(p.degree(), 2u);
}

TEST(Polynomial, ExpandsProductsCanonically) {
  const Polynomial a = parse_polynomial("(x + 1) * (x - 1)", 1);
  const Polynomial b = parse_polynomial("x1^2 - 1", 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(parse_polynomial(a.to_string(), 1), a);
}

TEST(Polynomial, TextRoundTripKeepsIntervalCoefficients) {
  const Polynomial p = parse_polynomial("[0.1, 0.2] * x1 * x2 - 0.3 * lambda + [-1, 1]", 2);
  EXPECT_TRUE(p.has_interval_coefficients());
  EXPECT_EQ(parse_polynomial(p.to_string(), 2), p);
}

TEST(Polynomial, DerivativeMatchesHandComputation) {
  const Polynomial p = parse_polynomial("x1 * (1 + lambda - x1^2 - x2^2) - x2", 2);
  EXPECT_EQ(p.derivative(0), parse_polynomial("1 + lambda - 3*x1^2 - x2^2", 2));
  EXPECT_EQ(p.derivative(1), parse_polynomial("-2*x1*x2 - 1", 2));
}

TEST(Polynomial, ParseErrorsCarryTheColumn) {
  try {
    parse_polynomial("x1 + * 2", 1);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 6);
  }
  EXPECT_THROW(parse_polynomial("x3", 2), ParseError);
}

TEST(Polynomial, EvaluationEnclosesPointValues) {
  const Polynomial p = parse_polynomial("x1^3 - 2*x1*x2 + 0.7*x2^2 - lambda*x1", 2);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const double a = uniform(rng, -1, 0), b = uniform(rng, 0, 1), c = uniform(rng, -1, 1);
    const IntervalVector box{Interval(a, b), Interval(c, c + 0.3)};
    const Interval v = p.evaluate(box, Interval(0.2));
    for (int k = 0; k < 5; ++k) {
      const double x = uniform(rng, a, b), y = uniform(rng, c, c + 0.3);
      const double exact = x * x * x - 2 * x * y + 0.7 * y * y - 0.2 * x;
      EXPECT_LE(v.lo(), exact + 1e-12);
      EXPECT_GE(v.hi(), exact - 1e-12);
    }
  }
}

TEST(Inclusion, SwitchingHullAtTheOriginContainsTheWholeInterval) {
  const auto f = switching();
  const IntervalVector h = f.evaluate_hull(IntervalVector{Interval(-0.1, 0.1)}, Params::at(0));
  EXPECT_TRUE(h[0].contains(Interval(0, 1)));
}

TEST(Inclusion, SwitchingHullAwayFromTheOriginIsTheAffineImage) {
  const auto f = switching();
  const IntervalVector h = f.evaluate_hull(IntervalVector{Interval(0.5, 0.6)}, Params::at(0));
  EXPECT_NEAR(h[0].lo(), 0.4, 1e-15);
  EXPECT_NEAR(h[0].hi(), 0.5, 1e-15);
  EXPECT_TRUE(h[0].contains(Interval(0.4, 0.5)));
}

TEST(Inclusion, ConstantField) {
  const PiecewiseInclusion f(IntervalVector{Interval(0, 1)}, {RegionPiece{"all", {}, {parse_polynomial("1", 1)}}});
  EXPECT_EQ(f.evaluate_hull(IntervalVector{Interval(0.2, 0.7)}, Params::at(0))[0], Interval(1.0));
}

TEST(Inclusion, BoxOutsideTheDomainIsAnError) {
  const auto f = switching();
  try {
    f.evaluate_hull(IntervalVector{Interval(2, 3)}, Params::at(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyIntersection);
  }
}

TEST(Inclusion, GapInTheGuardsIsUncovered) {
  const PiecewiseInclusion f(IntervalVector{Interval(0, 1)},
                             {RegionPiece{"half", {AffineGuard{{1.0}, -0.5}}, {parse_polynomial("1", 1)}}});
  try {
    f.validate_coverage();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncoveredRegion);
  }
  try {
    f.evaluate_hull(IntervalVector{Interval(0.7, 0.8)}, Params::at(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UncoveredRegion);
  }
}

TEST(Inclusion, HullIsMonotoneAndContainsPointValues) {
  const auto f = switching();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    double a = uniform(rng, -1, 1), b = uniform(rng, -1, 1);
    if (a > b) std::swap(a, b);
    const double c = uniform(rng, -1, a), d = uniform(rng, b, 1);
    const Interval inner = f.evaluate_hull(IntervalVector{Interval(a, b)}, Params::at(0))[0];
    const Interval outer = f.evaluate_hull(IntervalVector{Interval(c, d)}, Params::at(0))[0];
    EXPECT_TRUE(outer.contains(inner));
    const double x = uniform(rng, a, b);
    for (const auto& v : f.values_at({x}, 0.0)) EXPECT_TRUE(inner.contains(v[0]));
  }
}

TEST(Inclusion, LambdaIntervalHullCoversEverySample) {
  const PiecewiseInclusion f(IntervalVector{Interval(-1, 1)},
                             {RegionPiece{"all", {}, {parse_polynomial("x1^2 + lambda", 1)}}}, {}, Interval(0, 1));
  const IntervalVector box{Interval(-0.3, 0.1)};
  const Interval wide = f.evaluate_hull(box, Params::over(0.25, 0.5))[0];
  for (double l : {0.25, 0.3, 0.4, 0.5}) EXPECT_TRUE(wide.contains(f.evaluate_hull(box, Params::at(l))[0]));
}

TEST(Inclusion, SolePieceAndJacobian) {
  const auto f = switching();
  EXPECT_EQ(f.sole_piece(IntervalVector{Interval(0.5, 0.6)}), std::optional<std::size_t>(1));
  EXPECT_FALSE(f.sole_piece(IntervalVector{Interval(-0.1, 0.1)}).has_value());
  const auto j = f.jacobian_hull(1, IntervalVector{Interval(0.5, 0.6)}, Params::at(0));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0], Interval(-1.0));
}
