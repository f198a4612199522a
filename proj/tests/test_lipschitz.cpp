#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nidx/lipschitz.hpp"
#include "nidx/numindex.hpp"

using namespace nidx;

namespace {

Operator matOp(const SpacePtr& dom, const SpacePtr& cod, std::vector<double> entries) {
  Operator G;
  G.dom = dom;
  G.cod = cod;
  G.mat.assign(entries.begin(), entries.end());
  return G;
}

}  // namespace

TEST_CASE("built-in maps evaluate as documented and vanish at zero") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  Operator A = matOp(l2, l2, {1, 2, -1, 0.5});
  LipschitzMap lin = linearMap(A);
  Vec x = {0.3, -0.7};
  REQUIRE(lin.eval(x) == A.apply(x));
  REQUIRE(lin.eval(Vec{0.0, 0.0}) == Vec{0.0, 0.0});

  LipschitzMap rad = radialMap(l2);
  Vec rx = rad.eval(x);
  double n2 = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  REQUIRE(rx[0] == doctest::Approx(x[0] * n2).epsilon(1e-12));
  REQUIRE(rx[1] == doctest::Approx(x[1] * n2).epsilon(1e-12));
  REQUIRE(rad.eval(Vec{0.0, 0.0}) == Vec{0.0, 0.0});

  LipschitzMap ab = componentAbsMap(l2);
  REQUIRE(ab.eval(x) == Vec{0.3, 0.7});
}

TEST_CASE("slope samples are scale-equivariant for the same seed") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  Operator A = matOp(l2, l2, {0.4, 1.1, -0.2, 0.9});
  double lam = 2.5;
  RangeCloud base = lipRangeSample(linearMap(A), 300, 17);
  RangeCloud scaled = lipRangeSample(linearMap(scaleOp(A, lam)), 300, 17);
  REQUIRE(base.points.size() == scaled.points.size());
  for (size_t i = 0; i < base.points.size(); ++i)
    REQUIRE(std::abs(scaled.points[i] - lam * base.points[i]) <= 1e-10);
}

TEST_CASE("linear maps reproduce the identity-based radius") {
  Budget b;
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    CAPTURE(p);
    SpacePtr sp = Space::makeLp(Field::Real, 2, p);
    Operator A = matOp(sp, sp, {0.8, 0.3, -0.4, 0.6});
    double lower = lipRadiusLower(linearMap(A), 10000, 23);
    double upper = vRadius(identityOp(sp), A, b).value.hi;
    REQUIRE(lower <= upper + 1e-6);
    REQUIRE(std::fabs(lower - upper) <= 5e-2);
  }
}

TEST_CASE("lip lower bound for the identity map is one") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  double lower = lipRadiusLower(linearMap(identityOp(l2)), 2000, 29);
  REQUIRE(lower >= 1.0 - 1e-6);
  REQUIRE(lower <= 1.0 + 1e-6);
}

TEST_CASE("sampling is deterministic in the seed") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  LipschitzMap rad = radialMap(l2);
  RangeCloud a = lipRangeSample(rad, 200, 31);
  RangeCloud b = lipRangeSample(rad, 200, 31);
  REQUIRE(a.points == b.points);
  REQUIRE(a.hullRadius == b.hullRadius);
  RangeCloud c = lipRangeSample(rad, 200, 32);
  REQUIRE(a.points != c.points);
}
