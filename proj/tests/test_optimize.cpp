#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nidx/optimize.hpp"

using namespace nidx;

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("linear objective on the Euclidean sphere attains the coefficient norm") {
  SpacePtr sp = Space::makeLp(Field::Real, 3, 2.0);
  Vec c = {0.3, -1.2, 0.5};
  double cnorm = std::sqrt(dot(c, c));
  SphereObjective obj = [&](const Vec& x) { return std::fabs(dot(c, x)); };
  Budget b;
  OptResult r = maximizeOnSphere(sp, obj, b, cnorm);
  REQUIRE(r.value <= cnorm + 1e-9);
  REQUIRE(r.value >= cnorm - 1e-6);
  REQUIRE(r.certified);          // realDim = 3: exhaustive grid applies
  REQUIRE(cnorm <= r.value + r.gap + 1e-12);
  REQUIRE(sp->norm(r.argmax) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("minimization mirrors maximization") {
  SpacePtr sp = Space::makeLp(Field::Real, 2, 2.0);
  SphereObjective obj = [](const Vec& x) { return x[0] * x[0]; };
  Budget b;
  OptResult r = minimizeOnSphere(sp, obj, b, 2.0);
  REQUIRE(r.value <= 1e-6);
  REQUIRE(r.value >= -1e-12);
}

TEST_CASE("same budget gives bit-identical results") {
  SpacePtr sp = Space::makeWeightedMaxRoot(Field::Real, 0.5);
  SphereObjective obj = [](const Vec& x) { return std::fabs(x[0]) + 0.3 * std::fabs(x[1]); };
  Budget b;
  b.seed = 12345;
  OptResult r1 = maximizeOnSphere(sp, obj, b);
  OptResult r2 = maximizeOnSphere(sp, obj, b);
  REQUIRE(r1.value == r2.value);
  REQUIRE(r1.argmax == r2.argmax);
  REQUIRE(r1.gap == r2.gap);
}

TEST_CASE("more grid depth or starts never hurts the maximum") {
  SpacePtr sp = Space::makeLp(Field::Real, 2, 1.5);
  Vec c = {1.0, 0.7};
  SphereObjective obj = [&](const Vec& x) { return std::fabs(dot(c, x)); };
  Budget lo, hi;
  lo.gridDepth = 8;
  hi.gridDepth = 12;
  REQUIRE(maximizeOnSphere(sp, obj, hi).value >= maximizeOnSphere(sp, obj, lo).value - 1e-12);
  Budget few, many;
  few.starts = 2;
  many.starts = 24;
  REQUIRE(maximizeOnSphere(sp, obj, many).value >= maximizeOnSphere(sp, obj, few).value - 1e-12);
}

TEST_CASE("sphere grid points are unit vectors and the mesh shrinks with depth") {
  SpacePtr sp = Space::makeLp(Field::Real, 3, 2.0);
  double mesh8 = 0.0, mesh11 = 0.0;
  std::vector<Vec> g8 = sphereGrid(sp, 8, &mesh8);
  std::vector<Vec> g11 = sphereGrid(sp, 11, &mesh11);
  REQUIRE(g8.size() > 0);
  REQUIRE(g11.size() > g8.size());
  REQUIRE(mesh11 < mesh8);
  for (size_t i = 0; i < g8.size(); i += 7)
    REQUIRE(sp->norm(g8[i]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("polishing a point never decreases the objective") {
  SpacePtr sp = Space::makeLp(Field::Real, 2, 2.0);
  Vec c = {0.6, -0.8};
  SphereObjective obj = [&](const Vec& x) { return std::fabs(dot(c, x)); };
  Vec start = {1.0, 0.0};
  Vec out = polishOnSphere(sp, obj, start, 120, true);
  REQUIRE(obj(out) >= obj(start) - 1e-12);
  REQUIRE(obj(out) == doctest::Approx(1.0).epsilon(1e-6));
}
