#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nidx/space.hpp"

using namespace nidx;

namespace {

Vec randomVec(int realDim, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(realDim);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<SpacePtr> testFamilies() {
  std::mt19937_64 rng(42);
  std::vector<Vec> funcs;
  for (int i = 0; i < 4; ++i) funcs.push_back(randomVec(2, rng, 1.0));
  SpacePtr l1 = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr l2c = Space::makeLp(Field::Complex, 2, 2.0);
  return {
      Space::makeLp(Field::Real, 2, 1.0),
      Space::makeLp(Field::Real, 2, 1.5),
      Space::makeLp(Field::Real, 3, 2.0),
      Space::makeLp(Field::Real, 2, std::numeric_limits<double>::infinity()),
      Space::makeLp(Field::Real, 1, 2.0),
      l2c,
      Space::makeWeightedMaxRoot(Field::Real, 0.5),
      Space::makeGamma(Field::Real, 0.3, false),
      Space::makeGamma(Field::Real, 0.3, true),
      Space::makePolyhedral(Field::Real, funcs),
      Space::makeAbsoluteSum(Space::makeLp(Field::Real, 2, 1.0),
                             {l1, Space::makeLp(Field::Real, 1, 2.0)}),
      Space::makeDualOf(Space::makeWeightedMaxRoot(Field::Real, 0.5)),
  };
}

}  // namespace

TEST_CASE("seminorm laws on random vectors") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> su(-3.0, 3.0);
  for (const SpacePtr& sp : testFamilies()) {
    CAPTURE(sp->familyName());
    for (int t = 0; t < 1000; ++t) {
      Vec x = randomVec(sp->realDim(), rng);
      Vec y = randomVec(sp->realDim(), rng);
      double nx = sp->norm(x), ny = sp->norm(y);
      REQUIRE(nx >= 0.0);
      double s = su(rng);
      REQUIRE(std::fabs(sp->norm(scaleVec(x, s)) - std::fabs(s) * nx) <=
              1e-10 * std::max(1.0, std::fabs(s) * nx));
      REQUIRE(sp->norm(addVec(x, y)) <= nx + ny + 1e-10);
      if (sp->field() == Field::Complex) {
        // phase rotation leaves the norm unchanged
        Vec rx = axpyTheta(Vec(x.size(), 0.0), 1.0, std::polar(1.0, 0.7), x, Field::Complex);
        REQUIRE(std::fabs(sp->norm(rx) - nx) <= 1e-10 * std::max(1.0, nx));
      }
    }
  }
}

TEST_CASE("bidual norm reproduces the norm for dim <= 3") {
  std::mt19937_64 rng(2);
  for (const SpacePtr& sp : testFamilies()) {
    if (sp->dim() > 3) continue;
    CAPTURE(sp->familyName());
    SpacePtr d = sp->dual();
    for (int t = 0; t < 50; ++t) {
      Vec x = randomVec(sp->realDim(), rng);
      REQUIRE(d->dualNorm(x) == doctest::Approx(sp->norm(x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("dualNorm agrees with the dual space's norm") {
  std::mt19937_64 rng(3);
  for (const SpacePtr& sp : testFamilies()) {
    CAPTURE(sp->familyName());
    SpacePtr d = sp->dual();
    for (int t = 0; t < 30; ++t) {
      Vec f = randomVec(sp->realDim(), rng);
      REQUIRE(sp->dualNorm(f) == doctest::Approx(d->norm(f)).epsilon(1e-6));
    }
  }
}

TEST_CASE("exact face membership at delta = 0") {
  std::mt19937_64 rng(4);
  for (const SpacePtr& sp : testFamilies()) {
    CAPTURE(sp->familyName());
    for (const Vec& u : sp->sampleSphere(20, 99)) {
      REQUIRE(sp->norm(u) == doctest::Approx(1.0).epsilon(1e-8));
      for (const Vec& f : sp->faceSample(u, 0.0, 4, 7)) {
        REQUIRE(std::fabs(pairing(f, u, sp->field()).real() - 1.0) <= 1e-8);
        REQUIRE(std::fabs(sp->dualNorm(f) - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("gamma norm and its dual form are mutually dual") {
  std::mt19937_64 rng(5);
  for (double g : {0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 0.9, 1.0}) {
    CAPTURE(g);
    SpacePtr primal = Space::makeGamma(Field::Real, g, false);
    SpacePtr dualForm = Space::makeGamma(Field::Real, g, true);
    for (int t = 0; t < 100; ++t) {
      Vec x = randomVec(2, rng);
      REQUIRE(primal->dualNorm(x) == doctest::Approx(dualForm->norm(x)).epsilon(1e-8));
      REQUIRE(dualForm->dualNorm(x) == doctest::Approx(primal->norm(x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("extreme points lie on the unit sphere") {
  for (const SpacePtr& sp : testFamilies()) {
    CAPTURE(sp->familyName());
    for (const Vec& e : sp->extremePoints())
      REQUIRE(sp->norm(e) == doctest::Approx(1.0).epsilon(1e-8));
  }
  // l1 and linf squares have exactly 4 extreme points
  REQUIRE(Space::makeLp(Field::Real, 2, 1.0)->extremePoints().size() == 4);
  REQUIRE(Space::makeLp(Field::Real, 2,
                        std::numeric_limits<double>::infinity())->extremePoints().size() == 4);
}

TEST_CASE("absolute sum part slicing round-trips") {
  SpacePtr a = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr b = Space::makeLp(Field::Real, 1, 2.0);
  SpacePtr s = Space::makeAbsoluteSum(Space::makeLp(Field::Real, 2, 1.0), {a, b});
  const auto& sf = std::get<SumFam>(s->family());
  Vec x = {1.0, -2.0, 3.0};
  REQUIRE(sumPart(sf, x, 0) == Vec{1.0, -2.0});
  REQUIRE(sumPart(sf, x, 1) == Vec{3.0});
  Vec y(3, 0.0);
  sumSetPart(sf, y, 0, {5.0, 6.0});
  sumSetPart(sf, y, 1, {7.0});
  REQUIRE(y == Vec{5.0, 6.0, 7.0});
  // l1 outer: norm is the sum of part norms
  REQUIRE(s->norm(x) == doctest::Approx(3.0 + 3.0).epsilon(1e-12));
}

TEST_CASE("bad inputs are rejected") {
  SpacePtr sp = Space::makeLp(Field::Real, 2, 2.0);
  REQUIRE_THROWS_AS(sp->norm(Vec{1.0}), InputError);
  REQUIRE_THROWS_AS(sp->norm(Vec{1.0, std::nan("")}), InputError);
  REQUIRE_THROWS_AS(Space::makeLp(Field::Real, 0, 2.0), InputError);
  REQUIRE_THROWS_AS(Space::makeLp(Field::Real, 2, 0.5), InputError);
}
