#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nidx/operators.hpp"

using namespace nidx;

namespace {

const double kInfP = std::numeric_limits<double>::infinity();

Operator matOp(const SpacePtr& dom, const SpacePtr& cod, std::vector<double> entries) {
  Operator G;
  G.dom = dom;
  G.cod = cod;
  G.mat.assign(entries.begin(), entries.end());
  return G;
}

bool containsApprox(const Interval& iv, double v, double tol) {
  return iv.lo <= v + tol && iv.hi >= v - tol;
}

Operator randomOp(const SpacePtr& dom, const SpacePtr& cod, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Operator G;
  G.dom = dom;
  G.cod = cod;
  G.mat.resize(size_t(dom->dim()) * cod->dim());
  for (Scalar& s : G.mat)
    s = (dom->field() == Field::Complex) ? Scalar(u(rng), u(rng)) : Scalar(u(rng), 0.0);
  return G;
}

}  // namespace

TEST_CASE("identity has certified norm one") {
  for (double p : {1.0, 2.0, kInfP}) {
    CAPTURE(p);
    OpNormResult r = opNorm(identityOp(Space::makeLp(Field::Real, 2, p)), Budget{});
    REQUIRE(r.iv.contains(1.0));
    REQUIRE(r.iv.width() <= 1e-9);
    REQUIRE(r.certified);
  }
}

TEST_CASE("matrix norms match closed forms on l1 and linf") {
  SpacePtr l1 = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  Operator A1 = matOp(l1, l1, {1, -2, 3, 4});   // l1->l1: max column abs sum = 6
  Operator Ai = matOp(li, li, {1, -2, 3, 4});   // linf->linf: max row abs sum = 7
  REQUIRE(opNorm(A1, Budget{}).iv.contains(6.0));
  REQUIRE(opNorm(A1, Budget{}).iv.width() <= 1e-9);
  REQUIRE(opNorm(Ai, Budget{}).iv.contains(7.0));
  // l2->l2: largest singular value
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  Operator A2 = matOp(l2, l2, {3, 0, 0, -0.5});
  REQUIRE(opNorm(A2, Budget{}).iv.contains(3.0));
}

TEST_CASE("composition is submultiplicative") {
  std::mt19937_64 rng(11);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.5);
  SpacePtr y = Space::makeWeightedMaxRoot(Field::Real, 0.4);
  SpacePtr z = Space::makeLp(Field::Real, 2, kInfP);
  for (int t = 0; t < 20; ++t) {
    Operator S = randomOp(x, y, rng);
    Operator G = randomOp(y, z, rng);
    double lhs = opNorm(compose(G, S), Budget{}).iv.lo;
    double rhs = opNorm(G, Budget{}).iv.hi * opNorm(S, Budget{}).iv.hi;
    REQUIRE(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("adjoint is an exact involution and preserves the norm") {
  std::mt19937_64 rng(12);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr y = Space::makeLp(Field::Real, 2, kInfP);
  for (int t = 0; t < 20; ++t) {
    Operator G = randomOp(x, y, rng);
    Operator GSS = adjoint(adjoint(G));
    REQUIRE(GSS.mat == G.mat);
    OpNormResult a = opNorm(G, Budget{});
    OpNormResult b = opNorm(adjoint(G), Budget{});
    REQUIRE(std::fabs(a.iv.mid() - b.iv.mid()) <= 2.0 * (a.iv.width() + b.iv.width()) + 1e-9);
  }
  // complex case: conjugate transpose
  SpacePtr c2 = Space::makeLp(Field::Complex, 2, 2.0);
  Operator C = randomOp(c2, c2, rng);
  Operator Cs = adjoint(C);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) REQUIRE(Cs.at(i, j) == std::conj(C.at(j, i)));
}

TEST_CASE("rank-one norm is the product of the factor norms") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.5);
  SpacePtr y = Space::makeGamma(Field::Real, 0.3, false);
  for (int t = 0; t < 20; ++t) {
    Vec xs = {u(rng), u(rng)}, y0 = {u(rng), u(rng)};
    double dn = x->dualNorm(xs), nn = y->norm(y0);
    if (dn < 1e-6 || nn < 1e-6) continue;
    Operator G = rankOne(x, scaleVec(xs, 1.0 / dn), y, scaleVec(y0, 1.0 / nn));
    REQUIRE(containsApprox(opNorm(G, Budget{}).iv, 1.0, 1e-8));
  }
  // non-unit factors are rejected
  REQUIRE_THROWS_AS(rankOne(x, Vec{2.0, 0.0}, y, Vec{1.0, 0.0}), InputError);
}

TEST_CASE("diagonal sums and extensions preserve the norm") {
  std::mt19937_64 rng(14);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr y = Space::makeLp(Field::Real, 2, kInfP);
  SpacePtr r = Space::makeLp(Field::Real, 1, 2.0);
  Operator G = normalizeOp(randomOp(x, y, rng), Budget{});
  Operator H = normalizeOp(randomOp(x, y, rng), Budget{});
  for (double p : {1.0, kInfP}) {
    Operator D = diagSum({G, H}, p);
    REQUIRE(containsApprox(opNorm(D, Budget{}).iv, 1.0, 1e-6));
  }
  REQUIRE(containsApprox(opNorm(extendDomainInfty(G, r), Budget{}).iv, 1.0, 1e-6));
  REQUIRE(containsApprox(opNorm(extendCodomainOne(G, r), Budget{}).iv, 1.0, 1e-6));
  // blocks away from norm one are rejected
  REQUIRE_THROWS_AS(diagSum({scaleOp(G, 0.5), H}, 1.0), InputError);
}

TEST_CASE("normalization yields norm one and rejects the zero operator") {
  std::mt19937_64 rng(15);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.5);
  Operator G = randomOp(x, x, rng);
  Operator N = normalizeOp(G, Budget{});
  REQUIRE(containsApprox(opNorm(N, Budget{}).iv, 1.0, 1e-6));
  REQUIRE_THROWS_AS(normalizeOp(zeroOp(x, x), Budget{}), ComputeError);
}

TEST_CASE("operator sphere sweep visits norm-one operators at the requested mesh") {
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  int count = 0;
  double achieved = operatorSphereSweep(li, li, 0.4, [&](const Operator& T) {
    ++count;
    if (count % 50 == 0)
      REQUIRE(containsApprox(opNorm(T, Budget{}).iv, 1.0, 1e-6));
  });
  REQUIRE(count > 0);
  REQUIRE(achieved <= 0.4 + 1e-9);
}
