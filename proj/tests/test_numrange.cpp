#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "nidx/numrange.hpp"

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

Operator randomOp(const SpacePtr& dom, const SpacePtr& cod, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Operator G;
  G.dom = dom;
  G.cod = cod;
  G.mat.resize(size_t(dom->dim()) * cod->dim());
  for (Scalar& s : G.mat) s = Scalar(u(rng), 0.0);
  return G;
}

}  // namespace

TEST_CASE("radius of the identity direction is one, of a Euclidean rotation is zero") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  Operator id = identityOp(l2);
  Operator rot = matOp(l2, l2, {0, 1, -1, 0});
  RadiusEstimate same = vRadius(id, id, Budget{});
  REQUIRE(same.value.lo >= 1.0 - 1e-6);
  REQUIRE(same.value.hi <= 1.0 + 1e-6);
  RadiusEstimate zero = vRadius(id, rot, Budget{});
  REQUIRE(zero.value.lo >= 0.0);
  REQUIRE(zero.value.hi <= 1e-3);
}

TEST_CASE("radius is bounded by the operator norm") {
  std::mt19937_64 rng(21);
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr y = Space::makeLp(Field::Real, 2, kInfP);
  for (int t = 0; t < 10; ++t) {
    Operator G = normalizeOp(randomOp(x, y, rng), Budget{});
    Operator T = randomOp(x, y, rng);
    RadiusEstimate v = vRadius(G, T, Budget{});
    REQUIRE(v.value.lo <= v.value.hi + 1e-12);
    REQUIRE(v.value.hi <= opNorm(T, Budget{}).iv.hi + 1e-6);
  }
}

TEST_CASE("radius scales exactly with the direction") {
  std::mt19937_64 rng(22);
  SpacePtr x = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = identityOp(x);
  Operator T = randomOp(x, x, rng);
  double lam = 0.37;
  double base = pairSetLower(alignedPairs(G, 64, 5), T);
  double scaled = pairSetLower(alignedPairs(G, 64, 5), scaleOp(T, lam));
  REQUIRE(scaled == doctest::Approx(lam * base).epsilon(1e-12));
  double d0 = vDelta(G, T, 1e-2, Budget{});
  double d1 = vDelta(G, scaleOp(T, lam), 1e-2, Budget{});
  REQUIRE(d1 == doctest::Approx(lam * d0).epsilon(1e-9));
}

TEST_CASE("the delta-spatial estimate is nondecreasing in delta") {
  std::mt19937_64 rng(23);
  SpacePtr x = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = identityOp(x);
  for (int t = 0; t < 5; ++t) {
    Operator T = randomOp(x, x, rng);
    double prev = -1.0;
    for (double delta : {1e-3, 1e-2, 1e-1, 0.3}) {
      double v = vDelta(G, T, delta, Budget{});
      REQUIRE(v >= prev - 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("derivative quotients decrease as alpha shrinks") {
  // (||G + alpha*T|| - 1)/alpha is nonincreasing in alpha by convexity;
  // exact extreme-point norms on linf make the check sharp.
  std::mt19937_64 rng(24);
  SpacePtr x = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = identityOp(x);
  for (int t = 0; t < 10; ++t) {
    Operator T = randomOp(x, x, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4}) {
      double q = (opNorm(addOp(G, scaleOp(T, alpha)), Budget{}).iv.lo - 1.0) / alpha;
      REQUIRE(q <= prev + 1e-9);
      prev = q;
    }
  }
}

TEST_CASE("aligned pairs are genuinely aligned") {
  SpacePtr x = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr y = Space::makeGamma(Field::Real, 0.3, false);
  std::mt19937_64 rng(25);
  Operator G = normalizeOp(randomOp(x, y, rng), Budget{});
  PairSet ps = alignedPairs(G, 32, 9);
  REQUIRE(!ps.xs.empty());
  REQUIRE(ps.xs.size() == ps.ystars.size());
  for (size_t i = 0; i < ps.xs.size(); ++i) {
    REQUIRE(x->norm(ps.xs[i]) == doctest::Approx(1.0).epsilon(1e-7));
    REQUIRE(y->dualNorm(ps.ystars[i]) == doctest::Approx(1.0).epsilon(1e-7));
    REQUIRE(pairing(ps.ystars[i], G.apply(ps.xs[i]), Field::Real).real() >= 1.0 - 1e-6);
  }
}

TEST_CASE("composition with the base operator is dominated by the identity radius") {
  std::mt19937_64 rng(26);
  SpacePtr x = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = identityOp(x);
  for (int t = 0; t < 5; ++t) {
    Operator T = randomOp(x, x, rng);
    double lhs = vRadius(G, compose(G, T), Budget{}).value.hi;
    double rhs = vRadius(identityOp(x), T, Budget{}).value.hi;
    REQUIRE(lhs <= rhs + 1e-6);
  }
}

TEST_CASE("range cloud emits reproducible points in the documented CSV layout") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  Operator id = identityOp(l2);
  Operator rot = matOp(l2, l2, {0, 1, -1, 0});
  RangeCloud c = rangeCloud(id, rot, 1e-3, 100, 31);
  REQUIRE(c.points.size() > 0);
  REQUIRE(c.points.size() == c.xs.size());
  REQUIRE(c.points.size() == c.ystars.size());
  // rotation case: all range values are tiny
  REQUIRE(c.hullRadius <= 2e-3);
  for (size_t i = 0; i < c.points.size(); ++i) {
    Scalar rebuilt = pairing(c.ystars[i], rot.apply(c.xs[i]), Field::Real);
    REQUIRE(std::abs(rebuilt - c.points[i]) <= 1e-12);
  }
  std::string csv = rangeCloudCsv(c);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  REQUIRE(header.rfind("re,im", 0) == 0);
  size_t rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    ++rows;
    REQUIRE(std::count(line.begin(), line.end(), ',') ==
            std::count(header.begin(), header.end(), ','));
  }
  REQUIRE(rows == c.points.size());
  // determinism: same seed, same bytes
  REQUIRE(rangeCloudCsv(rangeCloud(id, rot, 1e-3, 100, 31)) == csv);
}

TEST_CASE("spear probe refutes the identity on the Euclidean plane but not on linf") {
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  REQUIRE(spearProbe(identityOp(l2), 24, Budget{}).refuted);
  REQUIRE(!spearProbe(identityOp(li), 24, Budget{}).refuted);
}
