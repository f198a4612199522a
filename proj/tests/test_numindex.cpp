#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nidx/numindex.hpp"

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

}  // namespace

TEST_CASE("exact abstract index rules") {
  SpacePtr k = Space::makeLp(Field::Real, 1, 2.0);
  REQUIRE(exactAbstractIndex(k, Vec{1.0}) == 1.0);

  SpacePtr l1 = Space::makeLp(Field::Real, 2, 1.0);
  REQUIRE(exactAbstractIndex(l1, Vec{1.0, 0.0}) == 1.0);
  REQUIRE(exactAbstractIndex(l1, Vec{0.5, 0.5}) == 0.0);

  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  REQUIRE(exactAbstractIndex(li, Vec{1.0, -1.0}) == 1.0);
  REQUIRE(exactAbstractIndex(li, Vec{1.0, 0.3}) == 0.0);

  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  REQUIRE(exactAbstractIndex(l2, Vec{1.0, 0.0}) == 0.0);  // smooth point

  // no closed form for a generic weighted-max-root point
  SpacePtr w = Space::makeWeightedMaxRoot(Field::Real, 0.5);
  Vec u = w->sampleSphere(1, 3).at(0);
  REQUIRE(!exactAbstractIndex(w, u).has_value());
}

TEST_CASE("abstract index encloses the exact value on decidable points") {
  Budget b;
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  IndexReport one = abstractIndex(li, Vec{1.0, 1.0}, b);
  REQUIRE(one.value.lo >= 1.0 - 1e-2);  // grid-certified lower carries the mesh slack
  REQUIRE(one.value.hi <= 1.0 + 1e-9);
  REQUIRE(one.value.hi >= 1.0 - 1e-6);

  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  IndexReport zero = abstractIndex(l2, Vec{1.0, 0.0}, b);
  REQUIRE(zero.value.lo <= 1e-9);
  REQUIRE(zero.value.hi <= 1e-2);

  // optimizer-only mode stays consistent with the certified enclosure
  IndexReport opt = abstractIndexOptimizer(l2, Vec{1.0, 0.0}, b);
  REQUIRE(opt.value.hi >= zero.value.lo - 1e-9);
  REQUIRE(opt.value.hi <= zero.value.hi + 1e-2);
}

TEST_CASE("structural certificates: Euclidean rotation zero and linf spear one") {
  Budget b;
  SpacePtr l2 = Space::makeLp(Field::Real, 2, 2.0);
  auto zero = nIndexStructural(identityOp(l2), b);
  REQUIRE(zero.has_value());
  REQUIRE(zero->value.lo == 0.0);
  REQUIRE(zero->value.hi == 0.0);
  REQUIRE(zero->witnessOp.has_value());

  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  IndexReport one = nIndex(identityOp(li), b);
  REQUIRE(one.value.lo >= 1.0 - 1e-6);
  REQUIRE(one.value.hi <= 1.0 + 1e-6);
}

TEST_CASE("structural rank-one value matches the factor product") {
  Budget b;
  SpacePtr l1 = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr gd = Space::makeGamma(Field::Real, 0.3, true);
  Operator G = rankOne(l1, Vec{1.0, 1.0}, gd, Vec{0.0, 1.0});
  auto s = nIndexStructural(G, b);
  REQUIRE(s.has_value());
  REQUIRE(s->value.lo <= 0.3 + 1e-2);
  REQUIRE(s->value.hi >= 0.3 - 1e-2);
}

TEST_CASE("optimizer upper bound dominates the structural value") {
  Budget b;
  b.starts = 6;
  b.iterations = 160;
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = identityOp(li);
  IndexReport up = nIndexUpper(G, b);
  REQUIRE(up.value.lo == 0.0);  // sampling cannot certify a positive lower bound
  REQUIRE(up.value.hi >= 1.0 - 1e-2);
  REQUIRE(up.value.hi <= 1.0 + 1e-6);
}

TEST_CASE("brute force enclosure contains the structural value") {
  Budget b;
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  IndexReport bf = nIndexBruteForce(identityOp(li), 0.25, b);
  REQUIRE(bf.value.lo <= 1.0);
  REQUIRE(bf.value.hi >= 1.0 - 1e-6);
  REQUIRE(bf.value.lo >= 0.0);  // coarse mesh keeps the certified lower conservative
}

TEST_CASE("adjoint comparison holds on a rank-one case") {
  Budget b;
  b.starts = 6;
  b.iterations = 160;
  SpacePtr l1 = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  Operator G = rankOne(l1, Vec{1.0, 1.0}, li, Vec{1.0, 1.0});
  AdjointVerdict v = adjointCompare(G, b);
  REQUIRE(v.inequalityHolds);
}

TEST_CASE("composition with an isometric embedding does not raise the index") {
  Budget b;
  b.starts = 6;
  b.iterations = 160;
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  SpacePtr r = Space::makeLp(Field::Real, 1, 2.0);
  Operator G1 = identityOp(li);
  Operator emb = extendCodomainOne(identityOp(li), r);  // li -> li (+)_1 R, isometry
  IndexReport comp = nIndex(compose(emb, G1), b);
  IndexReport base = nIndex(G1, b);
  REQUIRE(comp.value.hi <= base.value.hi + 2e-2);
}

TEST_CASE("identical budgets reproduce identical reports") {
  Budget b;
  b.seed = 77;
  SpacePtr x = Space::makeGamma(Field::Real, 0.4, true);
  Operator G = rankOne(Space::makeLp(Field::Real, 2, 1.0), Vec{1.0, 1.0}, x, Vec{0.0, 1.0});
  IndexReport a = nIndexUpper(G, b);
  IndexReport c = nIndexUpper(G, b);
  REQUIRE(a.value.lo == c.value.lo);
  REQUIRE(a.value.hi == c.value.hi);
}

TEST_CASE("index scan produces well-formed reports") {
  Budget b;
  b.starts = 4;
  b.iterations = 80;
  SpacePtr li = Space::makeLp(Field::Real, 2, kInfP);
  std::vector<IndexReport> reps = indexValueScan(li, li, 3, b);
  REQUIRE(reps.size() >= 1);  // samples with near-equal values are deduplicated
  REQUIRE(reps.size() <= 3);
  for (size_t i = 1; i < reps.size(); ++i) REQUIRE(reps[i - 1].value.hi <= reps[i].value.hi);
  for (const IndexReport& r : reps) {
    REQUIRE(r.value.lo <= r.value.hi + 1e-12);
    REQUIRE(r.value.lo >= -1e-12);
    REQUIRE(r.value.hi <= 1.0 + 1e-6);
  }
}
