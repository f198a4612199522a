#include "nidx/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nidx {

namespace {

double u01(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

double gauss(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u01(rng));
}

Vec randomBallPoint(const SpacePtr& s, std::mt19937_64& rng) {
  Vec x(size_t(s->realDim()));
  for (double& c : x) c = gauss(rng);
  double n = s->norm(x);
  if (n < 1e-12) return Vec(size_t(s->realDim()), 0.0);
  return scaleVec(x, (0.15 + 0.85 * u01(rng)) / n);
}

// Pair generator: alternates far-apart pairs in the unit ball with short
// segments (separation in [1e-3, 1e-1]), where slope functionals probe the
// local derivative behavior.
void samplePairs(const SpacePtr& s, int pairCount, uint64_t seed,
                 const std::function<void(const Vec&, const Vec&)>& visit) {
  std::mt19937_64 rng(seed ^ 0x11b5c417ull);
  for (int k = 0; k < pairCount; ++k) {
    Vec x = randomBallPoint(s, rng);
    Vec y;
    if (k % 2 == 0) {
      y = randomBallPoint(s, rng);
    } else {
      Vec d(size_t(s->realDim()));
      for (double& c : d) c = gauss(rng);
      double n = s->norm(d);
      if (n < 1e-12) continue;
      double t = 1e-3 * std::pow(100.0, u01(rng));  // log-uniform in [1e-3, 1e-1]
      y = addVec(x, scaleVec(d, t / n));
    }
    visit(x, y);
  }
}

// Largest |xi*(slope)| over the sampled face of the normalized difference.
double slopeValue(const LipschitzMap& F, const Vec& x, const Vec& y, uint64_t seed,
                  Scalar* pointOut, Vec* ystarOut) {
  const SpacePtr& s = F.space;
  Vec d = subVec(x, y);
  double nd = s->norm(d);
  if (nd < 1e-9) return -1.0;
  Vec u = scaleVec(d, 1.0 / nd);
  auto faces = s->faceSample(u, 0.0, 4, seed);
  if (faces.empty()) return -1.0;
  Vec slope = scaleVec(subVec(F.eval(x), F.eval(y)), 1.0 / nd);
  double best = -1.0;
  for (const Vec& xi : faces) {
    Scalar p = pairing(xi, slope, s->field());
    if (std::abs(p) > best) {
      best = std::abs(p);
      if (pointOut) *pointOut = p;
      if (ystarOut) *ystarOut = xi;
    }
  }
  return best;
}

}  // namespace

Vec LipschitzMap::eval(const Vec& x) const {
  Vec v = raw(x);
  if (!atZero.empty()) v = subVec(v, atZero);
  return v;
}

LipschitzMap makeLipschitzMap(SpacePtr space, std::function<Vec(const Vec&)> f,
                              double lipBoundHint) {
  LipschitzMap F;
  F.space = std::move(space);
  F.raw = std::move(f);
  F.lipBoundHint = lipBoundHint;
  F.atZero = F.raw(Vec(size_t(F.space->realDim()), 0.0));
  return F;
}

LipschitzMap linearMap(const Operator& A, double lipBoundHint) {
  if (A.dom->realDim() != A.cod->realDim())
    throw InputError("linearMap: operator must map a space to itself");
  double hint = lipBoundHint;
  if (hint <= 0.0) hint = opNorm(A, Budget{}).iv.hi;
  return makeLipschitzMap(A.dom, [A](const Vec& x) { return A.apply(x); }, hint);
}

LipschitzMap radialMap(SpacePtr space) {
  return makeLipschitzMap(
      space,
      [](const Vec& x) {
        double e2 = 0.0;
        for (double c : x) e2 += c * c;
        return scaleVec(x, std::sqrt(e2));
      },
      3.0);
}

LipschitzMap componentAbsMap(SpacePtr space) {
  Field f = space->field();
  return makeLipschitzMap(
      space,
      [f](const Vec& x) {
        Vec v(x.size(), 0.0);
        if (f == Field::Real) {
          for (size_t i = 0; i < x.size(); ++i) v[i] = std::fabs(x[i]);
        } else {
          for (size_t i = 0; i + 1 < x.size(); i += 2)
            v[i] = std::hypot(x[i], x[i + 1]);
        }
        return v;
      },
      1.0);
}

RangeCloud lipRangeSample(const LipschitzMap& F, int pairCount, uint64_t seed) {
  RangeCloud c;
  c.samples = pairCount;
  samplePairs(F.space, pairCount, seed, [&](const Vec& x, const Vec& y) {
    Scalar p;
    Vec ystar;
    double v = slopeValue(F, x, y, seed + c.points.size(), &p, &ystar);
    if (v < 0.0) return;
    c.points.push_back(p);
    c.xs.push_back(x);
    c.ystars.push_back(ystar);
    c.hullRadius = std::max(c.hullRadius, v);
  });
  return c;
}

double lipRadiusLower(const LipschitzMap& F, int pairCount, uint64_t seed) {
  double best = 0.0;
  Vec bx, by;
  samplePairs(F.space, pairCount, seed, [&](const Vec& x, const Vec& y) {
    double v = slopeValue(F, x, y, seed, nullptr, nullptr);
    if (v > best) {
      best = v;
      bx = x;
      by = y;
    }
  });
  if (bx.empty()) return best;
  // Joint pattern search on the best pair; every probe stays a valid slope
  // evaluation, so the refined value remains a certified lower bound.
  double step = 0.05;
  int rd = F.space->realDim();
  while (step > 1e-7) {
    bool improved = false;
    for (int c = 0; c < 2 * rd; ++c) {
      int idx = c / 2;
      double sgn = (c % 2 == 0) ? 1.0 : -1.0;
      for (int side = 0; side < 2; ++side) {
        Vec x = bx, y = by;
        ((side == 0) ? x : y)[size_t(idx)] += sgn * step;
        double v = slopeValue(F, x, y, seed, nullptr, nullptr);
        if (v > best + 1e-14) {
          best = v;
          bx = x;
          by = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace nidx
