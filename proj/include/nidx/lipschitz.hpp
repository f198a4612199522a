#pragma once

#include "nidx/numrange.hpp"

namespace nidx {

struct LipschitzMap {
  SpacePtr space;
  std::function<Vec(const Vec&)> raw;
  double lipBoundHint = 1.0;
  Vec atZero;  // subtracted so that F(0)=0

  Vec eval(const Vec& x) const;
};

LipschitzMap makeLipschitzMap(SpacePtr space, std::function<Vec(const Vec&)> f,
                              double lipBoundHint);
LipschitzMap linearMap(const Operator& A, double lipBoundHint = 0.0);
LipschitzMap radialMap(SpacePtr space);          // x * ||x||_2
LipschitzMap componentAbsMap(SpacePtr space);    // coordinatewise absolute value

RangeCloud lipRangeSample(const LipschitzMap& F, int pairCount, uint64_t seed);
double lipRadiusLower(const LipschitzMap& F, int pairCount, uint64_t seed);

}  // namespace nidx
