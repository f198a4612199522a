#pragma once

#include "nidx/operators.hpp"

namespace nidx {

struct RangeCloud {
  std::vector<Scalar> points;
  std::vector<Vec> xs;      // recorded feasible pair, domain side
  std::vector<Vec> ystars;  // recorded feasible pair, codomain-dual side
  double delta = 0.0;
  int samples = 0;
  double hullRadius = 0.0;
};

enum class RadiusMethod { Derivative, Spatial, Combined, AlignedPairs };

struct RadiusEstimate {
  Interval value;
  std::optional<std::pair<Vec, Vec>> witnessPair;  // (x, y*)
  RadiusMethod method = RadiusMethod::Combined;
  bool lowerCertified = false;
};

// Aligned feasible pair (x, y*): ||x||=1, ||y*||*=1, Re y*(Gx) > 1-delta.
struct PairSet {
  std::vector<Vec> xs;
  std::vector<Vec> ystars;
};

// Exact aligned pairs of G (y*(Gx)=1 within face tolerance); reused across
// radius evaluations for a fixed G.
PairSet alignedPairs(const Operator& G, int pairCount, uint64_t seed);

double vDelta(const Operator& G, const Operator& T, double delta, const Budget& budget);

RadiusEstimate vRadiusDerivative(const Operator& G, const Operator& T, const Budget& budget);

RadiusEstimate alignedPairLower(const Operator& G, const Operator& T, int pairCount,
                                uint64_t seed);
double pairSetLower(const PairSet& ps, const Operator& T, std::pair<Vec, Vec>* best = nullptr);

RadiusEstimate vRadius(const Operator& G, const Operator& T, const Budget& budget);

// Cheap upper bound used inside operator-sphere searches: short alpha
// schedule, coarse theta grid.
double quickRadiusUpper(const Operator& G, const Operator& T, const Budget& budget);

// max over theta of ||G + theta T|| (certified upper via opNorm bounds).
double maxThetaNormUpper(const Operator& G, const Operator& T, const Budget& budget);

RangeCloud rangeCloud(const Operator& G, const Operator& T, double delta, int count,
                      uint64_t seed);

struct SpearProbeResult {
  bool refuted = false;
  double deficit = 0.0;  // min over tried T of max_theta||G+thetaT|| - 1 - ||T||
  std::optional<Operator> witness;
};
SpearProbeResult spearProbe(const Operator& G, int trials, const Budget& budget);

std::optional<Operator> nullDirectionSearch(const Operator& G, const Budget& budget);

std::string rangeCloudCsv(const RangeCloud& c);

}  // namespace nidx
