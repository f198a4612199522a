#pragma once

#include <functional>

#include "nidx/space.hpp"

namespace nidx {

struct Budget {
  int starts = 12;
  int iterations = 240;
  int gridDepth = 10;  // angular grid resolution exponent for low dimensions
  uint64_t seed = 1;
  Budget withSeed(uint64_t s) const {
    Budget b = *this;
    b.seed = s;
    return b;
  }
};

struct OptResult {
  double value = 0.0;
  Vec argmax;
  bool certified = false;
  double gap = 0.0;  // certified: true optimum <= value + gap (max) / >= value - gap (min)
  bool feasible = true;
};

using SphereObjective = std::function<double(const Vec&)>;

// Global maximization of a continuous objective over the unit sphere.
// Exhaustive angular grid with certification when realDim <= 3 (gap =
// lipBound * mesh, mesh measured in the space's own norm), multistart
// pattern search always.
OptResult maximizeOnSphere(const SpacePtr& space, const SphereObjective& obj,
                           const Budget& budget, double lipBound = 0.0);

// Same machinery, minimization.
OptResult minimizeOnSphere(const SpacePtr& space, const SphereObjective& obj,
                           const Budget& budget, double lipBound = 0.0);

// Pattern-search polish of a single point on the sphere.
Vec polishOnSphere(const SpacePtr& space, const SphereObjective& obj, Vec start,
                   int iterations, bool maximize);

// Angular sphere grid (realDim <= 3). Returns unit vectors; meshOut receives
// the max adjacent chord length in the space's norm.
std::vector<Vec> sphereGrid(const SpacePtr& space, int gridDepth, double* meshOut);

}  // namespace nidx
