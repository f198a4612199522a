#pragma once

#include "nidx/numrange.hpp"

namespace nidx {

enum class IndexMethod { Structural, Optimizer, BruteForce };

struct IndexReport {
  Interval value;
  std::optional<Operator> witnessOp;
  std::optional<Vec> witnessVec;
  IndexMethod method = IndexMethod::Optimizer;
  std::string notes;
};

// Radius of a vector pair in a space: v(Z,u,z) via the derivative formula on
// the space's own norm; lower bound from the face of u.
RadiusEstimate vectorRadius(const SpacePtr& Z, const Vec& u, const Vec& z,
                            const Budget& budget, const std::vector<Vec>* faceOfU = nullptr);

// n(Z,u) = inf{v(Z,u,z): z in S_Z}. Grid-certified when realDim <= 3.
IndexReport abstractIndex(const SpacePtr& Z, const Vec& u, const Budget& budget);
// Same inf by multistart descent only (no grid), upper bound quality check.
IndexReport abstractIndexOptimizer(const SpacePtr& Z, const Vec& u, const Budget& budget);

// Exact value when the point's geometry is decidable (scalars, l1/linf sums,
// smooth points, non-extreme points); nullopt otherwise.
std::optional<double> exactAbstractIndex(const SpacePtr& Z, const Vec& u);

// Optimizer upper bound for n_G; extraStarts seeds the operator search.
IndexReport nIndexUpper(const Operator& G, const Budget& budget,
                        const std::vector<Operator>& extraStarts = {});

// Certified enclosure by covering the operator sphere (total real matrix
// dimension <= 4).
IndexReport nIndexBruteForce(const Operator& G, double mesh, const Budget& budget);

std::optional<IndexReport> nIndexStructural(const Operator& G, const Budget& budget);

// Structural when applicable, else optimizer.
IndexReport nIndex(const Operator& G, const Budget& budget);

std::vector<IndexReport> indexValueScan(const SpacePtr& X, const SpacePtr& Y,
                                        int sampleCount, const Budget& budget);

struct AdjointVerdict {
  IndexReport forG;
  IndexReport forAdjoint;
  bool inequalityHolds = false;  // n_{G*}.upper <= n_G.upper + 2e-2
  bool equalWithinWidths = false;
};
AdjointVerdict adjointCompare(const Operator& G, const Budget& budget);

}  // namespace nidx
