#pragma once

#include "nidx/optimize.hpp"
#include "nidx/space.hpp"

namespace nidx {

// Dense matrix between two spaces. Entries are complex; real spaces keep
// imaginary parts at zero. Row-major, codomain.dim x domain.dim.
struct Operator {
  SpacePtr dom;
  SpacePtr cod;
  std::vector<Scalar> mat;

  Scalar at(int i, int j) const { return mat[size_t(i) * dom->dim() + j]; }
  Scalar& at(int i, int j) { return mat[size_t(i) * dom->dim() + j]; }
  Vec apply(const Vec& x) const;
  double frob() const;
};

struct OpNormResult {
  Interval iv;
  bool certified = false;
  Vec argmax;
};

OpNormResult opNorm(const Operator& G, const Budget& budget);
// Convenience: tight scalar estimate (iv.lo of the full computation).
double opNormValue(const Operator& G, const Budget& budget);

Operator identityOp(const SpacePtr& X);
Operator zeroOp(const SpacePtr& X, const SpacePtr& Y);
Operator adjoint(const Operator& G);
Operator rankOne(const SpacePtr& X, const Vec& x0star, const SpacePtr& Y, const Vec& y0);
Operator diagSum(const std::vector<Operator>& ops, double outerP);  // outerP in {1, inf}
Operator compose(const Operator& G2, const Operator& G1);
Operator scaleOp(const Operator& G, Scalar s);
Operator addOp(const Operator& G, const Operator& T);  // same dom/cod
// G~ : X (+)_inf Z -> Y, (x,z) |-> Gx
Operator extendDomainInfty(const Operator& G, const SpacePtr& Z);
// G~ : X -> Y (+)_1 Z, x |-> (Gx, 0)
Operator extendCodomainOne(const Operator& G, const SpacePtr& Z);

// G normalized to opNorm 1 (divides by the computed norm). Throws ComputeError
// when the norm is below 1e-9.
Operator normalizeOp(const Operator& G, const Budget& budget);

struct OpSearchResult {
  Operator best;
  double value = 0.0;
};

// Multistart pattern search over the operator unit sphere (proposals
// renormalized to opNorm 1, opNorm < 1e-9 rejected). extraStarts are
// normalized and searched first.
OpSearchResult minimizeOverOperatorSphere(const SpacePtr& X, const SpacePtr& Y,
                                          const std::function<double(const Operator&)>& obj,
                                          const Budget& budget,
                                          const std::vector<Operator>& extraStarts = {});

// Deterministic sweep of unit-sphere operators covering the sphere at the
// requested opNorm mesh (visitor form to avoid materializing the grid).
// Returns the certified covering radius actually achieved. Requires real
// parameter dimension <= 4.
double operatorSphereSweep(const SpacePtr& X, const SpacePtr& Y, double mesh,
                           const std::function<void(const Operator&)>& visit);

}  // namespace nidx
