#pragma once

#include <memory>
#include <variant>

#include "nidx/common.hpp"

namespace nidx {

class Space;
using SpacePtr = std::shared_ptr<const Space>;

// Norm family payloads. Vectors of functionals are stored realified.
struct LpFam {
  double p;  // in [1, inf]; infinity() means the max norm
};
struct WmrFam {
  double r;  // ||(x1,x2)|| = max{|x1|, sqrt(r|x1|^2 + |x2|^2)}, dim 2
};
struct GammaFam {
  double gamma;
  bool dualForm;  // false: max{|x2|, |x1|+(1-g)|x2|}; true: max{|x1|, g|x1|+|x2|}
};
struct PolyFam {
  std::vector<Vec> funcs;  // ||x|| = max_i |<f_i, x>|
};
struct SumFam {
  SpacePtr outer;                // real space on part-norm vectors
  std::vector<SpacePtr> parts;   // all sharing the field
  std::vector<int> realOffsets;  // realified offset of each part
};
struct DualFam {
  SpacePtr inner;  // norm = sup over the inner unit sphere of |<f, x>|
};

using FamilyVariant = std::variant<LpFam, WmrFam, GammaFam, PolyFam, SumFam, DualFam>;

class Space : public std::enable_shared_from_this<Space> {
 public:
  Field field() const { return field_; }
  int dim() const { return dim_; }
  int realDim() const { return field_ == Field::Complex ? 2 * dim_ : dim_; }
  const std::string& label() const { return label_; }
  const FamilyVariant& family() const { return fam_; }
  std::string familyName() const;

  double norm(const Vec& x) const;
  double dualNorm(const Vec& f) const;
  SpacePtr dual() const;

  // Functionals f with dualNorm(f)=1 and Re f(u) >= 1-delta (exact face for
  // delta=0). Empty result means no certified face was found.
  std::vector<Vec> faceSample(const Vec& u, double delta, int count, uint64_t seed) const;

  std::vector<Vec> sampleSphere(int count, uint64_t seed) const;

  // Complete extreme-point list for families where one is available
  // (polyhedral-like real balls, l1/linf); empty otherwise.
  const std::vector<Vec>& extremePoints() const;

  static SpacePtr makeLp(Field f, int dim, double p, std::string label = "");
  static SpacePtr makeWeightedMaxRoot(Field f, double r, std::string label = "");
  static SpacePtr makeGamma(Field f, double gamma, bool dualForm, std::string label = "");
  static SpacePtr makePolyhedral(Field f, std::vector<Vec> funcs, std::string label = "");
  static SpacePtr makeAbsoluteSum(SpacePtr outer, std::vector<SpacePtr> parts,
                                  std::string label = "");
  static SpacePtr makeDualOf(SpacePtr inner, std::string label = "");

 private:
  Space() = default;
  void checkVec(const Vec& x) const;
  double familyNorm(const Vec& x) const;
  std::vector<Vec> closedFormFace(const Vec& u, double delta, int count, uint64_t seed) const;
  std::vector<Vec> numericFace(const Vec& u, double delta, int count, uint64_t seed) const;

  Field field_ = Field::Real;
  int dim_ = 0;
  FamilyVariant fam_;
  std::string label_;
  mutable std::shared_ptr<const Space> dualCache_;
  mutable std::vector<Vec> extremeCache_;
  mutable bool extremeComputed_ = false;
  mutable std::shared_ptr<void> memo_;  // DualOf norm memoization
};

// Part slice helpers for absolute sums.
Vec sumPart(const SumFam& sf, const Vec& x, size_t i);
void sumSetPart(const SumFam& sf, Vec& x, size_t i, const Vec& part);

SpacePtr absoluteSum(const std::vector<SpacePtr>& parts, SpacePtr outer, std::string label = "");

}  // namespace nidx
