#include "nidx/numindex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double u01(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

double gauss(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u01(rng));
}

// Derivative-formula upper bound for v(Z,u,z) on the space's own norm.
double vectorDerivUpper(const SpacePtr& Z, const Vec& u, const Vec& z, int thetaCount) {
  const Field f = Z->field();
  auto g = [&](double alpha, Scalar th) {
    return (Z->norm(axpyTheta(u, alpha, th, z, f)) - 1.0) / alpha;
  };
  double upper = kInf;
  double prev = kInf;
  for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    double m;
    if (f == Field::Real) {
      m = std::max(g(alpha, Scalar(1.0)), g(alpha, Scalar(-1.0)));
    } else {
      m = -kInf;
      double bestAng = 0.0;
      for (int k = 0; k < thetaCount; ++k) {
        double a = 2.0 * M_PI * k / thetaCount;
        double v = g(alpha, Scalar(std::cos(a), std::sin(a)));
        if (v > m) {
          m = v;
          bestAng = a;
        }
      }
      double lo = bestAng - 2.0 * M_PI / thetaCount, hi = bestAng + 2.0 * M_PI / thetaCount;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double fc = g(alpha, Scalar(std::cos(c), std::sin(c)));
      double fd = g(alpha, Scalar(std::cos(d), std::sin(d)));
      for (int it = 0; it < 36 && hi - lo > 1e-10; ++it) {
        if (fc > fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - gr * (hi - lo);
          fc = g(alpha, Scalar(std::cos(c), std::sin(c)));
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + gr * (hi - lo);
          fd = g(alpha, Scalar(std::cos(d), std::sin(d)));
        }
      }
      m = std::max({m, fc, fd});
    }
    upper = std::min(upper, m);
    if (std::fabs(prev - m) < 1e-9) break;
    prev = m;
  }
  return std::max(0.0, upper);
}

double faceLower(const std::vector<Vec>& faces, const Vec& z, Field f) {
  double m = 0.0;
  for (const Vec& phi : faces) m = std::max(m, std::abs(pairing(phi, z, f)));
  return m;
}

}  // namespace

RadiusEstimate vectorRadius(const SpacePtr& Z, const Vec& u, const Vec& z, const Budget& budget,
                            const std::vector<Vec>* faceOfU) {
  if (std::fabs(Z->norm(u) - 1.0) > 1e-8) throw InputError("vectorRadius: u must be unit");
  std::vector<Vec> ownFaces;
  if (!faceOfU) {
    ownFaces = Z->faceSample(u, 0.0, 64, budget.seed);
    faceOfU = &ownFaces;
  }
  double upper = vectorDerivUpper(Z, u, z, 128);
  double lower = faceLower(*faceOfU, z, Z->field());
  RadiusEstimate est;
  est.method = RadiusMethod::Derivative;
  est.value = {std::min(lower, upper), upper};
  est.lowerCertified = !faceOfU->empty();
  return est;
}

namespace {

IndexReport abstractIndexImpl(const SpacePtr& Z, const Vec& u, const Budget& budget,
                              bool exhaustive) {
  if (std::fabs(Z->norm(u) - 1.0) > 1e-8) throw InputError("abstractIndex: u must be unit");
  auto faces = Z->faceSample(u, 0.0, 600, budget.seed);
  const Field f = Z->field();
  auto upperAt = [&](const Vec& z) { return vectorDerivUpper(Z, u, z, 96); };
  auto lowerAt = [&](const Vec& z) { return faceLower(faces, z, f); };
  IndexReport rep;
  double upper = kInf;
  Vec bestZ;
  auto tryUpper = [&](const Vec& zp) {
    double uv = upperAt(zp);
    if (uv < upper) {
      upper = uv;
      bestZ = zp;
    }
  };
  double lower = 0.0;
  std::string lowerNote = "lower bound 0 (no grid certification)";
  if (Z->realDim() <= 3) {
    // Certified lower bound: the face functional values lower-bound v(Z,u,z)
    // pointwise, and v(Z,u,.) is 1-Lipschitz, so the grid minimum minus the
    // mesh bounds the infimum over the whole sphere.
    double mesh = 0.0;
    auto grid = sphereGrid(Z, std::max(budget.gridDepth, 12), &mesh);
    std::vector<std::pair<double, size_t>> ranked(grid.size());
    double certLower = kInf;
    for (size_t k = 0; k < grid.size(); ++k) {
      double l = lowerAt(grid[k]);
      ranked[k] = {l, k};
      certLower = std::min(certLower, l);
    }
    if (!faces.empty()) {
      lower = std::max(0.0, certLower - mesh);
      lowerNote = "grid-certified lower";
    }
    if (exhaustive) {
      // Points whose certified lower exceeds the running upper cannot carry
      // the infimum; rank by the cheap lower and refine only the best ones.
      std::sort(ranked.begin(), ranked.end());
      size_t refine = std::min<size_t>(ranked.size(), 64);
      for (size_t k = 0; k < refine; ++k) tryUpper(grid[ranked[k].second]);
      size_t stride = std::max<size_t>(1, grid.size() / 32);
      for (size_t k = 0; k < grid.size(); k += stride) tryUpper(grid[k]);
    }
  }
  if (!exhaustive || Z->realDim() > 3) {
    int starts = std::max(budget.starts, 4);
    for (const Vec& s : Z->sampleSphere(starts, budget.seed ^ 0xa1)) tryUpper(s);
  }
  if (!bestZ.empty()) {
    Vec p = polishOnSphere(Z, upperAt, bestZ, 2000, false);
    tryUpper(p);
  }
  rep.value = {std::min(lower, upper), upper};
  rep.witnessVec = bestZ;
  rep.method = exhaustive ? IndexMethod::BruteForce : IndexMethod::Optimizer;
  rep.notes = lowerNote;
  return rep;
}

}  // namespace

IndexReport abstractIndex(const SpacePtr& Z, const Vec& u, const Budget& budget) {
  return abstractIndexImpl(Z, u, budget, true);
}

IndexReport abstractIndexOptimizer(const SpacePtr& Z, const Vec& u, const Budget& budget) {
  return abstractIndexImpl(Z, u, budget, false);
}

std::optional<double> exactAbstractIndex(const SpacePtr& Z, const Vec& u) {
  constexpr double kInfP = std::numeric_limits<double>::infinity();
  if (Z->dim() == 1) return 1.0;
  const Field f = Z->field();
  if (const auto* lp = std::get_if<LpFam>(&Z->family())) {
    if (lp->p == 1.0) {
      int nz = 0;
      for (int j = 0; j < Z->dim(); ++j)
        if (std::abs(getScalar(u, j, f)) > 1e-12) ++nz;
      return nz <= 1 ? 1.0 : 0.0;  // single-coordinate point of an l1 sum
    }
    if (lp->p == kInfP) {
      bool allUnit = true, someSub = false;
      for (int j = 0; j < Z->dim(); ++j) {
        double m = std::abs(getScalar(u, j, f));
        if (m < 1.0 - 1e-12) allUnit = false;
        if (m < 1.0 - 1e-9) someSub = true;
      }
      if (allUnit) return 1.0;  // spear components in every coordinate
      if (someSub) return 0.0;  // not an extreme point
      return std::nullopt;
    }
    return 0.0;  // strictly convex/smooth ball, dim >= 2: not a vertex
  }
  if (const auto* sf = std::get_if<SumFam>(&Z->family())) {
    const auto* olp = std::get_if<LpFam>(&sf->outer->family());
    if (!olp) return std::nullopt;
    std::vector<double> norms(sf->parts.size());
    for (size_t i = 0; i < sf->parts.size(); ++i)
      norms[i] = sf->parts[i]->norm(sumPart(*sf, u, i));
    if (olp->p == 1.0) {
      int nz = -1;
      for (size_t i = 0; i < norms.size(); ++i)
        if (norms[i] > 1e-12) {
          if (nz >= 0) return 0.0;  // mass on two blocks of an l1 sum
          nz = int(i);
        }
      if (nz < 0) return std::nullopt;
      Vec up = scaleVec(sumPart(*sf, u, size_t(nz)), 1.0 / norms[size_t(nz)]);
      return exactAbstractIndex(sf->parts[size_t(nz)], up);
    }
    if (olp->p == kInfP) {
      for (double n : norms)
        if (n < 1.0 - 1e-9) return 0.0;  // not extreme in the product ball
      for (size_t i = 0; i < norms.size(); ++i) {
        Vec up = scaleVec(sumPart(*sf, u, i), 1.0 / norms[i]);
        auto sub = exactAbstractIndex(sf->parts[i], up);
        if (!sub || *sub < 1.0) return std::nullopt;
      }
      return 1.0;  // linf sum of unit spear components is a spear
    }
  }
  return std::nullopt;
}

namespace {

// Interval-valued abstract index: exact rule if available, else numeric.
Interval abstractIndexInterval(const SpacePtr& Z, const Vec& u, const Budget& budget,
                               std::string* how) {
  if (auto ex = exactAbstractIndex(Z, u)) {
    if (how) *how = "exact";
    return {*ex, *ex};
  }
  IndexReport r = abstractIndex(Z, u, budget);
  if (how) *how = "numeric";
  return r.value;
}

std::optional<std::pair<Vec, Vec>> rankOneFactor(const Operator& G) {
  int m = G.cod->dim(), n = G.dom->dim();
  double scale = 0.0;
  int bi = 0, bj = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(G.at(i, j)) > scale) {
        scale = std::abs(G.at(i, j));
        bi = i;
        bj = j;
      }
  if (scale < 1e-12) return std::nullopt;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar minor = G.at(i, j) * G.at(bi, bj) - G.at(i, bj) * G.at(bi, j);
      if (std::abs(minor) > 1e-10 * scale * scale) return std::nullopt;
    }
  const Field f = G.dom->field();
  Vec y0(G.cod->realDim(), 0.0);
  for (int i = 0; i < m; ++i) setScalar(y0, i, f, G.at(i, bj));
  double yn = G.cod->norm(y0);
  if (yn < 1e-12) return std::nullopt;
  y0 = scaleVec(y0, 1.0 / yn);
  Vec x0(G.dom->realDim(), 0.0);
  Scalar y0bi = getScalar(y0, bi, f);
  for (int j = 0; j < n; ++j) setScalar(x0, j, f, std::conj(G.at(bi, j) / y0bi));
  double dn = G.dom->dualNorm(x0);
  if (std::fabs(dn - 1.0) > 1e-6) return std::nullopt;  // G was not norm-one
  x0 = scaleVec(x0, 1.0 / dn);
  return std::make_pair(x0, y0);
}

// l1/linf block decomposition of a space: declared absolute-sum parts, or
// scalar parts when the space itself is an l1/linf sequence space.
struct BlockView {
  double outerP = 0.0;
  std::vector<SpacePtr> parts;
  std::vector<int> offsets;  // coordinate (not realified) offsets
};

std::optional<BlockView> blockView(const SpacePtr& s) {
  constexpr double kInfP = std::numeric_limits<double>::infinity();
  BlockView bv;
  if (const auto* sf = std::get_if<SumFam>(&s->family())) {
    const auto* olp = std::get_if<LpFam>(&sf->outer->family());
    if (!olp || (olp->p != 1.0 && olp->p != kInfP)) return std::nullopt;
    bv.outerP = olp->p;
    bv.parts = sf->parts;
    int o = 0;
    for (const SpacePtr& p : sf->parts) {
      bv.offsets.push_back(o);
      o += p->dim();
    }
    return bv;
  }
  if (const auto* lp = std::get_if<LpFam>(&s->family())) {
    if ((lp->p != 1.0 && lp->p != kInfP) || s->dim() < 2) return std::nullopt;
    bv.outerP = lp->p;
    for (int j = 0; j < s->dim(); ++j) {
      bv.parts.push_back(Space::makeLp(s->field(), 1, 2.0));
      bv.offsets.push_back(j);
    }
    return bv;
  }
  return std::nullopt;
}

// Block-permutation structure of G between matching l1/linf sums.
std::optional<std::vector<Operator>> blockSplit(const Operator& G) {
  auto dv = blockView(G.dom);
  auto cv = blockView(G.cod);
  if (!dv || !cv || dv->parts.size() != cv->parts.size() || dv->parts.size() < 2)
    return std::nullopt;
  if (dv->outerP != cv->outerP) return std::nullopt;
  size_t nb = dv->parts.size();
  const std::vector<int>& domOff = dv->offsets;
  const std::vector<int>& codOff = cv->offsets;
  auto domBlockOf = [&](int j) {
    for (size_t k = nb; k-- > 0;)
      if (j >= domOff[k]) return int(k);
    return 0;
  };
  auto codBlockOf = [&](int i) {
    for (size_t k = nb; k-- > 0;)
      if (i >= codOff[k]) return int(k);
    return 0;
  };
  std::vector<int> sigma(nb, -1);
  for (int i = 0; i < G.cod->dim(); ++i)
    for (int j = 0; j < G.dom->dim(); ++j) {
      if (std::abs(G.at(i, j)) < 1e-12) continue;
      int db = domBlockOf(j), cb = codBlockOf(i);
      if (sigma[size_t(db)] == -1)
        sigma[size_t(db)] = cb;
      else if (sigma[size_t(db)] != cb)
        return std::nullopt;
    }
  std::vector<bool> used(nb, false);
  for (size_t k = 0; k < nb; ++k) {
    if (sigma[k] < 0 || used[size_t(sigma[k])]) return std::nullopt;
    used[size_t(sigma[k])] = true;
  }
  std::vector<Operator> blocks;
  for (size_t k = 0; k < nb; ++k) {
    int cb = sigma[k];
    Operator B = zeroOp(dv->parts[k], cv->parts[size_t(cb)]);
    for (int i = 0; i < B.cod->dim(); ++i)
      for (int j = 0; j < B.dom->dim(); ++j)
        B.at(i, j) = G.at(codOff[size_t(cb)] + i, domOff[k] + j);
    blocks.push_back(B);
  }
  return blocks;
}

bool isRealEuclid(const SpacePtr& s) {
  const auto* lp = std::get_if<LpFam>(&s->family());
  return s->field() == Field::Real && lp && lp->p == 2.0 && s->dim() >= 2;
}

Operator rotationCertificate(const SpacePtr& s) {
  Operator T = zeroOp(s, s);
  T.at(0, 1) = 1.0;
  T.at(1, 0) = -1.0;
  return T;
}

}  // namespace

std::optional<IndexReport> nIndexStructural(const Operator& G, const Budget& budget) {
  // (1) rank-one: product of the two abstract indices.
  if (auto fac = rankOneFactor(G)) {
    std::string h1, h2;
    Interval a = abstractIndexInterval(G.dom->dual(), fac->first, budget, &h1);
    Interval b = abstractIndexInterval(G.cod, fac->second, budget, &h2);
    IndexReport rep;
    rep.value = {a.lo * b.lo, a.hi * b.hi};
    rep.method = IndexMethod::Structural;
    rep.notes = "rank-one product (" + h1 + " x " + h2 + ")";
    return rep;
  }
  // (2) block structure over matching l1/linf sums: min over blocks.
  if (auto blocks = blockSplit(G)) {
    Budget quick;
    quick.gridDepth = 9;
    bool ok = true;
    Interval acc{kInf, kInf};
    for (const Operator& B : *blocks) {
      if (std::fabs(opNormValue(B, quick) - 1.0) > 1e-4) {
        ok = false;
        break;
      }
      auto sub = nIndexStructural(B, budget);
      if (!sub) {
        ok = false;
        break;
      }
      acc.lo = std::min(acc.lo, sub->value.lo);
      acc.hi = std::min(acc.hi, sub->value.hi);
    }
    if (ok) {
      IndexReport rep;
      rep.value = acc;
      rep.method = IndexMethod::Structural;
      rep.notes = "diagonal blocks over l1/linf sum: min of block indices";
      return rep;
    }
  }
  // (3) known radius-zero family with nonvanishing composition: index 0.
  if (isRealEuclid(G.dom)) {
    Operator T = rotationCertificate(G.dom);
    if (compose(G, T).frob() > 1e-9) {
      IndexReport rep;
      rep.value = {0.0, 0.0};
      rep.witnessOp = T;
      rep.method = IndexMethod::Structural;
      rep.notes = "rotation certificate on the domain (v(T)=0, G o T != 0)";
      return rep;
    }
  }
  if (isRealEuclid(G.cod)) {
    Operator T = rotationCertificate(G.cod);
    if (compose(T, G).frob() > 1e-9) {
      IndexReport rep;
      rep.value = {0.0, 0.0};
      rep.witnessOp = T;
      rep.method = IndexMethod::Structural;
      rep.notes = "rotation certificate on the codomain (v(T)=0, T o G != 0)";
      return rep;
    }
  }
  return std::nullopt;
}

IndexReport nIndexUpper(const Operator& G, const Budget& budget,
                        const std::vector<Operator>& extraStarts) {
  auto obj = [&](const Operator& T) { return quickRadiusUpper(G, T, budget); };
  OpSearchResult r = minimizeOverOperatorSphere(G.dom, G.cod, obj, budget, extraStarts);
  double full = vRadiusDerivative(G, r.best, budget).value.hi;
  IndexReport rep;
  rep.value = {0.0, full};
  rep.witnessOp = r.best;
  rep.method = IndexMethod::Optimizer;
  rep.notes = "operator-sphere descent; lower bound 0 (not certified by sampling)";
  return rep;
}

IndexReport nIndexBruteForce(const Operator& G, double mesh, const Budget& budget) {
  int pd = G.dom->dim() * G.cod->dim() * (G.dom->field() == Field::Complex ? 2 : 1);
  if (pd > 4) throw InputError("nIndexBruteForce needs total real matrix dimension <= 4");
  PairSet ps = alignedPairs(G, 64, budget.seed);
  double minLower = kInf;
  // Keep the candidates with the smallest certified pair lower bound; their
  // refined uppers bound the index from above.
  std::vector<std::pair<double, Operator>> cands;
  auto visit = [&](const Operator& T) {
    double l = ps.xs.empty() ? 0.0 : pairSetLower(ps, T);
    minLower = std::min(minLower, l);
    if (cands.size() < 6) {
      cands.emplace_back(l, T);
      std::sort(cands.begin(), cands.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    } else if (l < cands.back().first) {
      cands.back() = {l, T};
      std::sort(cands.begin(), cands.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  };
  double achieved = operatorSphereSweep(G.dom, G.cod, mesh, visit);
  double lower = ps.xs.empty() ? 0.0 : std::max(0.0, minLower - achieved);
  double upper = kInf;
  Operator bestOp = cands.front().second;
  for (const auto& [l, T] : cands) {
    double u = vRadiusDerivative(G, T, budget).value.hi;
    if (u < upper) {
      upper = u;
      bestOp = T;
    }
  }
  IndexReport rep;
  rep.value = {std::min(lower, upper), upper};
  rep.witnessOp = bestOp;
  rep.method = IndexMethod::BruteForce;
  rep.notes = "operator-sphere covering at opNorm mesh " + std::to_string(achieved) +
              (ps.xs.empty() ? "; no aligned pairs, lower uncertified" : "");
  return rep;
}

IndexReport nIndex(const Operator& G, const Budget& budget) {
  if (auto s = nIndexStructural(G, budget)) return *s;
  return nIndexUpper(G, budget);
}

std::vector<IndexReport> indexValueScan(const SpacePtr& X, const SpacePtr& Y, int sampleCount,
                                        const Budget& budget) {
  std::vector<Operator> gs;
  Budget quick;
  quick.gridDepth = 9;
  quick.seed = budget.seed;
  if (X->dim() == Y->dim()) gs.push_back(identityOp(X));
  // Smooth-point rank-one exhibits 0 for dim >= 2.
  {
    auto xs = X->dual()->sampleSphere(2, budget.seed + 5);
    auto ys = Y->sampleSphere(2, budget.seed + 9);
    gs.push_back(rankOne(X, xs[0], Y, ys[0]));
  }
  std::mt19937_64 rng(budget.seed ^ 0x5ca11ull);
  while (int(gs.size()) < std::max(sampleCount, 3)) {
    Operator T = zeroOp(X, Y);
    for (Scalar& m : T.mat)
      m = X->field() == Field::Complex ? Scalar(gauss(rng), gauss(rng)) : Scalar(gauss(rng));
    try {
      gs.push_back(normalizeOp(T, quick));
    } catch (const ComputeError&) {
    }
  }
  std::vector<IndexReport> out;
  for (const Operator& G : gs) {
    IndexReport r = nIndex(G, budget);
    bool dup = false;
    for (const IndexReport& o : out)
      if (std::fabs(o.value.hi - r.value.hi) < 1e-2) dup = true;
    if (!dup) out.push_back(r);
  }
  std::sort(out.begin(), out.end(),
            [](const IndexReport& a, const IndexReport& b) { return a.value.hi < b.value.hi; });
  return out;
}

AdjointVerdict adjointCompare(const Operator& G, const Budget& budget) {
  AdjointVerdict v;
  auto sG = nIndexStructural(G, budget);
  v.forG = sG ? *sG : nIndexUpper(G, budget);
  Operator Gs = adjoint(G);
  auto sGs = nIndexStructural(Gs, budget);
  if (sGs) {
    v.forAdjoint = *sGs;
  } else {
    std::vector<Operator> seeds;
    if (v.forG.witnessOp) seeds.push_back(adjoint(*v.forG.witnessOp));
    v.forAdjoint = nIndexUpper(Gs, budget, seeds);
  }
  v.inequalityHolds = v.forAdjoint.value.hi <= v.forG.value.hi + 2e-2;
  double widths = v.forG.value.width() + v.forAdjoint.value.width();
  v.equalWithinWidths = std::fabs(v.forG.value.hi - v.forAdjoint.value.hi) <= widths + 2e-2;
  return v;
}

}  // namespace nidx
