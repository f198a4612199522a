#include "nidx/numrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nidx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Budget quickOpBudget(const SpacePtr& dom, uint64_t seed) {
  Budget b;
  b.starts = dom->realDim() <= 3 ? 0 : 4;
  b.iterations = 80;
  b.gridDepth = 8;
  b.seed = seed;
  return b;
}

std::vector<Scalar> thetaList(Field f, int count) {
  if (f == Field::Real) return {Scalar(1.0), Scalar(-1.0)};
  std::vector<Scalar> out;
  for (int k = 0; k < count; ++k) {
    double a = 2.0 * M_PI * k / count;
    out.emplace_back(std::cos(a), std::sin(a));
  }
  return out;
}

void requireSamePair(const Operator& G, const Operator& T) {
  if (G.dom != T.dom || G.cod != T.cod)
    throw InputError("base operator and direction must share domain and codomain spaces");
}

void requireNormOne(const Operator& G, const Budget& budget) {
  double n = opNormValue(G, budget);
  if (std::fabs(n - 1.0) > 1e-6)
    throw InputError("operator must be normalized to norm one (got " + std::to_string(n) + ")");
}

double normGPlus(const Operator& G, const Operator& T, double alpha, Scalar theta,
                 const Budget& quick) {
  return opNormValue(addOp(G, scaleOp(T, alpha * theta)), quick);
}

// g(alpha) maximized over theta; complex case refines the circle grid by
// golden section around the best point.
double gMaxTheta(const Operator& G, const Operator& T, double alpha, int thetaCount,
                 bool refine, const Budget& quick) {
  const Field f = G.dom->field();
  auto g = [&](Scalar th) { return (normGPlus(G, T, alpha, th, quick) - 1.0) / alpha; };
  if (f == Field::Real) return std::max(g(Scalar(1.0)), g(Scalar(-1.0)));
  double bestVal = -kInf;
  double bestAng = 0.0;
  for (int k = 0; k < thetaCount; ++k) {
    double a = 2.0 * M_PI * k / thetaCount;
    double v = g(Scalar(std::cos(a), std::sin(a)));
    if (v > bestVal) {
      bestVal = v;
      bestAng = a;
    }
  }
  if (refine) {
    double lo = bestAng - 2.0 * M_PI / thetaCount;
    double hi = bestAng + 2.0 * M_PI / thetaCount;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = g(Scalar(std::cos(c), std::sin(c)));
    double fd = g(Scalar(std::cos(d), std::sin(d)));
    for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = g(Scalar(std::cos(c), std::sin(c)));
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = g(Scalar(std::cos(d), std::sin(d)));
      }
    }
    bestVal = std::max({bestVal, fc, fd});
  }
  return bestVal;
}

}  // namespace

PairSet alignedPairs(const Operator& G, int pairCount, uint64_t seed) {
  const SpacePtr& dom = G.dom;
  const SpacePtr& cod = G.cod;
  PairSet ps;
  std::vector<Vec> candidates;
  if (dom->realDim() <= 3) {
    double mesh = 0.0;
    candidates = sphereGrid(dom, 10, &mesh);
  } else {
    candidates = dom->sampleSphere(std::max(64, pairCount), seed);
  }
  auto gnorm = [&](const Vec& x) { return cod->norm(G.apply(x)); };
  std::vector<Vec> attaining;
  std::vector<std::pair<double, Vec>> ranked;
  for (const Vec& x : candidates) ranked.emplace_back(gnorm(x), x);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [v, x] : ranked) {
    if (v >= 1.0 - 1e-9) attaining.push_back(x);
    if (int(attaining.size()) >= pairCount) break;
  }
  if (attaining.empty()) {
    // Polish the top candidates toward the norm-attaining set.
    size_t polishCount = std::min<size_t>(ranked.size(), 48);
    for (size_t i = 0; i < polishCount; ++i) {
      Vec p = polishOnSphere(dom, gnorm, ranked[i].second, 400, true);
      if (gnorm(p) >= 1.0 - 1e-9) {
        bool dup = false;
        for (const Vec& q : attaining)
          if (maxAbsDiff(p, q) < 1e-7) dup = true;
        if (!dup) attaining.push_back(p);
      }
    }
  }
  // Keep an even spread when there are more attaining directions than pairs.
  int facesPer = 2;
  size_t wantX = std::max<size_t>(1, size_t(pairCount) / facesPer);
  size_t stride = std::max<size_t>(1, attaining.size() / wantX);
  for (size_t i = 0; i < attaining.size(); i += stride) {
    const Vec& x = attaining[i];
    Vec gx = G.apply(x);
    double gn = cod->norm(gx);
    if (gn < 1e-12) continue;
    Vec gxh = scaleVec(gx, 1.0 / gn);
    std::vector<Vec> faces;
    try {
      faces = cod->faceSample(gxh, 0.0, facesPer, seed + 13 * i + 1);
    } catch (const InputError&) {
      continue;
    }
    for (const Vec& y : faces) {
      ps.xs.push_back(x);
      ps.ystars.push_back(y);
      if (int(ps.xs.size()) >= pairCount) return ps;
    }
  }
  return ps;
}

double pairSetLower(const PairSet& ps, const Operator& T, std::pair<Vec, Vec>* best) {
  double m = 0.0;
  const Field f = T.cod->field();
  for (size_t i = 0; i < ps.xs.size(); ++i) {
    double v = std::abs(pairing(ps.ystars[i], T.apply(ps.xs[i]), f));
    if (v > m) {
      m = v;
      if (best) *best = {ps.xs[i], ps.ystars[i]};
    }
  }
  return m;
}

RadiusEstimate alignedPairLower(const Operator& G, const Operator& T, int pairCount,
                                uint64_t seed) {
  requireSamePair(G, T);
  RadiusEstimate est;
  est.method = RadiusMethod::AlignedPairs;
  PairSet ps = alignedPairs(G, pairCount, seed);
  if (ps.xs.empty()) {
    est.value = {0.0, kInf};
    est.lowerCertified = false;
    return est;
  }
  std::pair<Vec, Vec> best{ps.xs[0], ps.ystars[0]};  // pairSetLower only replaces on improvement
  double lower = pairSetLower(ps, T, &best);
  // Local refinement of the best pair within the norm-attaining set.
  const SpacePtr& dom = G.dom;
  const SpacePtr& cod = G.cod;
  const Field f = cod->field();
  Vec x = best.first;
  Vec ystar = best.second;
  double step = 0.05;
  int it = 0;
  while (step > 1e-11 && it < 400) {
    bool improved = false;
    for (int i = 0; i < dom->realDim() && it < 400; ++i) {
      for (double sgn : {1.0, -1.0}) {
        ++it;
        Vec y = x;
        y[i] += sgn * step;
        double n = dom->norm(y);
        if (n < 1e-12) continue;
        for (double& v : y) v /= n;
        Vec gy = G.apply(y);
        double gn = cod->norm(gy);
        if (gn < 1.0 - 1e-9) continue;
        std::vector<Vec> faces;
        try {
          faces = cod->faceSample(scaleVec(gy, 1.0 / gn), 0.0, 2, seed + it);
        } catch (const InputError&) {
          continue;
        }
        for (const Vec& yf : faces) {
          double v = std::abs(pairing(yf, T.apply(y), f));
          if (v > lower + 1e-14) {
            lower = v;
            x = y;
            ystar = yf;
            improved = true;
          }
        }
        if (improved) break;
      }
      if (improved) break;
    }
    if (!improved) step *= 0.5;
  }
  est.value = {lower, kInf};
  est.witnessPair = std::make_pair(x, ystar);
  est.lowerCertified = true;
  return est;
}

double vDelta(const Operator& G, const Operator& T, double delta, const Budget& budget) {
  requireSamePair(G, T);
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("vDelta needs delta in (0,1]");
  requireNormOne(G, quickOpBudget(G.dom, budget.seed));
  const SpacePtr& dom = G.dom;
  const SpacePtr& cod = G.cod;
  const Field f = cod->field();
  long feasibleCount = 0;
  auto inner = [&](const Vec& x) -> double {
    Vec gx = G.apply(x);
    double gn = cod->norm(gx);
    if (gn <= 1.0 - delta) return 0.0;
    Vec gxh = scaleVec(gx, 1.0 / gn);
    double deltaEff = std::max(0.0, 1.0 - (1.0 - delta) / gn);
    std::vector<Vec> cands;
    try {
      cands = cod->faceSample(gxh, deltaEff, 6, budget.seed + 17);
    } catch (const InputError&) {
      return 0.0;
    }
    double bestHere = 0.0;
    bool any = false;
    for (const Vec& y : cands) {
      if (pairing(y, gx, f).real() > 1.0 - delta) {
        any = true;
        bestHere = std::max(bestHere, std::abs(pairing(y, T.apply(x), f)));
      }
    }
    if (any) ++feasibleCount;
    return bestHere;
  };
  OptResult r = maximizeOnSphere(dom, inner, budget);
  // Exactly aligned points stay feasible at any delta; without them the random
  // multistart can miss the shrinking feasible set entirely for small delta.
  double best = r.value;
  PairSet ps = alignedPairs(G, 64, budget.seed + 23);
  for (const Vec& x : ps.xs) best = std::max(best, inner(x));
  if (feasibleCount == 0)
    throw ComputeError("vDelta: no feasible pair found (delta too small for this budget)");
  return best;
}

RadiusEstimate vRadiusDerivative(const Operator& G, const Operator& T, const Budget& budget) {
  requireSamePair(G, T);
  Budget quick = quickOpBudget(G.dom, budget.seed);
  requireNormOne(G, quick);
  const double alphas[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  double upper = kInf;
  double prev = kInf;
  for (double alpha : alphas) {
    double probe = normGPlus(G, T, alpha, Scalar(1.0), quick) - 1.0;
    if (std::fabs(probe) < 1e-13 && alpha < 1e-1) break;  // float granularity reached
    double m = gMaxTheta(G, T, alpha, 256, true, quick);
    upper = std::min(upper, m);
    if (std::fabs(prev - m) < 1e-7) break;
    prev = m;
  }
  if (upper == kInf) upper = gMaxTheta(G, T, 1e-1, 256, true, quick);
  upper = std::max(0.0, upper);
  RadiusEstimate lower = alignedPairLower(G, T, 256, budget.seed);
  RadiusEstimate est;
  est.method = RadiusMethod::Derivative;
  est.value = {std::min(lower.value.lo, upper), upper};
  est.witnessPair = lower.witnessPair;
  est.lowerCertified = lower.lowerCertified;
  return est;
}

double quickRadiusUpper(const Operator& G, const Operator& T, const Budget& budget) {
  Budget quick = quickOpBudget(G.dom, budget.seed);
  double u = kInf;
  for (double alpha : {3e-2, 1e-3})
    u = std::min(u, gMaxTheta(G, T, alpha, 32, false, quick));
  return std::max(0.0, u);
}

double maxThetaNormUpper(const Operator& G, const Operator& T, const Budget& budget) {
  Budget quick = quickOpBudget(G.dom, budget.seed);
  const Field f = G.dom->field();
  if (f == Field::Real) {
    double m = 0.0;
    for (double s : {1.0, -1.0}) m = std::max(m, opNorm(addOp(G, scaleOp(T, s)), quick).iv.hi);
    return m;
  }
  const int N = 256;
  double m = 0.0;
  for (const Scalar& th : thetaList(f, N))
    m = std::max(m, opNorm(addOp(G, scaleOp(T, th)), quick).iv.hi);
  // Lipschitz-in-theta slack covers the continuum between grid points.
  double tNorm = opNorm(T, quick).iv.hi;
  return m + (M_PI / N) * tNorm;
}

RadiusEstimate vRadius(const Operator& G, const Operator& T, const Budget& budget) {
  RadiusEstimate d = vRadiusDerivative(G, T, budget);
  double upper = d.value.hi;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    try {
      upper = std::min(upper, vDelta(G, T, delta, budget));
    } catch (const ComputeError&) {
      break;  // smaller deltas will be infeasible too
    }
  }
  double lower = d.value.lo;
  if (lower > upper + 1e-6)
    throw ComputeError("vRadius bound inversion: lower " + std::to_string(lower) + " > upper " +
                       std::to_string(upper) + " (optimizer under-budget)");
  RadiusEstimate est;
  est.method = RadiusMethod::Combined;
  est.value = {std::min(lower, upper), upper};
  est.witnessPair = d.witnessPair;
  est.lowerCertified = d.lowerCertified;
  return est;
}

RangeCloud rangeCloud(const Operator& G, const Operator& T, double delta, int count,
                      uint64_t seed) {
  requireSamePair(G, T);
  if (!(delta > 0.0)) throw InputError("rangeCloud needs delta > 0");
  const SpacePtr& dom = G.dom;
  const SpacePtr& cod = G.cod;
  const Field f = cod->field();
  RangeCloud c;
  c.delta = delta;
  c.samples = count;
  auto xs = dom->sampleSphere(count, seed);
  for (size_t i = 0; i < xs.size(); ++i) {
    const Vec& x = xs[i];
    Vec gx = G.apply(x);
    double gn = cod->norm(gx);
    if (gn <= 1.0 - delta) continue;
    double deltaEff = std::max(0.0, 1.0 - (1.0 - delta) / gn);
    std::vector<Vec> faces;
    try {
      faces = cod->faceSample(scaleVec(gx, 1.0 / gn), deltaEff, 2, seed + 7 * i + 3);
    } catch (const InputError&) {
      continue;
    }
    for (const Vec& y : faces) {
      if (pairing(y, gx, f).real() <= 1.0 - delta) continue;
      Scalar p = pairing(y, T.apply(x), f);
      c.points.push_back(p);
      c.xs.push_back(x);
      c.ystars.push_back(y);
      c.hullRadius = std::max(c.hullRadius, std::abs(p));
    }
  }
  return c;
}

SpearProbeResult spearProbe(const Operator& G, int trials, const Budget& budget) {
  Budget b = budget;
  b.starts = std::max(budget.starts, trials);
  auto obj = [&](const Operator& T) {
    // deficit proxy: max_theta ||G + theta T|| with ||T||=1 wants to reach 2
    return gMaxTheta(G, T, 1.0, 64, false, quickOpBudget(G.dom, budget.seed)) + 1.0;
  };
  OpSearchResult r = minimizeOverOperatorSphere(G.dom, G.cod, obj, b);
  double certMax = maxThetaNormUpper(G, r.best, budget);
  Budget quick = quickOpBudget(G.dom, budget.seed);
  double tLower = opNorm(r.best, quick).iv.lo;
  SpearProbeResult out;
  out.deficit = certMax - 1.0 - tLower;
  if (out.deficit < -1e-4) {
    out.refuted = true;
    out.witness = r.best;
  }
  return out;
}

std::optional<Operator> nullDirectionSearch(const Operator& G, const Budget& budget) {
  auto obj = [&](const Operator& T) { return quickRadiusUpper(G, T, budget); };
  OpSearchResult r = minimizeOverOperatorSphere(G.dom, G.cod, obj, budget);
  double full = vRadiusDerivative(G, r.best, budget).value.hi;
  if (full < 1e-3) return r.best;
  return std::nullopt;
}

std::string rangeCloudCsv(const RangeCloud& c) {
  std::string out = "re,im";
  int xd = c.xs.empty() ? 0 : int(c.xs[0].size());
  int yd = c.ystars.empty() ? 0 : int(c.ystars[0].size());
  char buf[64];
  for (int j = 0; j < xd; ++j) {
    std::snprintf(buf, sizeof buf, ",x%d", j);
    out += buf;
  }
  for (int j = 0; j < yd; ++j) {
    std::snprintf(buf, sizeof buf, ",ystar%d", j);
    out += buf;
  }
  out += "\n";
  for (size_t i = 0; i < c.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", c.points[i].real(), c.points[i].imag());
    out += buf;
    for (double v : c.xs[i]) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      out += buf;
    }
    for (double v : c.ystars[i]) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace nidx
