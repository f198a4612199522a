#include "nidx/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nidx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool isLp(const SpacePtr& s, double p) {
  const auto* lp = std::get_if<LpFam>(&s->family());
  return lp && lp->p == p;
}
}  // namespace

Vec Operator::apply(const Vec& x) const {
  if (int(x.size()) != dom->realDim()) throw InputError("operator apply: dimension mismatch");
  const Field f = dom->field();
  Vec out(cod->realDim(), 0.0);
  for (int i = 0; i < cod->dim(); ++i) {
    Scalar acc(0.0, 0.0);
    for (int j = 0; j < dom->dim(); ++j) acc += at(i, j) * getScalar(x, j, f);
    setScalar(out, i, cod->field(), acc);
  }
  return out;
}

double Operator::frob() const {
  double s = 0.0;
  for (const Scalar& m : mat) s += std::norm(m);
  return std::sqrt(s);
}

Operator identityOp(const SpacePtr& X) {
  Operator G{X, X, std::vector<Scalar>(size_t(X->dim()) * X->dim(), Scalar(0.0))};
  for (int i = 0; i < X->dim(); ++i) G.at(i, i) = 1.0;
  return G;
}

Operator zeroOp(const SpacePtr& X, const SpacePtr& Y) {
  return Operator{X, Y, std::vector<Scalar>(size_t(Y->dim()) * X->dim(), Scalar(0.0))};
}

Operator adjoint(const Operator& G) {
  Operator A{G.cod->dual(), G.dom->dual(),
             std::vector<Scalar>(size_t(G.dom->dim()) * G.cod->dim(), Scalar(0.0))};
  for (int i = 0; i < G.cod->dim(); ++i)
    for (int j = 0; j < G.dom->dim(); ++j) A.at(j, i) = std::conj(G.at(i, j));
  return A;
}

Operator rankOne(const SpacePtr& X, const Vec& x0star, const SpacePtr& Y, const Vec& y0) {
  double dn = X->dualNorm(x0star);
  double yn = Y->norm(y0);
  if (std::fabs(dn - 1.0) > 1e-8 || std::fabs(yn - 1.0) > 1e-8)
    throw InputError("rankOne requires unit functional and unit vector (got " +
                     std::to_string(dn) + ", " + std::to_string(yn) + ")");
  Operator G{X, Y, std::vector<Scalar>(size_t(Y->dim()) * X->dim(), Scalar(0.0))};
  const Field f = X->field();
  for (int i = 0; i < Y->dim(); ++i)
    for (int j = 0; j < X->dim(); ++j)
      G.at(i, j) = getScalar(y0, i, f) * std::conj(getScalar(x0star, j, f));
  return G;
}

Operator diagSum(const std::vector<Operator>& ops, double outerP) {
  if (ops.empty()) throw InputError("diagSum needs at least one operator");
  if (outerP != 1.0 && outerP != kInf) throw InputError("diagSum outer must be l1 or linf");
  Field f = ops[0].dom->field();
  std::vector<SpacePtr> doms, cods;
  for (const auto& op : ops) {
    if (op.dom->field() != f || op.cod->field() != f)
      throw InputError("diagSum: mixed scalar fields");
    doms.push_back(op.dom);
    cods.push_back(op.cod);
  }
  Budget quick;
  quick.gridDepth = 9;
  for (const auto& op : ops)
    if (std::fabs(opNormValue(op, quick) - 1.0) > 1e-4)
      throw InputError("diagSum blocks must be norm-one");
  auto outer = Space::makeLp(Field::Real, int(ops.size()), outerP);
  SpacePtr X = Space::makeAbsoluteSum(outer, doms);
  SpacePtr Y = Space::makeAbsoluteSum(outer, cods);
  Operator G = zeroOp(X, Y);
  int ro = 0, co = 0;
  for (const auto& op : ops) {
    for (int i = 0; i < op.cod->dim(); ++i)
      for (int j = 0; j < op.dom->dim(); ++j) G.at(ro + i, co + j) = op.at(i, j);
    ro += op.cod->dim();
    co += op.dom->dim();
  }
  return G;
}

Operator compose(const Operator& G2, const Operator& G1) {
  if (G2.dom->dim() != G1.cod->dim() || G2.dom->field() != G1.cod->field())
    throw InputError("compose: dimension/field mismatch");
  Operator G = zeroOp(G1.dom, G2.cod);
  for (int i = 0; i < G2.cod->dim(); ++i)
    for (int j = 0; j < G1.dom->dim(); ++j) {
      Scalar acc(0.0);
      for (int k = 0; k < G2.dom->dim(); ++k) acc += G2.at(i, k) * G1.at(k, j);
      G.at(i, j) = acc;
    }
  return G;
}

Operator scaleOp(const Operator& G, Scalar s) {
  Operator out = G;
  for (Scalar& m : out.mat) m *= s;
  return out;
}

Operator addOp(const Operator& G, const Operator& T) {
  Operator out = G;
  for (size_t i = 0; i < out.mat.size(); ++i) out.mat[i] += T.mat[i];
  return out;
}

Operator extendDomainInfty(const Operator& G, const SpacePtr& Z) {
  auto outer = Space::makeLp(Field::Real, 2, kInf);
  SpacePtr X = Space::makeAbsoluteSum(outer, {G.dom, Z});
  Operator out = zeroOp(X, G.cod);
  for (int i = 0; i < G.cod->dim(); ++i)
    for (int j = 0; j < G.dom->dim(); ++j) out.at(i, j) = G.at(i, j);
  return out;
}

Operator extendCodomainOne(const Operator& G, const SpacePtr& Z) {
  auto outer = Space::makeLp(Field::Real, 2, 1.0);
  SpacePtr Y = Space::makeAbsoluteSum(outer, {G.cod, Z});
  Operator out = zeroOp(G.dom, Y);
  for (int i = 0; i < G.cod->dim(); ++i)
    for (int j = 0; j < G.dom->dim(); ++j) out.at(i, j) = G.at(i, j);
  return out;
}

namespace {

// Largest singular value of a d<=2 matrix between Euclidean spaces, closed form.
std::optional<double> euclidTopSingular(const Operator& G) {
  if (!isLp(G.dom, 2.0) || !isLp(G.cod, 2.0)) return std::nullopt;
  int m = G.cod->dim(), n = G.dom->dim();
  if (n > 2 || m > 2) return std::nullopt;
  // B = G^H G, Hermitian n x n.
  Scalar B[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Scalar acc(0.0);
      for (int i = 0; i < m; ++i) acc += std::conj(G.at(i, a)) * G.at(i, b);
      B[a][b] = acc;
    }
  double lmax;
  if (n == 1) {
    lmax = B[0][0].real();
  } else {
    double tr = B[0][0].real() + B[1][1].real();
    double det = (B[0][0] * B[1][1] - B[0][1] * B[1][0]).real();
    double disc = std::max(0.0, tr * tr - 4.0 * det);
    lmax = 0.5 * (tr + std::sqrt(disc));
  }
  return std::sqrt(std::max(0.0, lmax));
}

}  // namespace

OpNormResult opNorm(const Operator& G, const Budget& budget) {
  OpNormResult r;
  if (auto sv = euclidTopSingular(G)) {
    double v = *sv;
    r.iv = {v - 1e-12 * std::max(1.0, v), v + 1e-12 * std::max(1.0, v)};
    r.iv.lo = std::max(0.0, r.iv.lo);
    r.certified = true;
    return r;
  }
  const auto& ext = G.dom->extremePoints();
  if (!ext.empty()) {
    // Convex objective: the sup over the ball is attained at an extreme point.
    double best = 0.0;
    for (const Vec& e : ext) {
      double v = G.cod->norm(G.apply(e));
      if (v > best) {
        best = v;
        r.argmax = e;
      }
    }
    r.iv = {best, best + 1e-12 * std::max(1.0, best)};
    r.certified = true;
    return r;
  }
  auto obj = [&](const Vec& x) { return G.cod->norm(G.apply(x)); };
  if (G.dom->realDim() <= 3) {
    double mesh = 0.0;
    sphereGrid(G.dom, budget.gridDepth, &mesh);
    OptResult opt = maximizeOnSphere(G.dom, obj, budget, 1.0);
    double denom = 1.0 - mesh;
    double hi = denom > 0.1 ? opt.value / denom : opt.value * 10.0;
    r.iv = {opt.value, hi};
    r.certified = true;
    r.argmax = opt.argmax;
    return r;
  }
  OptResult opt = maximizeOnSphere(G.dom, obj, budget, 0.0);
  r.iv = {opt.value, opt.value};
  r.certified = false;
  r.argmax = opt.argmax;
  return r;
}

double opNormValue(const Operator& G, const Budget& budget) { return opNorm(G, budget).iv.lo; }

Operator normalizeOp(const Operator& G, const Budget& budget) {
  double n = opNormValue(G, budget);
  if (n < 1e-9) throw ComputeError("normalizeOp: operator norm below 1e-9");
  return scaleOp(G, 1.0 / n);
}

namespace {

int paramDim(const SpacePtr& X, const SpacePtr& Y) {
  int pd = X->dim() * Y->dim();
  return X->field() == Field::Complex ? 2 * pd : pd;
}

Operator paramsToOp(const SpacePtr& X, const SpacePtr& Y, const Vec& params) {
  Operator T = zeroOp(X, Y);
  const bool cx = X->field() == Field::Complex;
  size_t k = 0;
  for (int i = 0; i < Y->dim(); ++i)
    for (int j = 0; j < X->dim(); ++j) {
      if (cx) {
        T.at(i, j) = Scalar(params[k], params[k + 1]);
        k += 2;
      } else {
        T.at(i, j) = params[k++];
      }
    }
  return T;
}

Vec opToParams(const Operator& T) {
  const bool cx = T.dom->field() == Field::Complex;
  Vec params;
  for (int i = 0; i < T.cod->dim(); ++i)
    for (int j = 0; j < T.dom->dim(); ++j) {
      params.push_back(T.at(i, j).real());
      if (cx) params.push_back(T.at(i, j).imag());
    }
  return params;
}

double u01op(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

double gaussOp(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = u01op(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u01op(rng));
}

double euclidOp(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

OpSearchResult minimizeOverOperatorSphere(const SpacePtr& X, const SpacePtr& Y,
                                          const std::function<double(const Operator&)>& obj,
                                          const Budget& budget,
                                          const std::vector<Operator>& extraStarts) {
  const int pd = paramDim(X, Y);
  Budget quick;
  quick.starts = X->realDim() <= 3 ? 0 : 4;
  quick.iterations = 80;
  quick.gridDepth = 8;
  quick.seed = budget.seed ^ 0x5151;
  auto normEval = [&](const Vec& params) -> std::optional<std::pair<Operator, double>> {
    Operator T = paramsToOp(X, Y, params);
    double nn = opNormValue(T, quick);
    if (nn < 1e-9) return std::nullopt;
    Operator Tn = scaleOp(T, 1.0 / nn);
    double v = obj(Tn);
    if (!std::isfinite(v)) throw ComputeError("non-finite objective in operator sphere search");
    return std::make_pair(Tn, v);
  };
  std::vector<Vec> starts;
  for (const Operator& S : extraStarts) starts.push_back(opToParams(S));
  for (int k = 0; k < pd; ++k) {
    Vec e(pd, 0.0);
    e[k] = 1.0;
    starts.push_back(e);
  }
  if (X->dim() == Y->dim()) starts.push_back(opToParams(identityOp(X)));
  {
    const auto& de = X->dual()->extremePoints();
    const auto& ce = Y->extremePoints();
    int emitted = 0;
    for (size_t a = 0; a < de.size() && emitted < 12; ++a)
      for (size_t b = 0; b < ce.size() && emitted < 12; ++b, ++emitted) {
        Operator R = zeroOp(X, Y);
        const Field f = X->field();
        for (int i = 0; i < Y->dim(); ++i)
          for (int j = 0; j < X->dim(); ++j)
            R.at(i, j) = getScalar(ce[b], i, f) * std::conj(getScalar(de[a], j, f));
        starts.push_back(opToParams(R));
      }
  }
  std::mt19937_64 rng(budget.seed ^ 0x0b5e55edull);
  for (int s = 0; s < budget.starts; ++s) {
    Vec p(pd);
    for (double& v : p) v = gaussOp(rng);
    starts.push_back(p);
  }
  std::optional<OpSearchResult> best;
  for (Vec p : starts) {
    double e = euclidOp(p);
    if (e < 1e-12) continue;
    for (double& v : p) v /= e;
    auto cur = normEval(p);
    if (!cur) continue;
    double curVal = cur->second;
    Operator curOp = cur->first;
    double step = 0.3;
    int it = 0;
    while (step > 1e-7 && it < budget.iterations) {
      bool improved = false;
      for (int i = 0; i < pd && it < budget.iterations; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec q = p;
          q[i] += sgn * step;
          double qe = euclidOp(q);
          if (qe < 1e-12) continue;
          for (double& v : q) v /= qe;
          ++it;
          auto cand = normEval(q);
          if (cand && cand->second < curVal - 1e-12) {
            curVal = cand->second;
            curOp = cand->first;
            p = q;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (!best || curVal < best->value - 1e-15) best = OpSearchResult{curOp, curVal};
  }
  if (!best) throw ComputeError("operator sphere search found no valid proposal");
  return *best;
}

double operatorSphereSweep(const SpacePtr& X, const SpacePtr& Y, double mesh,
                           const std::function<void(const Operator&)>& visit) {
  const int pd = paramDim(X, Y);
  if (pd > 4)
    throw InputError("operator sphere sweep needs total real matrix dimension <= 4");
  Budget quick;
  quick.starts = 0;
  quick.iterations = 60;
  quick.gridDepth = 8;
  // Lipschitz bound of the parameters -> operator map.
  double C2 = 0.0;
  for (int k = 0; k < pd; ++k) {
    Vec e(pd, 0.0);
    e[k] = 1.0;
    C2 += std::pow(opNorm(paramsToOp(X, Y, e), quick).iv.hi, 2);
  }
  const double C = std::sqrt(C2);
  auto forGrid = [&](double step, const std::function<void(const Vec&)>& f) {
    if (pd == 1) {
      f(Vec{1.0});
      f(Vec{-1.0});
      return;
    }
    if (pd == 2) {
      int N = std::max(8, int(std::ceil(2.0 * M_PI / step)));
      for (int k = 0; k < N; ++k) {
        double a = 2.0 * M_PI * k / N;
        f(Vec{std::cos(a), std::sin(a)});
      }
      return;
    }
    if (pd == 3) {
      int NA = std::max(4, int(std::ceil(M_PI / step)));
      int NB = std::max(8, int(std::ceil(2.0 * M_PI / step)));
      for (int i = 0; i <= NA; ++i) {
        double a = M_PI * i / NA;
        for (int k = 0; k < NB; ++k) {
          double b = 2.0 * M_PI * k / NB;
          f(Vec{std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b)});
        }
      }
      return;
    }
    int NA = std::max(4, int(std::ceil(M_PI / step)));
    int NB = NA;
    int NC = std::max(8, int(std::ceil(2.0 * M_PI / step)));
    for (int i = 0; i <= NA; ++i) {
      double a = M_PI * i / NA;
      for (int j = 0; j <= NB; ++j) {
        double b = M_PI * j / NB;
        for (int k = 0; k < NC; ++k) {
          double c = 2.0 * M_PI * k / NC;
          f(Vec{std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b) * std::cos(c),
                std::sin(a) * std::sin(b) * std::sin(c)});
        }
      }
    }
  };
  // Pass 1: rigorous lower bound on opNorm over the Euclidean parameter sphere.
  double coarseStep = 0.15;
  double minNorm = std::numeric_limits<double>::infinity();
  forGrid(coarseStep, [&](const Vec& p) {
    minNorm = std::min(minNorm, opNormValue(paramsToOp(X, Y, p), quick));
  });
  double eCoarse = coarseStep * std::sqrt(double(std::max(1, pd - 1))) * 0.5;
  double minNormLower = minNorm - C * eCoarse;
  if (minNormLower < 0.05)
    throw ComputeError("operator sphere sweep: parameter-to-norm conditioning too poor");
  // Pass 2: fine sweep sized for the requested opNorm covering radius.
  double eNeeded = mesh * minNormLower / (2.0 * C);
  double step = 2.0 * eNeeded / std::sqrt(double(std::max(1, pd - 1)));
  double eActual = step * std::sqrt(double(std::max(1, pd - 1))) * 0.5;
  forGrid(step, [&](const Vec& p) {
    Operator T = paramsToOp(X, Y, p);
    double nn = opNormValue(T, quick);
    if (nn < 1e-9) return;
    visit(scaleOp(T, 1.0 / nn));
  });
  return 2.0 * C * eActual / minNormLower;
}

}  // namespace nidx
