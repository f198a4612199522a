#include "nidx/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <random>

namespace nidx {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

Scalar pairing(const Vec& f, const Vec& x, Field field) {
  Scalar acc(0.0, 0.0);
  if (field == Field::Complex) {
    const size_t d = f.size() / 2;
    for (size_t j = 0; j < d; ++j) {
      Scalar fj(f[2 * j], f[2 * j + 1]);
      Scalar xj(x[2 * j], x[2 * j + 1]);
      acc += std::conj(fj) * xj;
    }
  } else {
    double s = 0.0;
    for (size_t j = 0; j < f.size(); ++j) s += f[j] * x[j];
    acc = s;
  }
  return acc;
}

Vec scaleVec(const Vec& v, double s) {
  Vec out(v);
  for (double& x : out) x *= s;
  return out;
}

Vec addVec(const Vec& a, const Vec& b) {
  Vec out(a);
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Vec subVec(const Vec& a, const Vec& b) {
  Vec out(a);
  for (size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

double maxAbsDiff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

Vec axpyTheta(const Vec& x, double alpha, Scalar theta, const Vec& z, Field field) {
  Vec out(x);
  if (field == Field::Complex) {
    const size_t d = x.size() / 2;
    for (size_t j = 0; j < d; ++j) {
      Scalar zj(z[2 * j], z[2 * j + 1]);
      Scalar add = alpha * theta * zj;
      out[2 * j] += add.real();
      out[2 * j + 1] += add.imag();
    }
  } else {
    for (size_t j = 0; j < x.size(); ++j) out[j] += alpha * theta.real() * z[j];
  }
  return out;
}

uint64_t hashDoubles(const double* d, size_t n, uint64_t seed) {
  uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
  for (size_t i = 0; i < n; ++i) {
    uint64_t bits;
    static_assert(sizeof(double) == sizeof(uint64_t));
    std::memcpy(&bits, &d[i], sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
  }
  return h;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double u01(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

double gauss(std::mt19937_64& rng) {
  // Box-Muller, self-contained for cross-library determinism.
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = u01(rng);
  double u2 = u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double euclid(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct DualMemo {
  std::mutex mu;
  std::map<uint64_t, double> cache;
};

// sup over the unit sphere of `inner` of |<f, x>|, self-contained so the
// space module does not depend on the optimizer.
double supPairingOnSphere(const Space& inner, const Vec& f) {
  const int rd = inner.realDim();
  const Field field = inner.field();
  auto score = [&](Vec x) -> std::pair<double, Vec> {
    double n = inner.norm(x);
    if (n <= 1e-300) return {0.0, x};
    for (double& v : x) v /= n;
    return {std::abs(pairing(f, x, field)), x};
  };
  double best = 0.0;
  Vec bestArg;
  auto consider = [&](const Vec& x) {
    auto [v, xs] = score(x);
    if (v > best) {
      best = v;
      bestArg = xs;
    }
  };
  if (rd == 1) {
    consider(Vec{1.0});
  } else if (rd == 2) {
    const int N = 1024;
    for (int k = 0; k < N; ++k) {
      double a = 2.0 * M_PI * k / N;
      consider(Vec{std::cos(a), std::sin(a)});
    }
  } else if (rd == 3) {
    const int NP = 72, NA = 144;
    for (int i = 0; i <= NP; ++i) {
      double ph = M_PI * i / NP;
      for (int k = 0; k < NA; ++k) {
        double a = 2.0 * M_PI * k / NA;
        consider(Vec{std::sin(ph) * std::cos(a), std::sin(ph) * std::sin(a), std::cos(ph)});
      }
    }
  } else {
    std::mt19937_64 rng(hashDoubles(f.data(), f.size(), 77));
    for (int s = 0; s < 48; ++s) {
      Vec x(rd);
      for (double& v : x) v = gauss(rng);
      consider(x);
    }
  }
  if (bestArg.empty()) return 0.0;
  // Pattern-search polish on the sphere.
  Vec x = bestArg;
  double step = 0.2;
  double cur = best;
  while (step > 1e-13) {
    bool improved = false;
    for (int i = 0; i < rd; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vec y = x;
        y[i] += sgn * step;
        auto [v, ys] = score(y);
        if (v > cur + 1e-16) {
          cur = v;
          x = ys;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return cur;
}

int baseDim(Field f, const Vec& v) { return f == Field::Complex ? int(v.size()) / 2 : int(v.size()); }

// Andrew monotone chain, returns hull vertices in counterclockwise order.
std::vector<Vec> convexHull2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) {
                          return std::fabs(a[0] - b[0]) < 1e-12 && std::fabs(a[1] - b[1]) < 1e-12;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> hull;
  for (int pass = 0; pass < 2; ++pass) {
    size_t startSize = hull.size();
    for (const Vec& p : pts) {
      while (hull.size() >= startSize + 2 &&
             cross(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 1e-14)
        hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  return hull;
}

// Facet normals a of a symmetric polygon: <a, v_k> = <a, v_{k+1}> = 1 per edge.
std::vector<Vec> polygonFacetNormals(const std::vector<Vec>& hull) {
  std::vector<Vec> normals;
  for (size_t k = 0; k < hull.size(); ++k) {
    const Vec& v = hull[k];
    const Vec& w = hull[(k + 1) % hull.size()];
    double det = v[0] * w[1] - v[1] * w[0];
    if (std::fabs(det) < 1e-12) continue;
    Vec a{(w[1] - v[1]) / det, (v[0] - w[0]) / det};
    bool dup = false;
    for (const Vec& b : normals)
      if ((std::fabs(a[0] - b[0]) < 1e-10 && std::fabs(a[1] - b[1]) < 1e-10) ||
          (std::fabs(a[0] + b[0]) < 1e-10 && std::fabs(a[1] + b[1]) < 1e-10))
        dup = true;
    if (!dup) normals.push_back(a);
  }
  return normals;
}

// 2D vertex enumeration of {x : |<f_i,x>| <= 1} for real polyhedral balls.
std::vector<Vec> enumerate2dVertices(const std::vector<Vec>& funcs) {
  std::vector<Vec> lines;  // <g,x> = 1 for g in +-funcs
  for (const Vec& f : funcs) {
    lines.push_back(f);
    lines.push_back(Vec{-f[0], -f[1]});
  }
  std::vector<Vec> verts;
  auto feasible = [&](double x, double y) {
    for (const Vec& f : funcs)
      if (std::fabs(f[0] * x + f[1] * y) > 1.0 + 1e-9) return false;
    return true;
  };
  for (size_t a = 0; a < lines.size(); ++a) {
    for (size_t b = a + 1; b < lines.size(); ++b) {
      double det = lines[a][0] * lines[b][1] - lines[a][1] * lines[b][0];
      if (std::fabs(det) < 1e-12) continue;
      double x = (lines[b][1] - lines[a][1]) / det;
      double y = (lines[a][0] - lines[b][0]) / det;
      if (!feasible(x, y)) continue;
      bool dup = false;
      for (const Vec& v : verts)
        if (std::fabs(v[0] - x) < 1e-9 && std::fabs(v[1] - y) < 1e-9) dup = true;
      if (!dup) verts.push_back(Vec{x, y});
    }
  }
  std::sort(verts.begin(), verts.end(), [](const Vec& a, const Vec& b) {
    return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
  });
  return verts;
}

// Defining functionals for the polyhedral-like real 2-dim families.
std::vector<Vec> polyLikeFuncs(const FamilyVariant& fam) {
  if (const auto* pf = std::get_if<PolyFam>(&fam)) return pf->funcs;
  if (const auto* gf = std::get_if<GammaFam>(&fam)) {
    double g = gf->gamma;
    if (!gf->dualForm)
      return {Vec{0.0, 1.0}, Vec{1.0, 1.0 - g}, Vec{1.0, -(1.0 - g)}};
    return {Vec{1.0, 0.0}, Vec{g, 1.0}, Vec{g, -1.0}};
  }
  return {};
}

int matrixRank(std::vector<std::vector<Scalar>> m) {
  int rank = 0;
  size_t rows = m.size();
  if (rows == 0) return 0;
  size_t cols = m[0].size();
  for (size_t c = 0; c < cols && size_t(rank) < rows; ++c) {
    size_t piv = rank;
    for (size_t r = rank; r < rows; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) < 1e-10) continue;
    std::swap(m[piv], m[size_t(rank)]);
    for (size_t r = 0; r < rows; ++r) {
      if (int(r) == rank) continue;
      Scalar k = m[r][c] / m[size_t(rank)][c];
      for (size_t cc = c; cc < cols; ++cc) m[r][cc] -= k * m[size_t(rank)][cc];
    }
    ++rank;
  }
  return rank;
}

void dedupePush(std::vector<Vec>& out, const Vec& f) {
  for (const Vec& g : out)
    if (maxAbsDiff(g, f) < 1e-9) return;
  out.push_back(f);
}

}  // namespace

std::string Space::familyName() const {
  if (std::holds_alternative<LpFam>(fam_)) return "lp";
  if (std::holds_alternative<WmrFam>(fam_)) return "wmr";
  if (const auto* g = std::get_if<GammaFam>(&fam_)) return g->dualForm ? "gammadual" : "gamma";
  if (std::holds_alternative<PolyFam>(fam_)) return "poly";
  if (std::holds_alternative<SumFam>(fam_)) return "sum";
  return "dualof";
}

void Space::checkVec(const Vec& x) const {
  if (int(x.size()) != realDim())
    throw InputError("vector has " + std::to_string(x.size()) + " real coordinates, space '" +
                     label_ + "' needs " + std::to_string(realDim()));
  if (!finiteVec(x)) throw InputError("non-finite vector input");
}

double Space::familyNorm(const Vec& x) const {
  const Field f = field_;
  auto mod = [&](int j) { return std::abs(getScalar(x, j, f)); };
  if (const auto* lp = std::get_if<LpFam>(&fam_)) {
    if (lp->p == kInf) {
      double m = 0.0;
      for (int j = 0; j < dim_; ++j) m = std::max(m, mod(j));
      return m;
    }
    if (lp->p == 1.0) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s += mod(j);
      return s;
    }
    if (lp->p == 2.0) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) {
        double m = mod(j);
        s += m * m;
      }
      return std::sqrt(s);
    }
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += std::pow(mod(j), lp->p);
    return std::pow(s, 1.0 / lp->p);
  }
  if (const auto* wm = std::get_if<WmrFam>(&fam_)) {
    double a = mod(0), b = mod(1);
    return std::max(a, std::sqrt(wm->r * a * a + b * b));
  }
  if (const auto* gf = std::get_if<GammaFam>(&fam_)) {
    double a = mod(0), b = mod(1);
    if (!gf->dualForm) return std::max(b, a + (1.0 - gf->gamma) * b);
    return std::max(a, gf->gamma * a + b);
  }
  if (const auto* pf = std::get_if<PolyFam>(&fam_)) {
    double m = 0.0;
    for (const Vec& fn : pf->funcs) m = std::max(m, std::abs(pairing(fn, x, f)));
    return m;
  }
  if (const auto* sf = std::get_if<SumFam>(&fam_)) {
    Vec partNorms(sf->parts.size());
    for (size_t i = 0; i < sf->parts.size(); ++i)
      partNorms[i] = sf->parts[i]->norm(sumPart(*sf, x, i));
    return sf->outer->norm(partNorms);
  }
  const auto& df = std::get<DualFam>(fam_);
  double e = euclid(x);
  if (e <= 1e-300) return 0.0;
  auto memo = std::static_pointer_cast<DualMemo>(memo_);
  Vec dir = scaleVec(x, 1.0 / e);
  uint64_t key = hashDoubles(dir.data(), dir.size(), 0xd1a1);
  {
    std::lock_guard<std::mutex> lk(memo->mu);
    auto it = memo->cache.find(key);
    if (it != memo->cache.end()) return it->second * e;
  }
  double v = supPairingOnSphere(*df.inner, dir);
  {
    std::lock_guard<std::mutex> lk(memo->mu);
    memo->cache.emplace(key, v);
  }
  return v * e;
}

double Space::norm(const Vec& x) const {
  checkVec(x);
  return familyNorm(x);
}

double Space::dualNorm(const Vec& f) const { return dual()->norm(f); }

SpacePtr Space::dual() const {
  // recursive: sums and polyhedral duals build their duals from sub-spaces
  static std::recursive_mutex mu;
  std::lock_guard<std::recursive_mutex> lk(mu);
  if (dualCache_) return dualCache_;
  SpacePtr d;
  if (const auto* lp = std::get_if<LpFam>(&fam_)) {
    double q;
    if (lp->p == 1.0)
      q = kInf;
    else if (lp->p == kInf)
      q = 1.0;
    else
      q = lp->p / (lp->p - 1.0);
    d = makeLp(field_, dim_, q, label_.empty() ? "" : label_ + "*");
  } else if (const auto* gf = std::get_if<GammaFam>(&fam_)) {
    d = makeGamma(field_, gf->gamma, !gf->dualForm, label_.empty() ? "" : label_ + "*");
  } else if (const auto* sf = std::get_if<SumFam>(&fam_)) {
    std::vector<SpacePtr> dparts;
    for (const auto& p : sf->parts) dparts.push_back(p->dual());
    d = makeAbsoluteSum(sf->outer->dual(), dparts, label_.empty() ? "" : label_ + "*");
  } else if (const auto* df = std::get_if<DualFam>(&fam_)) {
    d = df->inner;
  } else if (const auto* pf = std::get_if<PolyFam>(&fam_);
             pf && field_ == Field::Real && dim_ == 2) {
    // Dual ball is conv(+-funcs); its gauge is polyhedral with the facet
    // normals as defining functionals.
    std::vector<Vec> pts;
    for (const Vec& fn : pf->funcs) {
      pts.push_back(fn);
      pts.push_back(Vec{-fn[0], -fn[1]});
    }
    auto normals = polygonFacetNormals(convexHull2d(pts));
    if (!normals.empty())
      d = makePolyhedral(Field::Real, normals, label_.empty() ? "" : label_ + "*");
    else
      d = makeDualOf(shared_from_this(), label_.empty() ? "" : label_ + "*");
  } else {
    d = makeDualOf(shared_from_this(), label_.empty() ? "" : label_ + "*");
  }
  dualCache_ = d;
  return d;
}

Vec sumPart(const SumFam& sf, const Vec& x, size_t i) {
  int off = sf.realOffsets[i];
  int len = sf.parts[i]->realDim();
  return Vec(x.begin() + off, x.begin() + off + len);
}

void sumSetPart(const SumFam& sf, Vec& x, size_t i, const Vec& part) {
  int off = sf.realOffsets[i];
  for (size_t k = 0; k < part.size(); ++k) x[off + k] = part[k];
}

const std::vector<Vec>& Space::extremePoints() const {
  // recursive: absolute sums enumerate extreme points of their parts
  static std::recursive_mutex mu;
  std::lock_guard<std::recursive_mutex> lk(mu);
  if (extremeComputed_) return extremeCache_;
  extremeComputed_ = true;
  if (field_ != Field::Complex) {
    if (dim_ == 1) {
      double s = familyNorm(Vec{1.0});
      if (s > 1e-12) {
        extremeCache_.push_back(Vec{1.0 / s});
        extremeCache_.push_back(Vec{-1.0 / s});
      }
      return extremeCache_;
    }
    if (const auto* lp = std::get_if<LpFam>(&fam_)) {
      if (lp->p == 1.0) {
        for (int j = 0; j < dim_; ++j)
          for (double s : {1.0, -1.0}) {
            Vec e(dim_, 0.0);
            e[j] = s;
            extremeCache_.push_back(e);
          }
      } else if (lp->p == kInf && dim_ <= 10) {
        for (int mask = 0; mask < (1 << dim_); ++mask) {
          Vec e(dim_);
          for (int j = 0; j < dim_; ++j) e[j] = (mask >> j) & 1 ? 1.0 : -1.0;
          extremeCache_.push_back(e);
        }
      }
    } else if (dim_ == 2) {
      auto funcs = polyLikeFuncs(fam_);
      if (!funcs.empty()) extremeCache_ = enumerate2dVertices(funcs);
    }
    if (const auto* sf = std::get_if<SumFam>(&fam_)) {
      const auto* olp = std::get_if<LpFam>(&sf->outer->family());
      if (olp && olp->p == kInf) {
        std::vector<Vec> combos{Vec(realDim(), 0.0)};
        bool ok = true;
        for (size_t i = 0; i < sf->parts.size() && ok; ++i) {
          const auto& ext = sf->parts[i]->extremePoints();
          if (ext.empty() || combos.size() * ext.size() > 4096) {
            ok = false;
            break;
          }
          std::vector<Vec> next;
          for (const Vec& c : combos)
            for (const Vec& e : ext) {
              Vec v = c;
              sumSetPart(*sf, v, i, e);
              next.push_back(v);
            }
          combos = next;
        }
        if (ok) extremeCache_ = combos;
      } else if (olp && olp->p == 1.0) {
        for (size_t i = 0; i < sf->parts.size(); ++i)
          for (const Vec& e : sf->parts[i]->extremePoints()) {
            Vec v(realDim(), 0.0);
            sumSetPart(*sf, v, i, e);
            extremeCache_.push_back(v);
          }
      }
    }
  }
  return extremeCache_;
}

std::vector<Vec> Space::sampleSphere(int count, uint64_t seed) const {
  if (count < 1) throw InputError("sampleSphere: count must be >= 1");
  std::mt19937_64 rng(seed ^ 0xabcdef12345ull);
  const auto& ext = extremePoints();
  std::vector<Vec> out;
  size_t extIdx = 0;
  int guard = 0;
  while (int(out.size()) < count && guard < 100 * count + 100) {
    ++guard;
    if (!ext.empty() && out.size() % 3 == 2) {
      out.push_back(ext[extIdx++ % ext.size()]);
      continue;
    }
    Vec x(realDim());
    for (double& v : x) v = gauss(rng);
    double n = familyNorm(x);
    if (n < 1e-12) continue;
    for (double& v : x) v /= n;
    out.push_back(x);
  }
  return out;
}

std::vector<Vec> Space::closedFormFace(const Vec& u, double delta, int count,
                                       uint64_t seed) const {
  std::mt19937_64 rng(seed ^ 0xface5eedull);
  const Field f = field_;
  std::vector<Vec> out;
  if (const auto* lp = std::get_if<LpFam>(&fam_)) {
    if (lp->p > 1.0 && lp->p < kInf) {
      // Smooth point: unique support functional f_j = u_j |u_j|^(p-2).
      Vec fn(realDim(), 0.0);
      for (int j = 0; j < dim_; ++j) {
        Scalar uj = getScalar(u, j, f);
        double m = std::abs(uj);
        if (m > 1e-300) setScalar(fn, j, f, uj * std::pow(m, lp->p - 2.0));
      }
      double dn = dualNorm(fn);
      out.push_back(scaleVec(fn, 1.0 / dn));
      return out;
    }
    if (lp->p == 1.0) {
      // Dual is l_inf: signs on the support, free unit-disc entries off it.
      for (int k = 0; k < count; ++k) {
        Vec fn(realDim(), 0.0);
        for (int j = 0; j < dim_; ++j) {
          Scalar uj = getScalar(u, j, f);
          double m = std::abs(uj);
          if (m > 1e-12) {
            setScalar(fn, j, f, uj / m);
          } else if (k > 0) {
            if (f == Field::Complex) {
              double ang = 2.0 * M_PI * u01(rng);
              double rad = u01(rng);
              setScalar(fn, j, f, Scalar(rad * std::cos(ang), rad * std::sin(ang)));
            } else {
              setScalar(fn, j, f, 2.0 * u01(rng) - 1.0);
            }
          }
        }
        dedupePush(out, fn);
      }
      return out;
    }
    // l_inf: convex combinations of aligned coordinate functionals on the
    // argmax set.
    std::vector<int> act;
    double un = familyNorm(u);
    for (int j = 0; j < dim_; ++j)
      if (std::abs(getScalar(u, j, f)) >= un - 1e-9) act.push_back(j);
    for (size_t a = 0; a < act.size(); ++a) {
      Vec fn(realDim(), 0.0);
      Scalar uj = getScalar(u, act[a], f);
      setScalar(fn, act[a], f, uj / std::abs(uj));
      dedupePush(out, fn);
    }
    while (int(out.size()) < count && act.size() > 1) {
      Vec w(act.size());
      double s = 0.0;
      for (double& v : w) {
        v = u01(rng) + 1e-9;
        s += v;
      }
      Vec fn(realDim(), 0.0);
      for (size_t a = 0; a < act.size(); ++a) {
        Scalar uj = getScalar(u, act[a], f);
        setScalar(fn, act[a], f, (w[a] / s) * uj / std::abs(uj));
      }
      dedupePush(out, fn);
    }
    return out;
  }
  if (f == Field::Real && dim_ == 2) {
    auto funcs = polyLikeFuncs(fam_);
    if (!funcs.empty()) {
      // Active dual-ball vertices (+-funcs) and their convex combinations.
      std::vector<Vec> actives;
      double thr = delta > 0.0 ? 1.0 - delta : 1.0 - 1e-9;
      for (const Vec& fn : funcs)
        for (double s : {1.0, -1.0}) {
          Vec g{s * fn[0], s * fn[1]};
          if (g[0] * u[0] + g[1] * u[1] > thr) dedupePush(actives, g);
        }
      out = actives;
      while (int(out.size()) < count && actives.size() > 1) {
        Vec w(actives.size());
        double s = 0.0;
        for (double& v : w) {
          v = u01(rng) + 1e-9;
          s += v;
        }
        Vec fn{0.0, 0.0};
        for (size_t a = 0; a < actives.size(); ++a) {
          fn[0] += (w[a] / s) * actives[a][0];
          fn[1] += (w[a] / s) * actives[a][1];
        }
        dedupePush(out, fn);
      }
      return out;
    }
  }
  if (const auto* sf = std::get_if<SumFam>(&fam_)) {
    // Outer face functional times part faces; free dual-unit fill on zero parts.
    Vec partNorms(sf->parts.size());
    for (size_t i = 0; i < sf->parts.size(); ++i)
      partNorms[i] = sf->parts[i]->norm(sumPart(*sf, u, i));
    auto outerFaces = sf->outer->faceSample(partNorms, delta * 0.5, std::max(2, count / 2), seed);
    std::vector<std::vector<Vec>> partFaces(sf->parts.size());
    for (size_t i = 0; i < sf->parts.size(); ++i) {
      if (partNorms[i] > 1e-10) {
        Vec ui = scaleVec(sumPart(*sf, u, i), 1.0 / partNorms[i]);
        partFaces[i] = sf->parts[i]->faceSample(ui, delta * 0.5, std::max(2, count / 2),
                                                seed + 31 * i + 1);
        if (partFaces[i].empty()) return {};
      } else {
        auto sph = sf->parts[i]->dual()->sampleSphere(std::max(2, count / 2), seed + 41 * i + 7);
        partFaces[i] = sph;
      }
    }
    for (const Vec& b : outerFaces) {
      for (int k = 0; k < std::max(1, count / std::max<int>(1, int(outerFaces.size()))); ++k) {
        Vec fn(realDim(), 0.0);
        for (size_t i = 0; i < sf->parts.size(); ++i) {
          const auto& pf = partFaces[i];
          const Vec& gi = pf[(k + i) % pf.size()];
          sumSetPart(*sf, fn, i, scaleVec(gi, std::fabs(b[i])));
        }
        dedupePush(out, fn);
        if (int(out.size()) >= count) break;
      }
      if (int(out.size()) >= count) break;
    }
    return out;
  }
  return {};
}

std::vector<Vec> Space::numericFace(const Vec& u, double delta, int count, uint64_t seed) const {
  SpacePtr ds = dual();
  const int rd = ds->realDim();
  if (rd > 3) return {};
  std::vector<Vec> cands;
  auto push = [&](Vec fRaw) {
    double n = ds->norm(fRaw);
    if (n < 1e-12) return;
    for (double& v : fRaw) v /= n;
    double thr = delta > 0.0 ? 1.0 - delta : 1.0 - 1e-8;
    if (pairing(fRaw, u, field_).real() > thr) dedupePush(cands, fRaw);
  };
  auto polish = [&](Vec f0) {
    // Ascend Re f(u) over the dual sphere from f0.
    double step = 0.1;
    double cur = pairing(f0, u, field_).real();
    while (step > 1e-12) {
      bool improved = false;
      for (int i = 0; i < rd; ++i)
        for (double sgn : {1.0, -1.0}) {
          Vec g = f0;
          g[i] += sgn * step;
          double n = ds->norm(g);
          if (n < 1e-12) continue;
          for (double& v : g) v /= n;
          double val = pairing(g, u, field_).real();
          if (val > cur + 1e-15) {
            cur = val;
            f0 = g;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    return f0;
  };
  const int N = rd == 2 ? 8192 : 0;
  std::vector<Vec> grid;
  if (rd == 2) {
    for (int k = 0; k < N; ++k) {
      double a = 2.0 * M_PI * k / N;
      grid.push_back(Vec{std::cos(a), std::sin(a)});
    }
  } else if (rd == 3) {
    for (int i = 0; i <= 64; ++i) {
      double ph = M_PI * i / 64;
      for (int k = 0; k < 128; ++k) {
        double a = 2.0 * M_PI * k / 128;
        grid.push_back(Vec{std::sin(ph) * std::cos(a), std::sin(ph) * std::sin(a), std::cos(ph)});
      }
    }
  } else {
    grid.push_back(Vec{1.0});
  }
  // Rank grid points by alignment, polish the best basins, then filter.
  std::vector<std::pair<double, Vec>> ranked;
  for (Vec g : grid) {
    double n = ds->norm(g);
    if (n < 1e-12) continue;
    for (double& v : g) v /= n;
    ranked.emplace_back(pairing(g, u, field_).real(), g);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  size_t polishCount = std::min<size_t>(ranked.size(), delta > 0.0 ? 0 : 48);
  for (size_t i = 0; i < polishCount; ++i) push(polish(ranked[i].second));
  double thr = delta > 0.0 ? 1.0 - delta : 1.0 - 1e-8;
  for (const auto& [val, g] : ranked) {
    if (val <= thr) break;
    push(g);
  }
  (void)seed;
  if (int(cands.size()) > count) {
    // Keep an evenly spread subset so flat faces stay fully represented.
    std::vector<Vec> spread;
    double stride = double(cands.size()) / count;
    for (int i = 0; i < count; ++i) spread.push_back(cands[size_t(i * stride)]);
    cands = std::move(spread);
  }
  return cands;
}

std::vector<Vec> Space::faceSample(const Vec& u, double delta, int count, uint64_t seed) const {
  checkVec(u);
  double un = familyNorm(u);
  if (std::fabs(un - 1.0) > 1e-6)
    throw InputError("faceSample requires a unit vector (norm was " + std::to_string(un) + ")");
  if (count < 1) throw InputError("faceSample: count must be >= 1");
  auto cf = closedFormFace(u, delta, count, seed);
  if (!cf.empty()) return cf;
  return numericFace(u, delta, count, seed);
}

namespace {
SpacePtr finish(Space* raw) { return SpacePtr(raw); }

void absolutenessCheck(const SpacePtr& outer) {
  std::mt19937_64 rng(4242);
  int n = outer->dim();
  for (int t = 0; t < 24; ++t) {
    Vec a(n), absA(n);
    for (int j = 0; j < n; ++j) {
      a[j] = 2.0 * u01(rng) - 1.0;
      absA[j] = std::fabs(a[j]);
    }
    double na = outer->norm(a), nabs = outer->norm(absA);
    if (std::fabs(na - nabs) > 1e-8 * std::max(1.0, na))
      throw InputError("absoluteSum outer norm is not absolute");
    Vec bigger = absA;
    int j = int(rng() % uint64_t(n));
    bigger[j] += 0.5;
    if (outer->norm(bigger) < nabs - 1e-10)
      throw InputError("absoluteSum outer norm is not monotone");
  }
}
}  // namespace

SpacePtr Space::makeLp(Field f, int dim, double p, std::string label) {
  if (dim < 1) throw InputError("lp space needs dim >= 1");
  if (!(p >= 1.0)) throw InputError("lp exponent must be in [1, inf]");
  auto* s = new Space();
  s->field_ = f;
  s->dim_ = dim;
  s->fam_ = LpFam{p};
  s->label_ = std::move(label);
  return finish(s);
}

SpacePtr Space::makeWeightedMaxRoot(Field f, double r, std::string label) {
  if (r < 0.0 || r > 1.0) throw InputError("wmr parameter r must be in [0,1]");
  auto* s = new Space();
  s->field_ = f;
  s->dim_ = 2;
  s->fam_ = WmrFam{r};
  s->label_ = std::move(label);
  return finish(s);
}

SpacePtr Space::makeGamma(Field f, double gamma, bool dualForm, std::string label) {
  if (gamma < 0.0 || gamma > 1.0) throw InputError("gamma parameter must be in [0,1]");
  auto* s = new Space();
  s->field_ = f;
  s->dim_ = 2;
  s->fam_ = GammaFam{gamma, dualForm};
  s->label_ = std::move(label);
  return finish(s);
}

SpacePtr Space::makePolyhedral(Field f, std::vector<Vec> funcs, std::string label) {
  if (funcs.empty()) throw InputError("polyhedral family needs at least one functional");
  int rd = int(funcs[0].size());
  for (const Vec& fn : funcs)
    if (int(fn.size()) != rd || !finiteVec(fn))
      throw InputError("polyhedral functionals must share dimension and be finite");
  int dim = f == Field::Complex ? rd / 2 : rd;
  if (f == Field::Complex && rd % 2 != 0)
    throw InputError("complex polyhedral functionals need [re,im] pairs");
  std::vector<std::vector<Scalar>> m;
  for (const Vec& fn : funcs) {
    std::vector<Scalar> row(dim);
    for (int j = 0; j < dim; ++j) row[j] = getScalar(fn, j, f);
    m.push_back(row);
  }
  if (matrixRank(m) < dim)
    throw InputError("polyhedral functionals do not span the space (degenerate norm)");
  auto* s = new Space();
  s->field_ = f;
  s->dim_ = dim;
  s->fam_ = PolyFam{std::move(funcs)};
  s->label_ = std::move(label);
  return finish(s);
}

SpacePtr Space::makeAbsoluteSum(SpacePtr outer, std::vector<SpacePtr> parts, std::string label) {
  if (parts.empty()) throw InputError("absoluteSum needs at least one part");
  if (!outer || outer->field() != Field::Real || outer->dim() != int(parts.size()))
    throw InputError("absoluteSum outer must be a real space of dim = number of parts");
  Field f = parts[0]->field();
  int dim = 0;
  std::vector<int> offsets;
  int off = 0;
  for (const auto& p : parts) {
    if (p->field() != f) throw InputError("absoluteSum parts must share the scalar field");
    offsets.push_back(off);
    off += p->realDim();
    dim += p->dim();
  }
  absolutenessCheck(outer);
  auto* s = new Space();
  s->field_ = f;
  s->dim_ = dim;
  s->fam_ = SumFam{std::move(outer), std::move(parts), std::move(offsets)};
  s->label_ = std::move(label);
  return finish(s);
}

SpacePtr Space::makeDualOf(SpacePtr inner, std::string label) {
  if (!inner) throw InputError("dualof needs an inner space");
  auto* s = new Space();
  s->field_ = inner->field();
  s->dim_ = inner->dim();
  s->fam_ = DualFam{inner};
  s->label_ = std::move(label);
  s->memo_ = std::make_shared<DualMemo>();
  return finish(s);
}

SpacePtr absoluteSum(const std::vector<SpacePtr>& parts, SpacePtr outer, std::string label) {
  return Space::makeAbsoluteSum(std::move(outer), parts, std::move(label));
}

}  // namespace nidx
