#include "nidx/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nidx {

namespace {

double checkedEval(const SphereObjective& obj, const Vec& x) {
  double v = obj(x);
  if (!std::isfinite(v)) throw ComputeError("non-finite objective value in sphere search");
  return v;
}

bool lexLess(const Vec& a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace

std::vector<Vec> sphereGrid(const SpacePtr& space, int gridDepth, double* meshOut) {
  const int rd = space->realDim();
  std::vector<Vec> pts;
  auto normalize = [&](Vec v) -> std::optional<Vec> {
    double n = space->norm(v);
    if (n < 1e-12) return std::nullopt;
    for (double& x : v) x /= n;
    return v;
  };
  double mesh = 0.0;
  if (rd == 1) {
    pts.push_back(Vec{1.0});
    pts.push_back(Vec{-1.0});
    mesh = 0.0;
  } else if (rd == 2) {
    int N = std::max(64, 1 << std::min(gridDepth, 16));
    Vec prev;
    Vec first;
    for (int k = 0; k < N; ++k) {
      double a = 2.0 * M_PI * k / N;
      auto p = normalize(Vec{std::cos(a), std::sin(a)});
      if (!p) continue;
      if (!prev.empty()) mesh = std::max(mesh, space->norm(subVec(*p, prev)));
      if (first.empty()) first = *p;
      prev = *p;
      pts.push_back(*p);
    }
    if (!first.empty()) mesh = std::max(mesh, space->norm(subVec(first, prev)));
  } else if (rd == 3) {
    int NP = std::max(16, 1 << std::min(gridDepth / 2 + 2, 9));
    int NA = 2 * NP;
    std::vector<std::vector<Vec>> rows;
    for (int i = 0; i <= NP; ++i) {
      double ph = M_PI * i / NP;
      std::vector<Vec> row;
      for (int k = 0; k < NA; ++k) {
        double a = 2.0 * M_PI * k / NA;
        auto p = normalize(
            Vec{std::sin(ph) * std::cos(a), std::sin(ph) * std::sin(a), std::cos(ph)});
        if (p) row.push_back(*p);
      }
      rows.push_back(row);
    }
    for (size_t i = 0; i < rows.size(); ++i) {
      for (size_t k = 0; k < rows[i].size(); ++k) {
        pts.push_back(rows[i][k]);
        if (k + 1 < rows[i].size())
          mesh = std::max(mesh, space->norm(subVec(rows[i][k], rows[i][k + 1])));
        else if (!rows[i].empty())
          mesh = std::max(mesh, space->norm(subVec(rows[i][k], rows[i][0])));
        if (i + 1 < rows.size() && k < rows[i + 1].size())
          mesh = std::max(mesh, space->norm(subVec(rows[i][k], rows[i + 1][k])));
      }
    }
  } else {
    throw ComputeError("sphere grid only available for real dimension <= 3");
  }
  if (meshOut) *meshOut = mesh;
  return pts;
}

Vec polishOnSphere(const SpacePtr& space, const SphereObjective& obj, Vec start, int iterations,
                   bool maximize) {
  const int rd = space->realDim();
  const double sign = maximize ? 1.0 : -1.0;
  double cur = sign * checkedEval(obj, start);
  double step = 0.25;
  int it = 0;
  while (step > 1e-13 && it < iterations) {
    bool improved = false;
    for (int i = 0; i < rd && it < iterations; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vec y = start;
        y[i] += sgn * step;
        double n = space->norm(y);
        if (n < 1e-12) continue;
        for (double& v : y) v /= n;
        ++it;
        double val = sign * checkedEval(obj, y);
        if (val > cur + 1e-16) {
          cur = val;
          start = y;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return start;
}

namespace {

OptResult extremizeOnSphere(const SpacePtr& space, const SphereObjective& rawObj,
                            const Budget& budget, double lipBound, bool maximize) {
  const double sign = maximize ? 1.0 : -1.0;
  SphereObjective obj = [&](const Vec& x) { return sign * rawObj(x); };
  OptResult res;
  res.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& x, double v) {
    if (v > res.value + 1e-15 || (std::fabs(v - res.value) <= 1e-15 && lexLess(x, res.argmax))) {
      res.value = v;
      res.argmax = x;
    }
  };
  bool gridMode = space->realDim() <= 3;
  double mesh = 0.0;
  if (gridMode) {
    auto grid = sphereGrid(space, budget.gridDepth, &mesh);
    for (const Vec& p : grid) consider(p, checkedEval(obj, p));
    Vec polished = polishOnSphere(space, obj, res.argmax, 4000, true);
    consider(polished, checkedEval(obj, polished));
  }
  if (budget.starts >= 1) {
    auto starts = space->sampleSphere(budget.starts, budget.seed);
    for (const Vec& s : starts) {
      Vec p = polishOnSphere(space, obj, s, budget.iterations, true);
      consider(p, checkedEval(obj, p));
    }
  } else if (!gridMode) {
    throw ComputeError("sphere search needs starts >= 1 when no grid is available");
  }
  res.certified = gridMode && lipBound > 0.0;
  res.gap = res.certified ? lipBound * mesh : 0.0;
  res.value *= sign;
  return res;
}

}  // namespace

OptResult maximizeOnSphere(const SpacePtr& space, const SphereObjective& obj,
                           const Budget& budget, double lipBound) {
  return extremizeOnSphere(space, obj, budget, lipBound, true);
}

OptResult minimizeOnSphere(const SpacePtr& space, const SphereObjective& obj,
                           const Budget& budget, double lipBound) {
  return extremizeOnSphere(space, obj, budget, lipBound, false);
}

}  // namespace nidx
