#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nidx {

using Vec = std::vector<double>;
using Scalar = std::complex<double>;

enum class Field { Real, Complex };

// Certified [lo, hi] enclosure of a scalar quantity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Bad input (dimension mismatch, non-finite data, schema violations). CLI exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Computation diagnostic (bound inversion, infeasibility, under-budget). CLI exit 1.
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double normIdentity = 1e-8;
  double faceMembership = 1e-8;
  double unitNorm = 1e-8;
};

Tolerances& tolerances();

inline bool finiteVec(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Realified layout: complex coordinate j occupies slots (2j, 2j+1) as (re, im).
inline Scalar getScalar(const Vec& v, int j, Field f) {
  return f == Field::Complex ? Scalar(v[2 * j], v[2 * j + 1]) : Scalar(v[j], 0.0);
}

inline void setScalar(Vec& v, int j, Field f, Scalar s) {
  if (f == Field::Complex) {
    v[2 * j] = s.real();
    v[2 * j + 1] = s.imag();
  } else {
    v[j] = s.real();
  }
}

// Duality pairing f(x) = sum conj(f_j) x_j (sesquilinear in the complex case).
Scalar pairing(const Vec& f, const Vec& x, Field field);

Vec scaleVec(const Vec& v, double s);
Vec addVec(const Vec& a, const Vec& b);
Vec subVec(const Vec& a, const Vec& b);
double maxAbsDiff(const Vec& a, const Vec& b);
// x + alpha*theta*z in realified coordinates.
Vec axpyTheta(const Vec& x, double alpha, Scalar theta, const Vec& z, Field field);

// Deterministic splitmix-style hash combine for memo keys.
uint64_t hashDoubles(const double* d, size_t n, uint64_t seed);

}  // namespace nidx
