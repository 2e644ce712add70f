#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace geoflow {

// Gegenbauer (ultraspherical) polynomials C_k^alpha evaluated by the
// three-term recurrence
//   C_0 = 1,  C_1 = 2*alpha*t,
//   k C_k = 2t(k+alpha-1) C_{k-1} - (k+2alpha-2) C_{k-2}.
// alpha = 3/2 gives the zonal harmonics of S^4 up to normalization;
// alpha = 5/2 and 7/2 appear in the derivative formulas
//   d/dt C_k^{3/2} = 3 C_{k-1}^{5/2},   d^2/dt^2 C_k^{3/2} = 15 C_{k-2}^{7/2}.
inline void gegenbauer_row(double alpha, double t, std::vector<double>& out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  out[0] = 1.0;
  if (n == 1) return;
  out[1] = 2.0 * alpha * t;
  for (std::size_t k = 2; k < n; ++k) {
    const double kk = static_cast<double>(k);
    out[k] = (2.0 * t * (kk + alpha - 1.0) * out[k - 1] -
              (kk + 2.0 * alpha - 2.0) * out[k - 2]) /
             kk;
  }
}

inline double gegenbauer_at_one(double alpha, int k) {
  // C_k^alpha(1) = binom(k + 2 alpha - 1, k)
  double v = 1.0;
  for (int j = 1; j <= k; ++j)
    v *= (2.0 * alpha + static_cast<double>(j) - 1.0) / static_cast<double>(j);
  return v;
}

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
// Legendre recurrence. Nodes returned in increasing order.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-type initial guess
    double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

}  // namespace geoflow
