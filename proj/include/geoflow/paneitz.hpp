#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geoflow/zonal_field.hpp"

namespace geoflow {

// Paneitz operator of the round S^4, diagonal on zonal harmonics.  The
// eigenvalues mu_k = k(k+1)(k+2)(k+3) = lambda_k (lambda_k + 2) are fixed so
// that the operator is nonnegative with kernel the constants; the convention
// is pinned project-wide by the Moebius identity P w + 6 = 6 e^{4w}.
inline double paneitz_eigenvalue(int k) {
  const double kk = static_cast<double>(k);
  return kk * (kk + 1.0) * (kk + 2.0) * (kk + 3.0);
}

struct PaneitzSpectrum {
  explicit PaneitzSpectrum(int kmax) {
    mu.resize(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) mu[static_cast<std::size_t>(k)] = paneitz_eigenvalue(k);
  }
  std::vector<double> mu;
};

inline ZonalField paneitz_apply(const ZonalField& u) {
  std::vector<double> c = u.coeffs();
  for (int k = 0; k < static_cast<int>(c.size()); ++k)
    c[static_cast<std::size_t>(k)] *= paneitz_eigenvalue(k);
  return ZonalField::from_coeffs(u.grid(), std::move(c));
}

// Unique mean-zero solution of P u = f; requires f mean-zero since constants
// span the kernel.
inline ZonalField paneitz_solve(const ZonalField& f) {
  if (std::abs(f.integral()) > 1e-9)
    throw std::domain_error("paneitz_solve: right-hand side must have zero mean");
  std::vector<double> c = f.coeffs();
  if (!c.empty()) c[0] = 0.0;
  for (int k = 1; k < static_cast<int>(c.size()); ++k)
    c[static_cast<std::size_t>(k)] /= paneitz_eigenvalue(k);
  return ZonalField::from_coeffs(f.grid(), std::move(c));
}

}  // namespace geoflow
