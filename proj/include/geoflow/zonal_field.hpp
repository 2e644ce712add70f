#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geoflow/theta_grid.hpp"

namespace geoflow {

using GridPtr = std::shared_ptr<const ThetaGrid>;

// A function on S^4 depending only on the polar angle, carried both as grid
// samples and as coefficients in the orthonormal zonal-harmonic basis.  The
// coefficient block is the band-limited projection; for fields built from
// coefficients the two representations agree exactly.
class ZonalField {
 public:
  ZonalField() = default;

  static ZonalField from_samples(GridPtr grid, std::vector<double> samples, int kband) {
    grid->check_size(samples);
    ZonalField f;
    f.grid_ = std::move(grid);
    f.samples_ = std::move(samples);
    f.coeffs_ = f.grid_->coeffs_of(f.samples_, kband);
    return f;
  }

  static ZonalField from_coeffs(GridPtr grid, std::vector<double> coeffs) {
    grid->check_band(static_cast<int>(coeffs.size()) - 1);
    ZonalField f;
    f.grid_ = std::move(grid);
    f.coeffs_ = std::move(coeffs);
    f.samples_ = f.grid_->samples_of(f.coeffs_);
    return f;
  }

  template <class Fn>
  static ZonalField from_function(GridPtr grid, Fn&& fn, int kband) {
    std::vector<double> s(static_cast<std::size_t>(grid->size()));
    for (int i = 0; i < grid->size(); ++i)
      s[static_cast<std::size_t>(i)] = fn(grid->theta(i));
    return from_samples(std::move(grid), std::move(s), kband);
  }

  static ZonalField zero(GridPtr grid) {
    ZonalField f;
    f.samples_.assign(static_cast<std::size_t>(grid->size()), 0.0);
    f.coeffs_.assign(1, 0.0);
    f.grid_ = std::move(grid);
    return f;
  }

  static ZonalField constant(GridPtr grid, double value) {
    ZonalField f;
    f.samples_.assign(static_cast<std::size_t>(grid->size()), value);
    // Z_0 is the constant 1/sqrt(vol), so the constant field has c_0 = value/Z_0.
    f.coeffs_.assign(1, value / grid->Z_pole(0));
    f.grid_ = std::move(grid);
    return f;
  }

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  int band() const { return static_cast<int>(coeffs_.size()) - 1; }
  double operator[](int i) const { return samples_[static_cast<std::size_t>(i)]; }

  double integral() const { return grid_->integrate(samples_); }
  double mean() const { return integral() / kSphereVolume; }

  double linf() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }
  double l1() const {
    double acc = 0.0;
    for (int i = 0; i < grid_->size(); ++i)
      acc += grid_->weight(i) * std::abs(samples_[static_cast<std::size_t>(i)]);
    return acc;
  }
  double l2() const {
    double acc = 0.0;
    for (int i = 0; i < grid_->size(); ++i) {
      const double v = samples_[static_cast<std::size_t>(i)];
      acc += grid_->weight(i) * v * v;
    }
    return std::sqrt(acc);
  }

  // Fraction of coefficient energy in the top quarter of the band; used by
  // resolution guards.
  double spectral_tail() const {
    const int kb = band();
    if (kb < 4) return 0.0;
    double total = 0.0, tail = 0.0;
    for (int k = 1; k <= kb; ++k) {
      const double c2 = coeffs_[static_cast<std::size_t>(k)] * coeffs_[static_cast<std::size_t>(k)];
      total += c2;
      if (k > (3 * kb) / 4) tail += c2;
    }
    return total > 0.0 ? std::sqrt(tail / total) : 0.0;
  }

  // Value of the band-limited representation at arbitrary theta.
  double eval(double theta) const {
    const double t = std::cos(theta);
    std::vector<double> row(coeffs_.size());
    gegenbauer_row(1.5, t, row);
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(coeffs_.size()); ++k)
      acc += coeffs_[static_cast<std::size_t>(k)] * ThetaGrid::normalization(k) *
             row[static_cast<std::size_t>(k)];
    return acc;
  }

 private:
  GridPtr grid_;
  std::vector<double> samples_;
  std::vector<double> coeffs_;
};

inline double zonal_quadrature(const ZonalField& f) { return f.integral(); }

// Spectral t-derivatives of the band-limited representation, evaluated at the
// grid nodes.  From these the polar-angle derivatives follow by
//   f'(theta)  = -sin(theta) F'(t),
//   f''(theta) = -cos(theta) F'(t) + sin^2(theta) F''(t).
struct ZonalDerivatives {
  std::vector<double> dFdt;
  std::vector<double> d2Fdt2;
};

inline ZonalDerivatives spectral_t_derivatives(const ZonalField& f) {
  const ThetaGrid& g = *f.grid();
  const auto& c = f.coeffs();
  ZonalDerivatives d;
  d.dFdt.assign(static_cast<std::size_t>(g.size()), 0.0);
  d.d2Fdt2.assign(static_cast<std::size_t>(g.size()), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    double d1 = 0.0, d2 = 0.0;
    for (int k = 1; k < static_cast<int>(c.size()); ++k) {
      d1 += c[static_cast<std::size_t>(k)] * g.dZdt(i, k);
      if (k >= 2) d2 += c[static_cast<std::size_t>(k)] * g.d2Zdt2(i, k);
    }
    d.dFdt[static_cast<std::size_t>(i)] = d1;
    d.d2Fdt2[static_cast<std::size_t>(i)] = d2;
  }
  return d;
}

// Geometer's Laplacian on zonal functions: multiplies coefficient k by
// -k(k+3), so constants are harmonic and the operator is negative
// semidefinite.
inline ZonalField laplacian_zonal(const ZonalField& f) {
  std::vector<double> c = f.coeffs();
  for (int k = 0; k < static_cast<int>(c.size()); ++k)
    c[static_cast<std::size_t>(k)] *= -laplace_eigenvalue(k);
  return ZonalField::from_coeffs(f.grid(), std::move(c));
}

inline ZonalField zonal_from_op(const ZonalField& f, double (*op)(double)) {
  std::vector<double> s = f.samples();
  for (double& v : s) v = op(v);
  return ZonalField::from_samples(f.grid(), std::move(s),
                                  std::min(f.grid()->max_band(), 2 * f.band()));
}

}  // namespace geoflow
