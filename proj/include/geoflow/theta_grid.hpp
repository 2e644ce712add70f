#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geoflow/gegenbauer.hpp"

namespace geoflow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSphereVolume = 8.0 * kPi * kPi / 3.0;  // vol(S^4)

// Laplacian eigenvalue on S^4: -Delta Z_k = lambda_k Z_k.
inline double laplace_eigenvalue(int k) {
  return static_cast<double>(k) * (static_cast<double>(k) + 3.0);
}

// Quadrature and zonal-harmonic basis for functions on S^4 that depend only
// on the polar angle theta.  Nodes are Gauss-Legendre in t = cos(theta), so
// no node sits on a pole and integrals of band-limited zonal integrands are
// exact up to the polynomial order of the rule:
//   int_{S^4} f dv = 2 pi^2 int_0^pi f(theta) sin^3(theta) dtheta
//                  = 2 pi^2 int_{-1}^1 F(t) (1 - t^2) dt.
// The basis Z_k(theta) = c_k C_k^{3/2}(cos theta) is orthonormal in this
// measure; its Laplacian eigenvalue is -k(k+3).
class ThetaGrid {
 public:
  ThetaGrid(int nodes, int kmax) : n_(nodes), kmax_(kmax) {
    if (nodes < 8) throw std::invalid_argument("ThetaGrid: too few nodes");
    if (kmax < 1) throw std::invalid_argument("ThetaGrid: kmax must be >= 1");
    if (nodes < 2 * kmax)
      throw std::invalid_argument("ThetaGrid: need nodes >= 2*kmax to resolve the band");
    max_band_ = nodes / 2 - 1;

    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    // gx ascending in t; store theta ascending instead (theta = acos t).
    t_.resize(static_cast<std::size_t>(nodes));
    theta_.resize(static_cast<std::size_t>(nodes));
    sin_theta_.resize(static_cast<std::size_t>(nodes));
    weight_.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
      const double t = gx[static_cast<std::size_t>(nodes - 1 - i)];
      const double u = gw[static_cast<std::size_t>(nodes - 1 - i)];
      t_[static_cast<std::size_t>(i)] = t;
      theta_[static_cast<std::size_t>(i)] = std::acos(t);
      sin_theta_[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, 1.0 - t * t));
      weight_[static_cast<std::size_t>(i)] = 2.0 * kPi * kPi * u * (1.0 - t * t);
    }

    build_basis();
  }

  static std::shared_ptr<const ThetaGrid> make(int nodes, int kmax) {
    return std::make_shared<const ThetaGrid>(nodes, kmax);
  }

  int size() const { return n_; }
  int kmax() const { return kmax_; }
  int max_band() const { return max_band_; }

  double theta(int i) const { return theta_[static_cast<std::size_t>(i)]; }
  double t(int i) const { return t_[static_cast<std::size_t>(i)]; }
  double sin_theta(int i) const { return sin_theta_[static_cast<std::size_t>(i)]; }
  double weight(int i) const { return weight_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& thetas() const { return theta_; }
  const std::vector<double>& weights() const { return weight_; }

  // Orthonormal zonal harmonic and its t-derivatives at node i.
  double Z(int i, int k) const { return z_[idx(i, k)]; }
  double dZdt(int i, int k) const { return dz_[idx(i, k)]; }
  double d2Zdt2(int i, int k) const { return d2z_[idx(i, k)]; }

  // Z_k at the pole theta = 0 (all zonal harmonics peak there).
  double Z_pole(int k) const { return z_pole_[static_cast<std::size_t>(k)]; }

  static double normalization(int k) {
    const double kk = static_cast<double>(k);
    return std::sqrt((kk + 1.5) / (2.0 * kPi * kPi * (kk + 1.0) * (kk + 2.0)));
  }

  double integrate(const std::vector<double>& samples) const {
    check_size(samples);
    double acc = 0.0;
    for (int i = 0; i < n_; ++i)
      acc += weight_[static_cast<std::size_t>(i)] * samples[static_cast<std::size_t>(i)];
    return acc;
  }

  // Project samples onto Z_0..Z_kband.
  std::vector<double> coeffs_of(const std::vector<double>& samples, int kband) const {
    check_size(samples);
    check_band(kband);
    std::vector<double> c(static_cast<std::size_t>(kband) + 1, 0.0);
    for (int k = 0; k <= kband; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n_; ++i)
        acc += weight_[static_cast<std::size_t>(i)] * z_[idx(i, k)] *
               samples[static_cast<std::size_t>(i)];
      c[static_cast<std::size_t>(k)] = acc;
    }
    return c;
  }

  std::vector<double> samples_of(const std::vector<double>& coeffs) const {
    const int kband = static_cast<int>(coeffs.size()) - 1;
    check_band(kband);
    std::vector<double> f(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int k = 0; k <= kband; ++k)
        acc += coeffs[static_cast<std::size_t>(k)] * z_[idx(i, k)];
      f[static_cast<std::size_t>(i)] = acc;
    }
    return f;
  }

  void check_size(const std::vector<double>& samples) const {
    if (static_cast<int>(samples.size()) != n_)
      throw std::invalid_argument("ThetaGrid: sample/grid size mismatch");
  }
  void check_band(int kband) const {
    if (kband < 0 || kband > max_band_)
      throw std::domain_error("ThetaGrid: band exceeds grid resolution");
  }

 private:
  std::size_t idx(int i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(max_band_ + 1) +
           static_cast<std::size_t>(k);
  }

  void build_basis() {
    const int nk = max_band_ + 1;
    z_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(nk));
    dz_.resize(z_.size());
    d2z_.resize(z_.size());
    std::vector<double> c32(static_cast<std::size_t>(nk));
    std::vector<double> c52(static_cast<std::size_t>(nk));
    std::vector<double> c72(static_cast<std::size_t>(nk));
    for (int i = 0; i < n_; ++i) {
      const double t = t_[static_cast<std::size_t>(i)];
      gegenbauer_row(1.5, t, c32);
      gegenbauer_row(2.5, t, c52);
      gegenbauer_row(3.5, t, c72);
      for (int k = 0; k < nk; ++k) {
        const double nrm = normalization(k);
        z_[idx(i, k)] = nrm * c32[static_cast<std::size_t>(k)];
        dz_[idx(i, k)] = (k >= 1) ? nrm * 3.0 * c52[static_cast<std::size_t>(k - 1)] : 0.0;
        d2z_[idx(i, k)] = (k >= 2) ? nrm * 15.0 * c72[static_cast<std::size_t>(k - 2)] : 0.0;
      }
    }
    z_pole_.resize(static_cast<std::size_t>(nk));
    for (int k = 0; k < nk; ++k)
      z_pole_[static_cast<std::size_t>(k)] = normalization(k) * gegenbauer_at_one(1.5, k);
  }

  int n_;
  int kmax_;
  int max_band_;
  std::vector<double> theta_, t_, sin_theta_, weight_;
  std::vector<double> z_, dz_, d2z_, z_pole_;
};

}  // namespace geoflow
