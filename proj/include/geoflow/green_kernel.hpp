#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "geoflow/interp.hpp"
#include "geoflow/paneitz.hpp"
#include "geoflow/quadrature.hpp"
#include "geoflow/zonal_field.hpp"

namespace geoflow {

inline constexpr double kGreenLogCoefficient = 1.0 / (8.0 * kPi * kPi);

namespace detail {

// Reproducing kernel of the degree-k harmonics on S^4 as a function of
// t = cos(distance): K_k(t) = Z_k(0) * nrm_k * C_k^{3/2}(t).
inline double kernel_scale(int k) {
  return ThetaGrid::normalization(k) * gegenbauer_at_one(1.5, k) *
         ThetaGrid::normalization(k);
}

// smooth part of the log split: phi(d) = log(d / (2 sin(d/2))),
// phi(0) = 0, phi ~ d^2/24 near zero.
inline double log_chordal_gap(double d) {
  if (d < 1e-8) return d * d / 24.0;
  return std::log(d / (2.0 * std::sin(0.5 * d)));
}

// Coefficients b_k of phi in the reproducing-kernel expansion
// phi(d(x,y)) = sum_k b_k K_k(x . y), cached up to a fixed cap.  These turn
// the Green's-function remainder into a termwise-cancelled series that stays
// accurate down to d = 0.
inline const std::vector<double>& log_gap_coefficients() {
  static const std::vector<double> table = [] {
    const int kcap = 512;
    const int panels = 320;
    std::vector<double> edges = uniform_edges(0.0, kPi, panels);
    {
      // refine toward the antipode where phi has a sqrt-type kink in cos d
      auto tail = graded_edges(edges[edges.size() - 2], kPi, kPi, 36);
      edges.pop_back();
      edges.pop_back();
      edges.insert(edges.end(), tail.begin(), tail.end());
    }
    std::vector<double> acc(static_cast<std::size_t>(kcap) + 1, 0.0);
    std::vector<double> row(static_cast<std::size_t>(kcap) + 1, 0.0);
    const auto& rule = gl_rule(16);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p] + edges[p + 1]);
      const double half = 0.5 * (edges[p + 1] - edges[p]);
      for (std::size_t q = 0; q < rule.first.size(); ++q) {
        const double theta = mid + half * rule.first[q];
        const double wq = rule.second[q] * half;
        const double s = std::sin(theta);
        const double dv = 2.0 * kPi * kPi * s * s * s * wq;
        gegenbauer_row(1.5, std::cos(theta), row);
        const double fv = log_chordal_gap(theta) * dv;
        for (int k = 0; k <= kcap; ++k)
          acc[static_cast<std::size_t>(k)] +=
              fv * ThetaGrid::normalization(k) * row[static_cast<std::size_t>(k)];
      }
    }
    // c_k are zonal coefficients; kernel coefficients divide out Z_k(0).
    for (int k = 0; k <= kcap; ++k)
      acc[static_cast<std::size_t>(k)] /=
          ThetaGrid::normalization(k) * gegenbauer_at_one(1.5, k);
    return acc;
  }();
  return table;
}

// mean over S^4 of log(1/d(x,.)).
inline double mean_log_inverse_distance() {
  static const double value = [] {
    auto edges = graded_edges(0.0, kPi, 0.0, 48);
    const double integral = panels_integrate(
        [](double th) {
          const double s = std::sin(th);
          return -std::log(th) * s * s * s;
        },
        edges, 20);
    return 0.75 * integral;  // (2 pi^2 / vol) = 3/4
  }();
  return value;
}

}  // namespace detail

// Zonal Green's function of the Paneitz operator on the round S^4, built from
// the spectral series truncated at degree K and normalized to zero mean.  The
// kernel is held through its logarithmic split
//   G(d) = (1/8 pi^2) log(1/d) + h(d),
// with the remainder h evaluated by a termwise-subtracted series so that the
// truncation error stays uniform in d.
class GreenKernel {
 public:
  explicit GreenKernel(int truncation) : kmax_(truncation) {
    if (truncation < 16)
      throw std::invalid_argument("GreenKernel: truncation below 16 cannot meet the h-accuracy contract");
    if (truncation > 512)
      throw std::invalid_argument("GreenKernel: truncation above coefficient cache");
    build();
  }

  int truncation() const { return kmax_; }

  // Remainder h(d); smooth and bounded on (0, pi].
  double h(double d) const { return h_spline_(clamp_d(d)); }

  // Full kernel value at geodesic distance d > 0.
  double value(double d) const {
    if (d <= 0.0) throw std::domain_error("GreenKernel: distance must be positive");
    return kGreenLogCoefficient * std::log(1.0 / d) + h(clamp_d(d));
  }

  double sup_h() const { return sup_h_; }
  double mean_h() const { return h0_; }

  // Kernel samples on a log-spaced distance grid, for dumps and studies.
  std::vector<std::array<double, 3>> sample_log_grid(double dmin, int count) const {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / (count - 1);
      const double d = dmin * std::pow(kPi / dmin, f);
      rows.push_back({d, value(d), h(d)});
    }
    return rows;
  }

 private:
  static double clamp_d(double d) { return std::min(std::max(d, 0.0), kPi); }

  void build() {
    const auto& bk = detail::log_gap_coefficients();
    h0_ = -detail::mean_log_inverse_distance() * kGreenLogCoefficient;

    // delta_k = mu_k^{-1} - (1/8pi^2) l_k where l_k are the kernel
    // coefficients of log(1/d); equivalently (1/8pi^2) b_k by the chordal
    // split, which is what makes the series uniformly convergent.
    std::vector<double> delta(static_cast<std::size_t>(kmax_) + 1, 0.0);
    for (int k = 1; k <= kmax_; ++k)
      delta[static_cast<std::size_t>(k)] = kGreenLogCoefficient * bk[static_cast<std::size_t>(k)];

    const int m = 1024;
    std::vector<double> dg(static_cast<std::size_t>(m) + 1);
    std::vector<double> hg(static_cast<std::size_t>(m) + 1);
    std::vector<double> row(static_cast<std::size_t>(kmax_) + 1);
    sup_h_ = 0.0;
    for (int j = 0; j <= m; ++j) {
      // Chebyshev-clustered distance grid on [0, pi]
      const double d = 0.5 * kPi * (1.0 - std::cos(kPi * static_cast<double>(j) / m));
      gegenbauer_row(1.5, std::cos(d), row);
      double acc = h0_;
      for (int k = 1; k <= kmax_; ++k)
        acc += delta[static_cast<std::size_t>(k)] * detail::kernel_scale(k) *
               row[static_cast<std::size_t>(k)];
      dg[static_cast<std::size_t>(j)] = d;
      hg[static_cast<std::size_t>(j)] = acc;
      sup_h_ = std::max(sup_h_, std::abs(acc));
    }
    h_spline_ = CubicSpline::natural(std::move(dg), std::move(hg));
  }

  int kmax_ = 0;
  double h0_ = 0.0;
  double sup_h_ = 0.0;
  CubicSpline h_spline_;
};

// L eta = convolution with the Green kernel; spectrally this divides
// coefficient k >= 1 by mu_k and drops the mean.
inline ZonalField potential_L(const ZonalField& eta) {
  std::vector<double> c = eta.coeffs();
  if (!c.empty()) c[0] = 0.0;
  for (int k = 1; k < static_cast<int>(c.size()); ++k)
    c[static_cast<std::size_t>(k)] /= paneitz_eigenvalue(k);
  return ZonalField::from_coeffs(eta.grid(), std::move(c));
}

// Direct quadrature route for L eta, independent of the spectral path: the
// y-integral reduces to (theta_z, chi) with orbit weight 4 pi sin^2(chi).
inline ZonalField potential_L_quadrature(const GreenKernel& kernel, const ZonalField& eta) {
  const ThetaGrid& g = *eta.grid();
  std::vector<double> out(static_cast<std::size_t>(g.size()), 0.0);

  for (int ix = 0; ix < g.size(); ++ix) {
    const double tx = g.theta(ix);
    const double ct = std::cos(tx), st = std::sin(tx);

    // theta_z panels, graded toward the diagonal theta_z = theta_x.
    std::vector<double> edges;
    {
      const double w0 = 0.25;
      const double lo = std::max(0.0, tx - w0), hi = std::min(kPi, tx + w0);
      if (lo > 1e-12)
        for (double e : uniform_edges(0.0, lo, std::max(2, static_cast<int>(lo / 0.2))))
          edges.push_back(e);
      else
        edges.push_back(0.0);
      auto lg = graded_edges(lo, tx, tx, 14);
      edges.insert(edges.end(), lg.begin() + 1, lg.end());
      auto rg = graded_edges(tx, hi, tx, 14);
      edges.insert(edges.end(), rg.begin() + 1, rg.end());
      if (hi < kPi - 1e-12) {
        auto rest = uniform_edges(hi, kPi, std::max(2, static_cast<int>((kPi - hi) / 0.2)));
        edges.insert(edges.end(), rest.begin() + 1, rest.end());
      }
    }

    auto chi_integral = [&](double tz) {
      const double cz = std::cos(tz), sz = std::sin(tz);
      auto fn = [&](double chi) {
        const double cd = std::clamp(ct * cz + st * sz * std::cos(chi), -1.0, 1.0);
        const double d = std::acos(cd);
        const double sc = std::sin(chi);
        return 4.0 * kPi * sc * sc * kernel.value(std::max(d, 1e-14));
      };
      std::vector<double> ce = graded_edges(0.0, 0.5, 0.0, 12);
      {
        auto rest = uniform_edges(0.5, kPi, 6);
        ce.insert(ce.end(), rest.begin() + 1, rest.end());
      }
      return panels_integrate(fn, ce, 12);
    };

    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p)
      acc += gl_integrate(
          [&](double tz) {
            const double sz = std::sin(tz);
            return eta.eval(tz) * sz * sz * sz * chi_integral(tz);
          },
          edges[p], edges[p + 1], 12);
    out[static_cast<std::size_t>(ix)] = acc;
  }
  return ZonalField::from_samples(eta.grid(), std::move(out),
                                  std::min(g.max_band(), std::max(8, 2 * eta.band())));
}

}  // namespace geoflow
