#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geoflow/curvature_report.hpp"
#include "geoflow/paneitz.hpp"
#include "geoflow/zonal_field.hpp"

namespace geoflow {

// Metric e^{2w} g_c with zonal log-factor w on the round S^4.  Conformal to
// round, so W and B vanish identically.
struct ConformalRoundMetric {
  ZonalField w;

  const GridPtr& grid() const { return w.grid(); }

  static ConformalRoundMetric round(GridPtr grid) {
    return {ZonalField::zero(std::move(grid))};
  }
};

// Conformal factor of the Moebius dilation of S^4 along the polar axis with
// parameter s > 0: the pullback of the round metric is e^{2w} g_c and its
// Q-curvature is identically 3.
inline double mobius_factor(double s, double theta) {
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
  return std::log(s / (c * c + s * s * sn * sn));
}

// The dilation itself as a polar-angle profile.
inline double mobius_profile(double s, double theta) {
  return 2.0 * std::atan(s * std::tan(0.5 * theta));
}

namespace detail {

// Resolution guard: re-project the samples on the full resolvable band and
// require the energy beyond the grid's nominal band to be negligible.
inline void require_resolved(const ZonalField& w) {
  const ThetaGrid& g = *w.grid();
  const auto c = g.coeffs_of(w.samples(), g.max_band());
  double total = 0.0, tail = 0.0;
  for (int k = 1; k <= g.max_band(); ++k) {
    const double c2 = c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k)];
    total += c2;
    if (k > g.kmax()) tail += c2;
  }
  if (total > 0.0 && std::sqrt(tail / total) > 1e-8)
    throw std::domain_error("conformal metric under-resolved: spectral tail of w above 1e-8");
}

}  // namespace detail

// Scalar curvature, traceless Ricci norm, Q and the integral invariants of
// e^{2w} g_c, computed from the 4D conformal transformation laws with all
// derivatives taken spectrally in t = cos(theta):
//   R   = e^{-2w} (12 - 6 Dw - 6 |grad w|^2)
//   E   = -2 (Hess w - dw dw) + (1/2)(Dw - |grad w|^2) g_c
//   Q   = (1/12)(-D_g R + R^2/4 - 3 |E|_g^2)
// where D is the round Laplacian.
inline CurvatureReport conformal_curvature(const ConformalRoundMetric& m) {
  detail::require_resolved(m.w);
  const ThetaGrid& g = *m.grid();
  const int n = g.size();
  const auto d = spectral_t_derivatives(m.w);

  CurvatureReport rep;
  rep.coordinate.resize(static_cast<std::size_t>(n));
  rep.measure.resize(static_cast<std::size_t>(n));
  rep.R.resize(static_cast<std::size_t>(n));
  rep.normE2.resize(static_cast<std::size_t>(n));
  rep.normW2.assign(static_cast<std::size_t>(n), 0.0);
  rep.normB2.assign(static_cast<std::size_t>(n), 0.0);
  rep.Q.resize(static_cast<std::size_t>(n));

  std::vector<double> e4w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    const double t = g.t(i);
    const double s2 = 1.0 - t * t;
    const double F1 = d.dFdt[ii], F2 = d.d2Fdt2[ii];
    const double lap0 = s2 * F2 - 4.0 * t * F1;
    const double grad2 = s2 * F1 * F1;
    const double w = m.w[i];
    const double em2w = std::exp(-2.0 * w);
    e4w[ii] = std::exp(4.0 * w);

    rep.coordinate[ii] = g.theta(i);
    rep.measure[ii] = g.weight(i) * e4w[ii];
    rep.R[ii] = em2w * (12.0 - 6.0 * lap0 - 6.0 * grad2);
    // tangential frame component of E; the radial one is -3x this.
    const double bE = 2.0 * t * F1 + 0.5 * (lap0 - grad2);
    rep.normE2[ii] = em2w * em2w * 12.0 * bE * bE;
  }

  // D_g R needs derivatives of R itself; R is analytic in t, so project on
  // the full resolvable band.
  const auto Rf = ZonalField::from_samples(m.grid(), rep.R, g.max_band());
  const auto dR = spectral_t_derivatives(Rf);
  for (int i = 0; i < n; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    const double t = g.t(i);
    const double s2 = 1.0 - t * t;
    const double lapR0 = s2 * dR.d2Fdt2[ii] - 4.0 * t * dR.dFdt[ii];
    const double cross = s2 * d.dFdt[ii] * dR.dFdt[ii];
    const double lapgR = std::exp(-2.0 * m.w[i]) * (lapR0 + 2.0 * cross);
    rep.Q[ii] = (-lapgR + 0.25 * rep.R[ii] * rep.R[ii] - 3.0 * rep.normE2[ii]) / 12.0;
  }

  rep.finalize_integrals();
  return rep;
}

// Q through the fourth-order transformation law P w + 2 Q_0 = 2 Q e^{4w}
// with Q_0 = 3 on the round sphere; an algebraically independent route from
// conformal_curvature's direct formula.
inline ZonalField q_via_transformation(const ConformalRoundMetric& m) {
  detail::require_resolved(m.w);
  const auto pw = paneitz_apply(m.w);
  const ThetaGrid& g = *m.grid();
  std::vector<double> q(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i)
    q[static_cast<std::size_t>(i)] =
        std::exp(-4.0 * m.w[i]) * 0.5 * (pw[i] + 6.0);
  return ZonalField::from_samples(m.grid(), std::move(q), g.max_band());
}

// eta = 2 Q_g e^{4w} - 2 Q_0 = P w, the Q-curvature deviation density driving
// the quasiconformal flow; alpha is its L^1 size.
inline ZonalField q_deviation(const ConformalRoundMetric& m) { return paneitz_apply(m.w); }

inline double q_deviation_l1(const ConformalRoundMetric& m) { return q_deviation(m).l1(); }

}  // namespace geoflow
