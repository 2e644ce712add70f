#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace geoflow {

// Pointwise curvature data of a metric on S^4 together with its integral
// invariants.  Sample vectors live on the grid natural to the metric class
// (polar-angle nodes for conformally round metrics, arclength cells for
// warped ones); `measure` carries the quadrature weight including the
// metric's own volume element, so integral(f) = sum_i measure_i f_i is
// int f dv_g.  All squared-norm fields are norms in the metric itself.
struct CurvatureReport {
  std::vector<double> coordinate;  // theta or arclength of each sample
  std::vector<double> measure;     // dv_g quadrature weight per sample
  std::vector<double> R;
  std::vector<double> normE2;
  std::vector<double> normW2;
  std::vector<double> normB2;
  std::vector<double> Q;

  struct Integrals {
    double weyl_l2 = 0.0;       // beta = int |W|^2 dv
    double bach_l2 = 0.0;       // gamma = int |B|^2 dv
    double traceless_l2 = 0.0;  // int |E|^2 dv
    double total_q = 0.0;       // int Q dv
    double gauss_bonnet = 0.0;  // int (|W|^2 - |E|^2/2 + R^2/24) dv
    double volume = 0.0;
  } integrals;

  double integral(const std::vector<double>& f) const {
    if (f.size() != measure.size())
      throw std::invalid_argument("CurvatureReport: field/measure size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += measure[i] * f[i];
    return acc;
  }

  void finalize_integrals() {
    integrals.weyl_l2 = integral(normW2);
    integrals.bach_l2 = integral(normB2);
    integrals.traceless_l2 = integral(normE2);
    integrals.total_q = integral(Q);
    double gb = 0.0, vol = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i) {
      gb += measure[i] * (normW2[i] - 0.5 * normE2[i] + R[i] * R[i] / 24.0);
      vol += measure[i];
    }
    integrals.gauss_bonnet = gb;
    integrals.volume = vol;
  }
};

}  // namespace geoflow
