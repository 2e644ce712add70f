#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "geoflow/theta_grid.hpp"

namespace geoflow {

using Vec5 = std::array<double, 5>;

inline double dot(const Vec5& a, const Vec5& b) {
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
  return s;
}
inline double norm(const Vec5& a) { return std::sqrt(dot(a, a)); }
inline Vec5 axpy(double a, const Vec5& x, const Vec5& y) {
  Vec5 r;
  for (int i = 0; i < 5; ++i)
    r[static_cast<std::size_t>(i)] =
        a * x[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)];
  return r;
}
inline Vec5 scale(double a, const Vec5& x) {
  Vec5 r;
  for (int i = 0; i < 5; ++i) r[static_cast<std::size_t>(i)] = a * x[static_cast<std::size_t>(i)];
  return r;
}

// A point of the unit S^4 in R^5.
class SpherePoint {
 public:
  explicit SpherePoint(const Vec5& coords) : c_(coords) {
    if (std::abs(norm(c_) - 1.0) > 1e-12)
      throw std::domain_error("SpherePoint: coordinates are not a unit vector");
  }

  // Point at polar angle theta on the meridian through axis direction e1,
  // pole at e5.
  static SpherePoint on_meridian(double theta) {
    return SpherePoint({std::sin(theta), 0.0, 0.0, 0.0, std::cos(theta)});
  }
  // Same polar angle, orbit position rotated by chi inside the S^3 fiber.
  static SpherePoint at(double theta, double chi) {
    const double s = std::sin(theta);
    return SpherePoint({s * std::cos(chi), s * std::sin(chi), 0.0, 0.0, std::cos(theta)});
  }
  static SpherePoint north_pole() { return SpherePoint({0.0, 0.0, 0.0, 0.0, 1.0}); }

  const Vec5& coords() const { return c_; }
  double polar_angle() const { return std::acos(std::clamp(c_[4], -1.0, 1.0)); }
  SpherePoint antipode() const { return SpherePoint(scale(-1.0, c_)); }

  // Unit tangent in the direction of increasing polar angle; undefined at the
  // poles.
  Vec5 meridian_tangent() const {
    const double st = std::sqrt(std::max(0.0, 1.0 - c_[4] * c_[4]));
    if (st < 1e-14) throw std::domain_error("meridian_tangent: point is a pole");
    Vec5 u;
    for (int i = 0; i < 4; ++i)
      u[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)] * (c_[4] / st);
    u[4] = -st;
    return u;
  }

 private:
  Vec5 c_;
};

inline double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  return std::acos(std::clamp(dot(x.coords(), y.coords()), -1.0, 1.0));
}

// log_x(y): tangent vector at x of length d(x,y) pointing toward y.
inline Vec5 log_map(const SpherePoint& x, const SpherePoint& y) {
  const double c = std::clamp(dot(x.coords(), y.coords()), -1.0, 1.0);
  const double d = std::acos(c);
  if (d < 1e-14) return {0, 0, 0, 0, 0};
  const double s = std::sin(d);
  Vec5 v = axpy(-c, x.coords(), y.coords());  // y - cos(d) x
  return scale(d / s, v);
}

inline SpherePoint exp_map(const SpherePoint& x, const Vec5& v) {
  const double r = norm(v);
  if (r < 1e-300) return x;
  Vec5 p = axpy(std::sin(r) / r, v, scale(std::cos(r), x.coords()));
  return SpherePoint(scale(1.0 / norm(p), p));
}

// Parallel transport of u in T_x S^4 along the geodesic from x to y.
inline Vec5 parallel_transport(const SpherePoint& x, const SpherePoint& y, const Vec5& u) {
  const double d = geodesic_distance(x, y);
  if (d < 1e-14) return u;
  Vec5 e = scale(1.0 / d, log_map(x, y));  // unit direction at x
  const double ue = dot(u, e);
  // u + <u,e>((cos d - 1) e - sin d x)
  Vec5 r = u;
  r = axpy(ue * (std::cos(d) - 1.0), e, r);
  r = axpy(-ue * std::sin(d), x.coords(), r);
  return r;
}

// Projection of an ambient vector onto the tangent space at x.
inline Vec5 tangent_project(const SpherePoint& x, const Vec5& v) {
  return axpy(-dot(v, x.coords()), x.coords(), v);
}

// Smooth cutoff with plateau: psi = 1 on |x| < 1/4, psi = 0 on |x| > 1/2,
// glued with the exp(-1/t) mollifier in between.  All derivatives bounded.
struct BumpProfile {
  static double blend(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
  double operator()(double x) const {
    const double a = std::abs(x);
    if (a <= 0.25) return 1.0;
    if (a >= 0.5) return 0.0;
    const double t = (0.5 - a) / 0.25;  // 1 at inner edge, 0 at outer edge
    const double b0 = blend(t);
    const double b1 = blend(1.0 - t);
    return b0 / (b0 + b1);
  }
};

inline double bump_psi(double s) { return BumpProfile{}(s); }

// Volume of the geodesic ball of radius r on the round S^4.
inline double ball_volume(double r) {
  const double c = std::cos(r);
  return 2.0 * kPi * kPi * (2.0 / 3.0 - c + c * c * c / 3.0);
}

}  // namespace geoflow
