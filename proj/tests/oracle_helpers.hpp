#pragma once

// Independent reference computations used to pin expected values.  Everything
// here is deliberately built from different primitives than the library code
// it checks: composite Simpson instead of Gauss-Legendre, difference stencils
// instead of spectral derivatives, coordinate Christoffel symbols instead of
// closed-form curvature.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// Composite Simpson reference quadrature of 2 pi^2 int f(theta) sin^3 dtheta.
inline double zonal_integral_reference(const std::function<double(double)>& f, int n = 20000) {
  if (n % 2) ++n;
  const double h = kPi / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double th = i * h;
    const double s = std::sin(th);
    const double v = f(th) * s * s * s;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * v;
  }
  return 2.0 * kPi * kPi * acc * h / 3.0;
}

// Radial Laplacian (sin^3)^{-1} d/dtheta (sin^3 d/dtheta) by central
// differences.
inline double zonal_laplacian_fd(const std::function<double(double)>& f, double theta,
                                 double h = 1e-4) {
  auto flux = [&](double th) {
    const double s = std::sin(th);
    return s * s * s * (f(th + h) - f(th - h)) / (2.0 * h);
  };
  const double s = std::sin(theta);
  return (flux(theta + h) - flux(theta - h)) / (2.0 * h) / (s * s * s);
}

// ---------------------------------------------------------------------------
// Finite-difference curvature of a coordinate metric in dimension 4.
// Central differences of Christoffel symbols; adequate for 1e-7..1e-9
// absolute accuracy with step ~1e-2 and 4th-order stencils.

using Mat4 = std::array<std::array<double, 4>, 4>;
using MetricFn = std::function<Mat4(const std::array<double, 4>&)>;

struct CurvatureSample {
  double R = 0.0;        // scalar curvature
  double E2 = 0.0;       // |E|^2
  double W2 = 0.0;       // |W|^2
  double Rm2 = 0.0;      // |Rm|^2
  Mat4 ric{};            // Ricci (coordinate components, both indices down)
  Mat4 g{};              // metric at the point
};

inline Mat4 inverse4(const Mat4& m) {
  // Gauss-Jordan on a 4x4 copy.
  std::array<std::array<double, 8>, 4> a{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
    a[i][4 + i] = 1.0;
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    const double d = a[col][col];
    for (int j = 0; j < 8; ++j) a[col][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int j = 0; j < 8; ++j) a[r][j] -= f * a[col][j];
    }
  }
  Mat4 inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = a[i][4 + j];
  return inv;
}

// 4th-order first derivative of a scalar-valued function of x[dir].
template <class Fn>
double fd_deriv(Fn&& fn, std::array<double, 4> x, int dir, double h) {
  auto at = [&](double off) {
    auto y = x;
    y[dir] += off;
    return fn(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12.0 * h);
}

struct Christoffel {
  std::array<Mat4, 4> gamma{};  // gamma[i][j][k] = Gamma^i_{jk}
};

inline Christoffel christoffel_fd(const MetricFn& metric, const std::array<double, 4>& x,
                                  double h) {
  std::array<Mat4, 4> dg{};  // dg[k][i][j] = d_k g_ij
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        dg[k][i][j] = fd_deriv([&](const std::array<double, 4>& y) { return metric(y)[i][j]; },
                               x, k, h);
  const Mat4 ginv = inverse4(metric(x));
  Christoffel c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l)
          acc += ginv[i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]);
        c.gamma[i][j][k] = 0.5 * acc;
      }
  return c;
}

inline CurvatureSample curvature_fd(const MetricFn& metric, const std::array<double, 4>& x,
                                    double h = 8e-3) {
  // Riemann R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
  //                   + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
  std::array<std::array<Mat4, 4>, 4> dGamma{};  // dGamma[k][i][j][l] = d_k Gamma^i_{jl}
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l)
          dGamma[k][i][j][l] = fd_deriv(
              [&](const std::array<double, 4>& y) { return christoffel_fd(metric, y, h).gamma[i][j][l]; },
              x, k, h);
  const Christoffel c0 = christoffel_fd(metric, x, h);
  const Mat4 g = metric(x);
  const Mat4 ginv = inverse4(g);

  double riem[4][4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double acc = dGamma[k][i][l][j] - dGamma[l][i][k][j];
          for (int m = 0; m < 4; ++m)
            acc += c0.gamma[i][k][m] * c0.gamma[m][l][j] -
                   c0.gamma[i][l][m] * c0.gamma[m][k][j];
          riem[i][j][k][l] = acc;
        }

  // all indices down
  double rm[4][4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double acc = 0.0;
          for (int m = 0; m < 4; ++m) acc += g[i][m] * riem[m][j][k][l];
          rm[i][j][k][l] = acc;
        }

  CurvatureSample out;
  out.g = g;
  for (int j = 0; j < 4; ++j)
    for (int l = 0; l < 4; ++l) {
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) acc += riem[i][j][i][l];
      out.ric[j][l] = acc;
    }
  for (int j = 0; j < 4; ++j)
    for (int l = 0; l < 4; ++l) out.R += ginv[j][l] * out.ric[j][l];

  // |E|^2 with E = Ric - R/4 g
  Mat4 e{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e[i][j] = out.ric[i][j] - 0.25 * out.R * g[i][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          out.E2 += ginv[i][k] * ginv[j][l] * e[i][j] * e[k][l];

  // |Rm|^2 and |W|^2 via the orthogonal decomposition
  auto kn = [&](const Mat4& A, const Mat4& B, int i, int j, int k, int l) {
    return A[i][k] * B[j][l] + A[j][l] * B[i][k] - A[i][l] * B[j][k] - A[j][k] * B[i][l];
  };
  double w2 = 0.0, rm2 = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const double w =
              rm[i][j][k][l] - 0.5 * kn(e, g, i, j, k, l) - out.R / 24.0 * kn(g, g, i, j, k, l);
          // raise all four indices
          double wu = 0.0, ru = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
              for (int cc = 0; cc < 4; ++cc)
                for (int dd = 0; dd < 4; ++dd) {
                  const double fac = ginv[i][a] * ginv[j][b] * ginv[k][cc] * ginv[l][dd];
                  const double wabcd = rm[a][b][cc][dd] - 0.5 * kn(e, g, a, b, cc, dd) -
                                       out.R / 24.0 * kn(g, g, a, b, cc, dd);
                  wu += fac * wabcd;
                  ru += fac * rm[a][b][cc][dd];
                }
          w2 += w * wu;
          rm2 += rm[i][j][k][l] * ru;
        }
  out.W2 = w2;
  out.Rm2 = rm2;
  return out;
}

}  // namespace oracle
