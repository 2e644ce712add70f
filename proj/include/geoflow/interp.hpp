#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace geoflow {

// Cubic spline through (x_i, y_i) with prescribed endpoint slopes (clamped)
// or natural second derivatives.  Knots must be strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;

  static CubicSpline natural(std::vector<double> x, std::vector<double> y) {
    return CubicSpline(std::move(x), std::move(y), false, 0.0, 0.0);
  }
  static CubicSpline clamped(std::vector<double> x, std::vector<double> y, double d0,
                             double d1) {
    return CubicSpline(std::move(x), std::move(y), true, d0, d1);
  }

  double operator()(double q) const {
    const std::size_t i = segment(q);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - q) / h;
    const double b = (q - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  double derivative(double q) const {
    const std::size_t i = segment(q);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - q) / h;
    const double b = (q - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
  }

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

 private:
  CubicSpline(std::vector<double> x, std::vector<double> y, bool clamp, double d0, double d1)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: bad input");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("CubicSpline: knots not increasing");
    // Solve the tridiagonal system for second derivatives m_.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hm = x_[i] - x_[i - 1];
      const double hp = x_[i + 1] - x_[i];
      a[i] = hm / 6.0;
      b[i] = (hm + hp) / 3.0;
      c[i] = hp / 6.0;
      r[i] = (y_[i + 1] - y_[i]) / hp - (y_[i] - y_[i - 1]) / hm;
    }
    if (clamp) {
      const double h0 = x_[1] - x_[0];
      b[0] = h0 / 3.0;
      c[0] = h0 / 6.0;
      r[0] = (y_[1] - y_[0]) / h0 - d0;
      const double h1 = x_[n - 1] - x_[n - 2];
      a[n - 1] = h1 / 6.0;
      b[n - 1] = h1 / 3.0;
      r[n - 1] = d1 - (y_[n - 1] - y_[n - 2]) / h1;
    } else {
      b[0] = 1.0;
      c[0] = 0.0;
      r[0] = 0.0;
      a[n - 1] = 0.0;
      b[n - 1] = 1.0;
      r[n - 1] = 0.0;
    }
    m_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  std::size_t segment(double q) const {
    if (q <= x_.front()) return 0;
    if (q >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), q);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  std::vector<double> x_, y_, m_;
};

// Monotone cubic interpolant (Fritsch-Carlson).  Used for map profiles where
// overshoot would break monotonicity.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: bad input");
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x_[i + 1] - x_[i];
      if (!(h > 0.0)) throw std::invalid_argument("MonotoneCubic: knots not increasing");
      d[i] = (y_[i + 1] - y_[i]) / h;
    }
    s_.assign(n, 0.0);
    s_[0] = d[0];
    s_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        s_[i] = 0.0;
      } else {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double w0 = 2.0 * h1 + h0;
        const double w1 = h1 + 2.0 * h0;
        s_[i] = (w0 + w1) / (w0 / d[i - 1] + w1 / d[i]);
      }
    }
    // Clip endpoint slopes to preserve monotonicity.
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      const double di = (i == 0) ? d[0] : d[n - 2];
      if (s_[i] * di <= 0.0)
        s_[i] = 0.0;
      else if (std::abs(s_[i]) > 3.0 * std::abs(di))
        s_[i] = 3.0 * di;
    }
  }

  double operator()(double q) const {
    const std::size_t i = segment(q);
    const double h = x_[i + 1] - x_[i];
    const double u = (q - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return y_[i] * (2 * u3 - 3 * u2 + 1) + h * s_[i] * (u3 - 2 * u2 + u) +
           y_[i + 1] * (-2 * u3 + 3 * u2) + h * s_[i + 1] * (u3 - u2);
  }

  double derivative(double q) const {
    const std::size_t i = segment(q);
    const double h = x_[i + 1] - x_[i];
    const double u = (q - x_[i]) / h;
    return (y_[i] * (6 * u * u - 6 * u) / h + s_[i] * (3 * u * u - 4 * u + 1) +
            y_[i + 1] * (-6 * u * u + 6 * u) / h + s_[i + 1] * (3 * u * u - 2 * u));
  }

 private:
  std::size_t segment(double q) const {
    if (q <= x_.front()) return 0;
    if (q >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), q);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  std::vector<double> x_, y_, s_;
};

// Fornberg weights for the m-th derivative at x0 from nodes xs.
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n + 1),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
              c1 *
              (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
               c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
              c2;
        c[static_cast<std::size_t>(i)][0] =
            -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
             k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
            c3;
      c[static_cast<std::size_t>(j)][0] *= c4 / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i)
    w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
  return w;
}

// First derivative of grid samples on a (possibly nonuniform) grid, 5-point
// Fornberg stencils, one-sided near the ends.
inline std::vector<double> grid_derivative(const std::vector<double>& x,
                                           const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 5) throw std::invalid_argument("grid_derivative: need at least 5 nodes");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::clamp(i - 2, 0, n - 5);
    std::vector<double> xs(x.begin() + lo, x.begin() + lo + 5);
    const auto w = fornberg_weights(x[static_cast<std::size_t>(i)], xs, 1);
    double acc = 0.0;
    for (int j = 0; j < 5; ++j)
      acc += w[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(lo + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace geoflow
