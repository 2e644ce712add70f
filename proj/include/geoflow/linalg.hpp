#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace geoflow {

// Dense LU solve with partial pivoting; adequate for the 1D elliptic systems
// here (n <= 1024).
class DenseLU {
 public:
  explicit DenseLU(std::vector<double> a, int n) : n_(n), a_(std::move(a)), piv_(static_cast<std::size_t>(n)) {
    for (int col = 0; col < n_; ++col) {
      int piv = col;
      for (int r = col + 1; r < n_; ++r)
        if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
      piv_[static_cast<std::size_t>(col)] = piv;
      if (piv != col)
        for (int j = 0; j < n_; ++j) std::swap(at(col, j), at(piv, j));
      const double d = at(col, col);
      if (d == 0.0) throw std::runtime_error("DenseLU: singular matrix");
      for (int r = col + 1; r < n_; ++r) {
        const double f = at(r, col) / d;
        at(r, col) = f;
        for (int j = col + 1; j < n_; ++j) at(r, j) -= f * at(col, j);
      }
    }
  }

  std::vector<double> solve(std::vector<double> rhs) const {
    // rows were swapped wholesale during factorization, so P A = L U; apply
    // all interchanges to the right-hand side first, then the clean
    // triangular solves.
    for (int col = 0; col < n_; ++col) {
      const int piv = piv_[static_cast<std::size_t>(col)];
      if (piv != col) std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
    }
    for (int col = 0; col < n_; ++col)
      for (int r = col + 1; r < n_; ++r)
        rhs[static_cast<std::size_t>(r)] -= at(r, col) * rhs[static_cast<std::size_t>(col)];
    for (int r = n_ - 1; r >= 0; --r) {
      for (int j = r + 1; j < n_; ++j) rhs[static_cast<std::size_t>(r)] -= at(r, j) * rhs[static_cast<std::size_t>(j)];
      rhs[static_cast<std::size_t>(r)] /= at(r, r);
    }
    return rhs;
  }

 private:
  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c)]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c)]; }

  int n_;
  std::vector<double> a_;
  std::vector<int> piv_;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int count = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LinearFit f;
  f.count = static_cast<int>(x.size());
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  const double ssr = syy - sy * sy / n;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  f.r2 = (ssr > 0) ? 1.0 - sse / ssr : 1.0;
  return f;
}

}  // namespace geoflow
