#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "geoflow/gegenbauer.hpp"

namespace geoflow {

// Fixed Gauss-Legendre rule on [-1,1], cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gl_rule(int order) {
  static thread_local std::vector<std::pair<std::vector<double>, std::vector<double>>> cache;
  if (order >= static_cast<int>(cache.size())) cache.resize(static_cast<std::size_t>(order) + 1);
  auto& slot = cache[static_cast<std::size_t>(order)];
  if (slot.first.empty()) gauss_legendre(order, slot.first, slot.second);
  return slot;
}

template <class Fn>
double gl_integrate(Fn&& fn, double a, double b, int order) {
  const auto& rule = gl_rule(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.first.size(); ++i)
    acc += rule.second[i] * fn(mid + half * rule.first[i]);
  return acc * half;
}

// Composite rule over explicit panel boundaries.
template <class Fn>
double panels_integrate(Fn&& fn, const std::vector<double>& edges, int order) {
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p)
    acc += gl_integrate(fn, edges[p], edges[p + 1], order);
  return acc;
}

// Panel edges on [a,b] refined geometrically toward the endpoint `toward`
// (useful for integrable endpoint singularities), with `levels` halvings.
inline std::vector<double> graded_edges(double a, double b, double toward, int levels) {
  std::vector<double> e;
  const bool at_left = std::abs(toward - a) < std::abs(toward - b);
  double len = b - a;
  e.push_back(at_left ? b : a);
  double frac = 1.0;
  for (int j = 0; j < levels; ++j) {
    frac *= 0.5;
    e.push_back(at_left ? a + frac * len : b - frac * len);
  }
  e.push_back(at_left ? a : b);
  if (at_left)
    std::reverse(e.begin(), e.end());
  return e;
}

// Uniform panel edges.
inline std::vector<double> uniform_edges(double a, double b, int panels) {
  std::vector<double> e(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i)
    e[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / panels;
  return e;
}

}  // namespace geoflow
