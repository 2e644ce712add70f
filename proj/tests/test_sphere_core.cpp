#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "geoflow/sphere.hpp"
#include "geoflow/zonal_field.hpp"
#include "oracle_helpers.hpp"

using namespace geoflow;

namespace {
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

TEST_CASE("geodesic distance on axis points") {
  const SpherePoint e1({1, 0, 0, 0, 0});
  const SpherePoint e2({0, 1, 0, 0, 0});
  CHECK(geodesic_distance(e1, e1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(geodesic_distance(e1, e1.antipode()) == Catch::Approx(kPi));
  CHECK(geodesic_distance(e1, e2) == Catch::Approx(kPi / 2));
  CHECK_THROWS_AS(SpherePoint({1.0, 1e-3, 0, 0, 0}), std::domain_error);
}

TEST_CASE("geodesic distance symmetry and triangle inequality") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 64; ++trial) {
    Vec5 a, b, c;
    for (int i = 0; i < 5; ++i) {
      a[i] = uniform01(rng) - 0.5;
      b[i] = uniform01(rng) - 0.5;
      c[i] = uniform01(rng) - 0.5;
    }
    const SpherePoint x(scale(1.0 / norm(a), a));
    const SpherePoint y(scale(1.0 / norm(b), b));
    const SpherePoint z(scale(1.0 / norm(c), c));
    CHECK(geodesic_distance(x, y) == Catch::Approx(geodesic_distance(y, x)));
    CHECK(geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12);
  }
}

TEST_CASE("log/exp/transport geometry") {
  const SpherePoint x = SpherePoint::on_meridian(0.7);
  const SpherePoint y = SpherePoint::at(1.9, 0.8);
  const Vec5 v = log_map(x, y);
  CHECK(norm(v) == Catch::Approx(geodesic_distance(x, y)));
  CHECK(std::abs(dot(v, x.coords())) < 1e-13);
  const SpherePoint back = exp_map(x, v);
  CHECK(geodesic_distance(back, y) < 1e-12);

  const Vec5 u = x.meridian_tangent();
  const Vec5 ut = parallel_transport(x, y, u);
  CHECK(norm(ut) == Catch::Approx(norm(u)).epsilon(1e-12));
  CHECK(std::abs(dot(ut, y.coords())) < 1e-12);
}

TEST_CASE("quadrature weights integrate zonal moments") {
  auto grid = ThetaGrid::make(256, 64);

  double wsum = 0.0;
  for (int i = 0; i < grid->size(); ++i) {
    CHECK(grid->weight(i) > 0.0);
    wsum += grid->weight(i);
  }
  CHECK(wsum == Catch::Approx(kSphereVolume).margin(1e-10));

  const auto one = ZonalField::constant(grid, 1.0);
  CHECK(zonal_quadrature(one) == Catch::Approx(kSphereVolume).margin(1e-10));

  const auto cosf = ZonalField::from_function(grid, [](double th) { return std::cos(th); }, 8);
  CHECK(zonal_quadrature(cosf) == Catch::Approx(0.0).margin(1e-12));

  const auto cos2 = ZonalField::from_function(grid, [](double th) { return std::pow(std::cos(th), 2); }, 8);
  const double ref2 = oracle::zonal_integral_reference([](double th) { return std::pow(std::cos(th), 2); });
  CHECK(zonal_quadrature(cos2) == Catch::Approx(8.0 * kPi * kPi / 15.0).margin(1e-10));
  CHECK(zonal_quadrature(cos2) == Catch::Approx(ref2).margin(1e-9));

  for (int m = 3; m <= 10; ++m) {
    const auto f = ZonalField::from_function(
        grid, [m](double th) { return std::pow(std::cos(th), 2 * m); }, 2 * m);
    const double ref = oracle::zonal_integral_reference(
        [m](double th) { return std::pow(std::cos(th), 2 * m); });
    CHECK(zonal_quadrature(f) == Catch::Approx(ref).margin(1e-9));
  }
}

TEST_CASE("zonal basis is orthonormal") {
  auto grid = ThetaGrid::make(256, 64);
  for (int j = 0; j <= 64; j += 7) {
    for (int k = j; k <= 64; k += 9) {
      double acc = 0.0;
      for (int i = 0; i < grid->size(); ++i) acc += grid->weight(i) * grid->Z(i, j) * grid->Z(i, k);
      CHECK(acc == Catch::Approx(j == k ? 1.0 : 0.0).margin(1e-10));
    }
  }
}

TEST_CASE("zonal transform examples and roundtrip") {
  auto grid = ThetaGrid::make(256, 64);

  const auto one = ZonalField::constant(grid, 1.0);
  const auto c1 = grid->coeffs_of(one.samples(), 8);
  CHECK(c1[0] == Catch::Approx(std::sqrt(kSphereVolume)));  // <1, Z_0> = vol * Z_0
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(c1[static_cast<std::size_t>(k)]) < 1e-12);

  // f = Z_1 comes back as the unit coefficient vector at k = 1
  std::vector<double> z1(static_cast<std::size_t>(grid->size()));
  for (int i = 0; i < grid->size(); ++i) z1[static_cast<std::size_t>(i)] = grid->Z(i, 1);
  const auto cz = grid->coeffs_of(z1, 16);
  for (int k = 0; k <= 16; ++k)
    CHECK(cz[static_cast<std::size_t>(k)] == Catch::Approx(k == 1 ? 1.0 : 0.0).margin(1e-12));

  // random band-limited roundtrip + Parseval
  std::mt19937_64 rng(7);
  std::vector<double> coeffs(65, 0.0);
  for (int k = 0; k <= 64; ++k) coeffs[static_cast<std::size_t>(k)] = 2.0 * uniform01(rng) - 1.0;
  const auto f = ZonalField::from_coeffs(grid, coeffs);
  const auto c2 = grid->coeffs_of(f.samples(), 64);
  double err = 0.0, parseval = 0.0;
  for (int k = 0; k <= 64; ++k) {
    err = std::max(err, std::abs(c2[static_cast<std::size_t>(k)] - coeffs[static_cast<std::size_t>(k)]));
    parseval += coeffs[static_cast<std::size_t>(k)] * coeffs[static_cast<std::size_t>(k)];
  }
  CHECK(err < 1e-9);
  const double l2sq = f.l2() * f.l2();
  CHECK(l2sq == Catch::Approx(parseval).epsilon(1e-9));

  CHECK_THROWS_AS(grid->coeffs_of(f.samples(), 200), std::domain_error);
}

TEST_CASE("zonal laplacian matches eigenvalues and difference oracle") {
  auto grid = ThetaGrid::make(256, 64);

  const auto one = ZonalField::constant(grid, 1.0);
  CHECK(laplacian_zonal(one).linf() < 1e-12);

  const auto cosf = ZonalField::from_function(grid, [](double th) { return std::cos(th); }, 8);
  const auto lap = laplacian_zonal(cosf);
  for (int i = 0; i < grid->size(); i += 17)
    CHECK(lap[i] == Catch::Approx(-4.0 * std::cos(grid->theta(i))).margin(1e-10));

  // k = 2: lambda = 10, checked against the radial finite-difference form
  std::vector<double> z2(static_cast<std::size_t>(grid->size()));
  for (int i = 0; i < grid->size(); ++i) z2[static_cast<std::size_t>(i)] = grid->Z(i, 2);
  const auto f2 = ZonalField::from_samples(grid, z2, 8);
  const auto lap2 = laplacian_zonal(f2);
  auto z2fn = [&](double th) { return f2.eval(th); };
  for (double th : {0.6, 1.2, 2.1, 2.8}) {
    const double fd = oracle::zonal_laplacian_fd(z2fn, th);
    CHECK(fd == Catch::Approx(-10.0 * f2.eval(th)).margin(1e-5));
  }
  for (int i = 0; i < grid->size(); i += 23)
    CHECK(lap2[i] == Catch::Approx(-10.0 * f2[i]).margin(1e-10));
}

TEST_CASE("spectral theta derivatives agree with difference quotients") {
  auto grid = ThetaGrid::make(128, 32);
  std::mt19937_64 rng(11);
  std::vector<double> coeffs(21, 0.0);
  for (int k = 0; k <= 20; ++k)
    coeffs[static_cast<std::size_t>(k)] = (2.0 * uniform01(rng) - 1.0) / (1.0 + k * k);
  const auto f = ZonalField::from_coeffs(grid, coeffs);
  const auto d = spectral_t_derivatives(f);
  const double h = 1e-5;
  for (int i = 10; i < grid->size(); i += 13) {
    const double th = grid->theta(i);
    const double fd1 = (f.eval(th + h) - f.eval(th - h)) / (2 * h);
    const double fd2 = (f.eval(th + h) - 2 * f.eval(th) + f.eval(th - h)) / (h * h);
    const double st = std::sin(th), ct = std::cos(th);
    const double s1 = -st * d.dFdt[static_cast<std::size_t>(i)];
    const double s2 = -ct * d.dFdt[static_cast<std::size_t>(i)] +
                      st * st * d.d2Fdt2[static_cast<std::size_t>(i)];
    CHECK(s1 == Catch::Approx(fd1).margin(1e-8));
    CHECK(s2 == Catch::Approx(fd2).margin(1e-5));
  }
}

TEST_CASE("bump profile plateau, support and smooth monotone glue") {
  CHECK(bump_psi(0.2) == 1.0);
  CHECK(bump_psi(-0.2) == 1.0);
  CHECK(bump_psi(0.6) == 0.0);
  CHECK(bump_psi(0.25) == Catch::Approx(1.0));
  CHECK(bump_psi(0.5) == Catch::Approx(0.0).margin(1e-15));

  double prev = 1.0, max_slope = 0.0;
  const int n = 4000;
  for (int i = 1; i <= n; ++i) {
    const double x = 0.25 + 0.25 * static_cast<double>(i) / n;
    const double v = bump_psi(x);
    CHECK(v <= prev + 1e-14);  // psi' <= 0 on the transition
    max_slope = std::max(max_slope, (prev - v) / (0.25 / n));
    prev = v;
  }
  CHECK(max_slope < 20.0);  // all derivatives bounded; slope stays O(1)
}
