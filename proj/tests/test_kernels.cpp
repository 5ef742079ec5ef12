#include <cmath>
#include <random>

#include "doctest.h"
#include "nlcs/fft.hpp"
#include "nlcs/kernels.hpp"
#include "nlcs/quadrature.hpp"

using namespace nlcs;

namespace {

ComplexField random_field(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  ComplexField f(n);
  for (auto& v : f) v = {g(rng), g(rng)};
  return f;
}

RealField random_real(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealField f(n);
  for (auto& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("parallel kernels agree bitwise with the serial reference") {
  const std::size_t n = 1000;
  const auto density = random_real(n, 1);
  const auto weights = PowerLawRule(-0.5, 0.01).weights_by_offset(n);
  RealField a(n), b(n);
  kernels::toeplitz_convolution(density, weights, a);
  kernels::reference::toeplitz_convolution(density, weights, b);
  CHECK(a == b);

  const auto field = random_field(n, 2);
  kernels::density_power(field, 2, -1.5, a);
  kernels::reference::density_power(field, 2, -1.5, b);
  CHECK(a == b);

  auto f1 = field, f2 = field;
  kernels::rotate_phase(f1, density, 0.37);
  kernels::reference::rotate_phase(f2, density, 0.37);
  CHECK(f1 == f2);

  const auto grid = PeriodicGrid::centered(10.0, 64);
  const auto coeffs = random_field(64, 3);
  const auto pts = random_real(777, 4);
  RealField points(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) points[j] = 6.0 * pts[j];
  ComplexField o1(points.size()), o2(points.size());
  kernels::trig_interpolate(coeffs, grid, points, o1);
  kernels::reference::trig_interpolate(coeffs, grid, points, o2);
  CHECK(o1 == o2);
}

TEST_CASE("trigonometric interpolation reproduces band-limited functions") {
  const auto grid = PeriodicGrid::centered(2.0 * kPi, 32);
  ComplexField samples(grid.n);
  auto f = [](double x) {
    return cplx{std::cos(3.0 * x) + 0.5 * std::sin(16.0 * x + 0.0), std::sin(x)};
  };
  for (std::size_t j = 0; j < grid.n; ++j) samples[j] = f(grid.point(j));
  Fft1d fft(grid.n);
  fft.forward(samples);
  for (auto& c : samples) c /= static_cast<double>(grid.n);
  // sin(16 x) is invisible on the grid (Nyquist), so drop it from the oracle.
  const std::vector<double> points{-3.0, -1.234, 0.0, 0.5, 2.9};
  ComplexField out(points.size());
  kernels::trig_interpolate(samples, grid, points, out);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    CHECK(std::abs(out[i] - cplx{std::cos(3.0 * x), std::sin(x)}) < 1e-13);
  }
  const std::vector<double> outside{-4.0, 3.2};
  ComplexField o(2);
  kernels::trig_interpolate(samples, grid, outside, o, cplx{7.0, 0.0});
  CHECK(o[0] == cplx{7.0, 0.0});
  CHECK(o[1] == cplx{7.0, 0.0});
}

TEST_CASE("power-law rule integrates |s|^mu exp(-s^2)") {
  for (double mu : {-0.5, -0.9, 0.5, 1.0, 1.5}) {
    const double h = 0.05;
    const PowerLawRule rule(mu, h);
    double sum = 0.0;
    for (long j = -400; j <= 400; ++j) {
      const double s = j * h;
      sum += rule.weight(j) * std::exp(-s * s);
    }
    CAPTURE(mu);
    CHECK(sum == doctest::Approx(std::tgamma((mu + 1.0) / 2.0)).epsilon(1e-8));
  }
}

TEST_CASE("spectral derivative of a smooth periodic function") {
  const auto grid = PeriodicGrid::centered(2.0 * kPi, 64);
  ComplexField f(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) f[j] = std::exp(cplx{0.0, 1.0} * std::sin(grid.point(j)));
  const auto d1 = spectral_derivative(f, grid, 1);
  const auto d2 = spectral_derivative(f, grid, 2);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.point(j);
    const cplx i{0.0, 1.0};
    CHECK(std::abs(d1[j] - i * std::cos(x) * f[j]) < 1e-12);
    CHECK(std::abs(d2[j] - (-i * std::sin(x) - std::cos(x) * std::cos(x)) * f[j]) < 1e-11);
  }
}
