#include "nlcs/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "nlcs/errors.hpp"

namespace nlcs::kernels {

namespace {

using index_t = std::int64_t;

inline double toeplitz_row(std::span<const double> density,
                           std::span<const double> w, index_t i) {
  const auto n = static_cast<index_t>(density.size());
  double acc = 0.0;
  for (index_t j = 0; j < n; ++j) {
    const index_t off = i >= j ? i - j : j - i;
    acc += w[static_cast<std::size_t>(off)] * density[static_cast<std::size_t>(j)];
  }
  return acc;
}

inline cplx trig_point(std::span<const cplx> a, const PeriodicGrid& grid,
                       double p, cplx outside) {
  const double s = p - grid.origin;
  if (s < 0.0 || s >= grid.length) return outside;
  const auto n = static_cast<index_t>(grid.n);
  const double dxi = kTwoPi / grid.length;
  // Modes k = -(n/2 - 1) .. (n/2 - 1) by recurrence; the Nyquist mode of an
  // even-length grid is split symmetrically (a cosine).
  const index_t kmax = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
  const cplx step = std::polar(1.0, dxi * s);
  cplx e = std::polar(1.0, -dxi * s * static_cast<double>(kmax));
  cplx acc{0.0, 0.0};
  for (index_t k = -kmax; k <= kmax; ++k) {
    const index_t bin = k < 0 ? k + n : k;
    acc += a[static_cast<std::size_t>(bin)] * e;
    e *= step;
  }
  if (n % 2 == 0) {
    acc += a[static_cast<std::size_t>(n / 2)] *
           std::cos(dxi * s * static_cast<double>(n / 2));
  }
  return acc;
}

inline cplx rotated(cplx v, double dt, double g) {
  return v * std::polar(1.0, -dt * g);
}

inline double density_point(cplx v, int power, double coefficient) {
  const double r = std::norm(v);
  double p = 1.0;
  for (int q = 0; q < power; ++q) p *= r;
  return coefficient * p;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(what);
}

}  // namespace

void toeplitz_convolution(std::span<const double> density,
                          std::span<const double> weights_by_offset,
                          std::span<double> out) {
  check_sizes(density.size(), out.size(), "toeplitz_convolution: output size");
  if (weights_by_offset.size() < density.size())
    throw DomainError("toeplitz_convolution: weight table too short");
  const auto n = static_cast<index_t>(density.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = toeplitz_row(density, weights_by_offset, i);
}

void trig_interpolate(std::span<const cplx> coefficients, const PeriodicGrid& grid,
                      std::span<const double> points, std::span<cplx> out,
                      cplx outside) {
  check_sizes(coefficients.size(), grid.n, "trig_interpolate: coefficient size");
  check_sizes(points.size(), out.size(), "trig_interpolate: output size");
  const auto m = static_cast<index_t>(points.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < m; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out[ii] = trig_point(coefficients, grid, points[ii], outside);
  }
}

void rotate_phase(std::span<cplx> field, std::span<const double> potential, double dt) {
  check_sizes(field.size(), potential.size(), "rotate_phase: size");
  const auto n = static_cast<index_t>(field.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    field[ii] = rotated(field[ii], dt, potential[ii]);
  }
}

void density_power(std::span<const cplx> field, int power, double coefficient,
                   std::span<double> out) {
  check_sizes(field.size(), out.size(), "density_power: size");
  const auto n = static_cast<index_t>(field.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out[ii] = density_point(field[ii], power, coefficient);
  }
}

namespace reference {

void toeplitz_convolution(std::span<const double> density,
                          std::span<const double> weights_by_offset,
                          std::span<double> out) {
  check_sizes(density.size(), out.size(), "toeplitz_convolution: output size");
  if (weights_by_offset.size() < density.size())
    throw DomainError("toeplitz_convolution: weight table too short");
  for (std::size_t i = 0; i < density.size(); ++i)
    out[i] = toeplitz_row(density, weights_by_offset, static_cast<index_t>(i));
}

void trig_interpolate(std::span<const cplx> coefficients, const PeriodicGrid& grid,
                      std::span<const double> points, std::span<cplx> out,
                      cplx outside) {
  check_sizes(coefficients.size(), grid.n, "trig_interpolate: coefficient size");
  check_sizes(points.size(), out.size(), "trig_interpolate: output size");
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = trig_point(coefficients, grid, points[i], outside);
}

void rotate_phase(std::span<cplx> field, std::span<const double> potential, double dt) {
  check_sizes(field.size(), potential.size(), "rotate_phase: size");
  for (std::size_t i = 0; i < field.size(); ++i)
    field[i] = rotated(field[i], dt, potential[i]);
}

void density_power(std::span<const cplx> field, int power, double coefficient,
                   std::span<double> out) {
  check_sizes(field.size(), out.size(), "density_power: size");
  for (std::size_t i = 0; i < field.size(); ++i)
    out[i] = density_point(field[i], power, coefficient);
}

}  // namespace reference

}  // namespace nlcs::kernels
