#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace nlcs {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid x_j = origin + j * spacing(), j = 0..n-1.
struct PeriodicGrid {
  double origin = 0.0;
  double length = 1.0;
  std::size_t n = 0;

  /// Centered grid covering [-length/2, length/2).
  static PeriodicGrid centered(double length, std::size_t n) {
    return PeriodicGrid{-0.5 * length, length, n};
  }

  double spacing() const { return length / static_cast<double>(n); }
  double point(std::size_t j) const {
    return origin + static_cast<double>(j) * spacing();
  }
  std::vector<double> points() const;

  /// Angular wavenumber of FFT bin j (standard FFT ordering).
  double wavenumber(std::size_t j) const;
  std::vector<double> wavenumbers() const;

  bool same_as(const PeriodicGrid& other, double rel_tol = 1e-12) const;
};

bool is_power_of_two(std::size_t n);

/// Discrete L2 norm with trapezoid weight (exact for the periodic rule).
double l2_norm(std::span<const cplx> values, double spacing);
double sup_norm(std::span<const cplx> values);

}  // namespace nlcs
