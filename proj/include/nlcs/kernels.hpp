#pragma once

// Data-parallel inner loops shared by the solvers.
//
// Every kernel exists twice: the OpenMP version in nlcs::kernels and a plain
// serial loop in nlcs::kernels::reference. The two are required to agree
// bit for bit (each output element is computed by the same serial
// arithmetic); tests and the benchmark target compare them.

#include <span>

#include "nlcs/grid.hpp"

namespace nlcs::kernels {

/// out_i = sum_j weights[|i - j|] * density_j  (symmetric Toeplitz product).
void toeplitz_convolution(std::span<const double> density,
                          std::span<const double> weights_by_offset,
                          std::span<double> out);

/// Evaluates the trigonometric interpolant of `coefficients` (forward FFT of
/// samples on `grid`, divided by n) at arbitrary points. Points outside
/// [origin, origin + length) yield `outside` instead of the periodic image.
void trig_interpolate(std::span<const cplx> coefficients, const PeriodicGrid& grid,
                      std::span<const double> points, std::span<cplx> out,
                      cplx outside = cplx{0.0, 0.0});

/// field_j *= exp(-i * dt * potential_j).
void rotate_phase(std::span<cplx> field, std::span<const double> potential, double dt);

/// out_j = coefficient * |field_j|^(2 * power).
void density_power(std::span<const cplx> field, int power, double coefficient,
                   std::span<double> out);

namespace reference {

void toeplitz_convolution(std::span<const double> density,
                          std::span<const double> weights_by_offset,
                          std::span<double> out);
void trig_interpolate(std::span<const cplx> coefficients, const PeriodicGrid& grid,
                      std::span<const double> points, std::span<cplx> out,
                      cplx outside = cplx{0.0, 0.0});
void rotate_phase(std::span<cplx> field, std::span<const double> potential, double dt);
void density_power(std::span<const cplx> field, int power, double coefficient,
                   std::span<double> out);

}  // namespace reference

}  // namespace nlcs::kernels
