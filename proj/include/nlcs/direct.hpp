#pragma once

// Full-scale solver for
//   i eps psi_t = -eps^2/2 psi_xx + V(x/eps) psi + eps^alpha f(psi) psi
// on a periodic box holding a whole number of potential periods (d = 1).

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nlcs/bloch.hpp"
#include "nlcs/grid.hpp"
#include "nlcs/nonlinearity.hpp"

namespace nlcs {

inline constexpr int kMinPointsPerPeriod = 16;

struct FieldState {
  double epsilon = 1.0;
  PeriodicGrid grid;
  ComplexField values;
  double t = 0.0;

  double mass() const;
  /// Throws ConfigurationError unless n_x is a power of two, the box holds a
  /// whole number of periods eps * a and each period has at least 16 nodes.
  void validate(double period) const;
};

/// Centered x-grid with `periods` cells of length eps * a and
/// `points_per_period` nodes per cell.
PeriodicGrid field_grid(double epsilon, double period, std::size_t periods,
                        std::size_t points_per_period);

/// Same, from a box length (must be an integer multiple of eps * a).
PeriodicGrid field_grid_for_length(double epsilon, double period, double length,
                                   std::size_t points_per_period);

/// V(x_j / eps) on the grid, from the Fourier series of the potential.
RealField sample_potential(const PeriodicPotential& potential, double period,
                           const PeriodicGrid& grid, double epsilon);

struct DirectDiagnostics {
  std::size_t steps = 0;
  double initial_mass = 0.0;
  double final_mass = 0.0;
  std::vector<std::pair<double, double>> mass_log;  // (t, mass) per advance
  std::vector<std::string> warnings;

  double relative_mass_drift() const;
};

class DirectSolver {
 public:
  DirectSolver(FieldState initial, const BlochProblem& problem, NonlinearitySpec spec);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Fused Strang steps of size at most dt ending exactly at t_end.
  /// Throws BlowupError when the field stops being finite.
  void advance_to(double t_end, double dt);

  const FieldState& state() const { return state_; }
  const DirectDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  void total_phase(std::span<double> out) const;

  struct Impl;
  FieldState state_;
  NonlinearitySpec spec_;
  DirectDiagnostics diagnostics_;
  std::unique_ptr<Impl> impl_;
};

FieldState evolve_direct(const FieldState& state, const BlochProblem& problem,
                         const NonlinearitySpec& spec, double dt, double t_end,
                         DirectDiagnostics* diagnostics = nullptr);

/// Default time step c * eps.
inline double default_direct_dt(double epsilon, double c = 0.05) { return c * epsilon; }

/// (K * |psi|^2)(x_j) by quadrature on the field grid. Homogeneous kernels use
/// the corrected power-law rule, smooth kernels the trapezoid rule on the
/// sampled kernel. `fast` selects the FFT evaluation of the same sums.
RealField nonlocal_term(const FieldState& state, const NonlinearitySpec& spec,
                        bool fast = true, std::vector<std::string>* warnings = nullptr);

/// Trapezoid quadrature against an arbitrary even kernel (O(n^2)).
RealField nonlocal_term(const FieldState& state, const std::function<double(double)>& kernel);

}  // namespace nlcs
