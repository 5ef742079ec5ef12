#pragma once

// Band-Hamiltonian flow  q' = E_m'(p),  p' = -V_x(t, q)  with the action
// S' = p E_m'(p) - E_m(p) - V(t, q), integrated by classical RK4 (d = 1).

#include <functional>
#include <vector>

#include "nlcs/bloch.hpp"

namespace nlcs {

/// Periodic cubic spline through equispaced samples on [x0, x0 + period).
class PeriodicSpline {
 public:
  PeriodicSpline(double x0, double period, std::vector<double> values);

  double operator()(double x) const;
  double derivative(double x) const;
  double period() const { return period_; }

 private:
  std::size_t locate(double x, double& s) const;

  double x0_, period_, h_;
  std::vector<double> y_, m_;  // values and second derivatives at the knots
};

/// Trigonometric interpolant through equispaced samples of a periodic
/// function (spectrally accurate for analytic data, smooth everywhere).
class PeriodicTrigInterpolant {
 public:
  PeriodicTrigInterpolant(double x0, double period, const std::vector<double>& values);

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double x0_, period_;
  std::vector<double> cos_, sin_;  // cos_[0] is the mean; last cos_ term is the Nyquist mode
};

enum class BandInterpolation { cubic_spline, trigonometric };

/// E_m(k), E_m'(k) and the gap to the neighbouring bands along a 1D path.
struct BandFunction {
  std::function<double(double)> energy;
  std::function<double(double)> velocity;
  std::function<double(double)> gap;
  /// Smallest gap on the segment between two momenta.
  std::function<double(double, double)> min_gap;
};

/// E(k) = k^2 / 2 on the whole line, no neighbours (gap = +inf).
BandFunction free_band();

/// Band m sampled at `points` k-values across the Brillouin zone, energy and
/// velocity from a periodic interpolant, gap linearly interpolated. The cubic
/// spline is only C^2, which caps RK4 convergence once the integrator error
/// drops to the spline error; the trigonometric interpolant has no such floor
/// while the band stays isolated.
BandFunction sampled_band(const BlochProblem& problem, int band, int points = 256,
                          BandInterpolation method = BandInterpolation::cubic_spline);

struct ExternalPotential {
  std::function<double(double, double)> value;     // V(t, x)
  std::function<double(double, double)> gradient;  // dV/dx(t, x)
  bool time_independent = true;

  static ExternalPotential zero();
  static ExternalPotential linear(double slope);
  /// omega^2 x^2 / 2.
  static ExternalPotential harmonic(double omega = 1.0);
};

struct Trajectory {
  std::vector<double> t, q, p, S;

  std::size_t size() const { return t.size(); }
  /// Phi(t_i, x) = S(t_i) + p(t_i) (x - q(t_i)).
  double phase(std::size_t i, double x) const { return S[i] + p[i] * (x - q[i]); }
};

/// RK4 from (q0, p0, 0) to T with steps <= dt. Throws NearDegeneracyError
/// when the band gap at p(t) drops below gap_tolerance.
Trajectory classical_trajectory(const BandFunction& band, const ExternalPotential& potential,
                                double q0, double p0, double T, double dt,
                                double gap_tolerance = kDefaultGapTolerance);

/// h(p, q) = E(p) + V(t, q) along the samples.
std::vector<double> trajectory_energy(const Trajectory& traj, const BandFunction& band,
                                      const ExternalPotential& potential);

}  // namespace nlcs
