#pragma once

// Homogenized envelope model: parameters, existence classification and the
// split-step propagator for
//   i u_t + 1/2 div(M grad u) = G[u] u,
// with G = lambda_m |u|^(2 sigma), lambda (|z|^mu * |u|^2) or K(0) ||u0||^2.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlcs/bloch.hpp"
#include "nlcs/grid.hpp"
#include "nlcs/nonlinearity.hpp"

namespace nlcs {

enum class Regime { critical, supercritical };
enum class ExistenceClass { global, possible_blowup, unknown };

std::string to_string(Regime r);
std::string to_string(ExistenceClass c);

struct EffectiveParams {
  Eigen::MatrixXd mass_tensor;  // Hessian of E_m at p0
  double coupling = 0.0;        // lambda_m (local nonlinearities)
  NonlinearitySpec nonlinearity;
  Regime regime = Regime::critical;

  /// 1D envelope parameters with an explicit mass and coupling.
  static EffectiveParams one_dimensional(double mass, double coupling,
                                         NonlinearitySpec nonlinearity);
};

/// lambda times the cell average of |chi_m|^(2 sigma + 2), evaluated on a
/// periodic y-grid with `points_per_axis` nodes (at least 8 (2N + 1)).
double effective_coupling(const BlochEigenpair& pair, int sigma, double lambda,
                          int points_per_axis = 0);

EffectiveParams effective_params(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 const BlochProblem& problem,
                                 const NonlinearitySpec& spec,
                                 double gap_tolerance = kDefaultGapTolerance);

ExistenceClass classify_global_existence(const EffectiveParams& params);

struct EnvelopeState {
  PeriodicGrid grid;
  ComplexField values;
  double t = 0.0;

  double mass() const;  // ||u||_{L^2}^2
  double norm() const;  // ||u||_{L^2}
  void validate() const;
};

EnvelopeState sample_envelope(const PeriodicGrid& grid,
                              const std::function<cplx(double)>& profile);
EnvelopeState gaussian_envelope(const PeriodicGrid& grid, double width = 1.0,
                                double amplitude = 1.0);
EnvelopeState sech_envelope(const PeriodicGrid& grid, double amplitude = 1.0);

struct EnvelopeOptions {
  /// Abort when sup|u| exceeds this multiple of its initial value.
  double blowup_threshold = 1e6;
  /// Abort when this fraction of the spectral mass sits in the top third of
  /// the resolved wavenumbers (the discrete solution can no longer follow a
  /// concentrating profile).
  double spectral_tail_tolerance = 1e-6;
  /// Warn when |u| at the box edge exceeds this value.
  double boundary_tolerance = 1e-10;
};

struct EnvelopeDiagnostics {
  double initial_sup = 0.0;
  double max_sup = 0.0;
  double initial_mass = 0.0;
  double final_mass = 0.0;
  std::size_t steps = 0;
  std::vector<double> sample_times;
  std::vector<double> sup_history;
  std::vector<std::string> warnings;

  double relative_mass_drift() const;
};

/// Owns one envelope and advances it with Strang splitting.
class EnvelopeSolver {
 public:
  EnvelopeSolver(EnvelopeState initial, EffectiveParams params,
                 EnvelopeOptions options = {});
  ~EnvelopeSolver();
  EnvelopeSolver(EnvelopeSolver&&) noexcept;
  EnvelopeSolver& operator=(EnvelopeSolver&&) noexcept;

  /// Advances to t_end with steps no larger than dt (the last one shortened
  /// so that t_end is hit exactly). Throws BlowupError.
  void advance_to(double t_end, double dt);

  const EnvelopeState& state() const { return state_; }
  const EnvelopeDiagnostics& diagnostics() const { return diagnostics_; }
  const EffectiveParams& params() const { return params_; }

 private:
  void step(double dt);
  void nonlinear_potential(std::span<double> out) const;
  void check_blowup(double spectral_tail);

  struct Impl;
  EnvelopeState state_;
  EffectiveParams params_;
  EnvelopeOptions options_;
  EnvelopeDiagnostics diagnostics_;
  double smooth_shift_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

EnvelopeState evolve_envelope(const EnvelopeState& state, const EffectiveParams& params,
                              double dt, double t_end, const EnvelopeOptions& options = {},
                              EnvelopeDiagnostics* diagnostics = nullptr);

/// v = u exp(i t K0 mass0), mass0 = ||u0||^2. Removes the constant potential
/// of the smooth-kernel envelope equation.
EnvelopeState gauge_away_constant(const EnvelopeState& state, double k0, double mass0);

/// (|z|^mu * u_sq)(z_i) by corrected punctured-trapezoid quadrature on the
/// grid nodes (non-periodic distances). Appends a warning when u_sq does not
/// decay to 1e-12 at the grid ends.
RealField convolution_homogeneous(std::span<const double> u_sq, const PeriodicGrid& grid,
                                  double mu, std::vector<std::string>* warnings = nullptr);

}  // namespace nlcs
