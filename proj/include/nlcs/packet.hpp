#pragma once

// Coherent-state ansatz
//   psi_app = eps^{-1/4} (U0 + sqrt(eps) U1 + eps U2)(t, (x - q(t))/sqrt(eps), x/eps) e^{i phi/eps}
// with U0 = u chi_m, U1 = -i dk chi_m u_z and U2 from the third hierarchy
// equation, for d = 1.

#include <memory>

#include "nlcs/bloch.hpp"
#include "nlcs/direct.hpp"
#include "nlcs/effective.hpp"

namespace nlcs {

struct PacketSpec {
  int band = 0;
  double p0 = 0.0;
  double q0 = 0.0;
  double epsilon = 1.0 / 16;
};

enum class PacketOrder { leading, first, second };

struct HierarchyResiduals {
  double first = 0.0;   // max_z ||L0 U0||
  double second = 0.0;  // max_z ||L0 U1 + L1 U0||
  double third = 0.0;   // max_z ||L0 U2 + L1 U1 + L2 U0 + N(U0)||
  double orthogonality_u1 = 0.0;  // max_z |<chi, U1>|
  double orthogonality_u2 = 0.0;  // max_z |<chi, U2>|
};

/// Band data at (m, p0) needed to assemble packets: gauge-fixed Bloch pair,
/// group velocity, d chi/dk, effective parameters and the two profiles that
/// make up U2 = u_zz A + |u|^{2 sigma} u B.
class PacketModel {
 public:
  PacketModel(const BlochProblem& problem, PacketSpec spec, NonlinearitySpec nonlinearity,
              double gap_tolerance = kDefaultGapTolerance);

  const PacketSpec& spec() const { return spec_; }
  const BlochEigenpair& pair() const { return pair_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
  const EffectiveParams& params() const { return params_; }
  double energy() const { return pair_.energy; }
  double velocity() const { return velocity_; }
  const Coefficients& dk_chi() const { return dk_chi_; }
  const Coefficients& u2_dispersive() const { return u2_a_; }
  const Coefficients& u2_nonlinear() const { return u2_b_; }
  /// Fourier coefficients of |chi|^{2 sigma} chi on the basis (zero for
  /// nonlocal nonlinearities).
  const Coefficients& nonlinear_profile() const { return nonlinear_profile_; }

  double center(double t) const { return spec_.q0 + t * velocity_; }
  /// phi(t, x) = p0 (x - q0) - t E.
  double phase(double t, double x) const;
  RealField phase(double t, const PeriodicGrid& grid) const;

  /// Same model with chi multiplied by exp(i theta).
  PacketModel rotated(double theta) const;

  /// Field at time u.t sampled on `grid` (eps from the spec). Throws
  /// DomainError when the envelope is not negligible at the box edges.
  FieldState assemble(const EnvelopeState& u, const PeriodicGrid& grid,
                      PacketOrder order = PacketOrder::leading) const;
  FieldState assemble_leading(const EnvelopeState& u, const PeriodicGrid& grid) const {
    return assemble(u, grid, PacketOrder::leading);
  }
  FieldState initial_data(const EnvelopeState& u0, const PeriodicGrid& grid,
                          bool well_prepared) const;

  /// U1 and U2 (without prefactor and phase) at the field points.
  ComplexField corrector_U1(const EnvelopeState& u, const PeriodicGrid& grid) const;
  ComplexField corrector_U2(const EnvelopeState& u, const PeriodicGrid& grid) const;

  /// Residuals of the hierarchy in the plane-wave basis at every envelope node,
  /// using the envelope equation for u_t.
  HierarchyResiduals hierarchy_residuals(const EnvelopeState& u) const;

 private:
  PacketModel() = default;
  struct Samples;
  Samples sample(const EnvelopeState& u, const PeriodicGrid& grid, bool derivatives,
                 bool check_edges) const;

  PacketSpec spec_;
  NonlinearitySpec nonlinearity_;
  BlochEigenpair pair_;
  Eigen::MatrixXcd hamiltonian_;
  EffectiveParams params_;
  double velocity_ = 0.0;
  double gap_tolerance_ = kDefaultGapTolerance;
  Coefficients dk_chi_, u2_a_, u2_b_, nonlinear_profile_;
};

/// Fourier coefficients (on the basis) of |f|^{2 sigma} f for f = sum c_n e^{i g_n y}.
Coefficients power_nonlinearity_coefficients(const Coefficients& c, const PlaneWaveBasis& basis,
                                             int sigma);

/// Discrete L2 distance; grids and eps must agree.
double l2_error(const FieldState& a, const FieldState& b);

}  // namespace nlcs
