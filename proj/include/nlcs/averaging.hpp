#pragma once

// Two-scale convolution
//   I_eps(z, y) = int K(zeta) rho(z - zeta) |chi(y - zeta / sqrt(eps))|^2 d zeta
// and its eps -> 0 limit. The fast density is expanded in its Fourier series
// sum_j c_j exp(i gamma_j y), gamma_j = 2 pi j / a, so that
//   I_eps(z, y) = sum_j c_j exp(i gamma_j y) I_j(z),
//   I_j(z) = int K(zeta) rho(z - zeta) exp(-i gamma_j zeta / sqrt(eps)) d zeta.
// The j = 0 term is the averaged limit; the others are oscillatory integrals.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nlcs/bloch.hpp"
#include "nlcs/effective.hpp"
#include "nlcs/fit.hpp"
#include "nlcs/nonlinearity.hpp"

namespace nlcs {

/// Fourier coefficients c_0..c_J of a real, a-periodic density; negative
/// indices are implied by c_{-j} = conj(c_j).
struct FastDensity {
  double period = 1.0;
  std::vector<cplx> coefficients{cplx{1.0, 0.0}};

  int max_harmonic() const { return static_cast<int>(coefficients.size()) - 1; }
  cplx coefficient(int j) const;
  double operator()(double y) const;
  /// Throws ConfigurationError unless c_0 = 1 (to 1e-10) and c_0 is real.
  void validate() const;

  static FastDensity uniform(double period = 1.0);
};

/// |chi_m|^2 of a 1D Bloch function: c_j = sum_n c_n conj(c_{n-j}). Harmonics
/// beyond the last one with |c_j| > drop_below are discarded.
FastDensity bloch_density(const BlochEigenpair& pair, double drop_below = 1e-16);

struct PowerLaw {
  double mu = 1.0;
};

/// K(zeta) = |zeta|^mu, or K(sqrt(eps) zeta) for a smooth kernel K (the
/// smooth nonlocal term written in envelope variables).
using AveragingKernel = std::variant<PowerLaw, SmoothKernel>;

struct TwoScaleIntegrand {
  PeriodicGrid grid;    // envelope grid of the slow density
  RealField density;    // rho = |u|^2 at the grid points, zero outside the box
  FastDensity fast;
  AveragingKernel kernel = PowerLaw{};
  double epsilon = 1.0 / 16;
  /// Quadrature points per period of the highest retained harmonic.
  int points_per_period = 32;
  /// Harmonics kept in the expansion; negative keeps all of them.
  int max_harmonic = -1;

  int harmonics() const;
  /// Quadrature refinement of the envelope grid used for the zeta sums.
  int refinement() const;
  void validate() const;
};

inline constexpr int kMinAveragingPointsPerPeriod = 16;

TwoScaleIntegrand make_integrand(const EnvelopeState& u, FastDensity fast,
                                 AveragingKernel kernel, double epsilon);

/// I_0(z), ..., I_J(z) with J = ti.harmonics().
std::vector<cplx> twoscale_terms(const TwoScaleIntegrand& ti, double z);

/// Contribution of harmonic j (and -j) at fast position y:
/// Re(c_0 I_0) for j = 0, 2 Re(c_j exp(i gamma_j y) I_j) otherwise.
double term_contribution(const TwoScaleIntegrand& ti, std::span<const cplx> terms, int j,
                         double y);

double twoscale_convolution(const TwoScaleIntegrand& ti, double z, double y);

/// Same integral summed point by point with the fast density evaluated at
/// y - zeta / sqrt(eps); a cross-check for the Fourier-term evaluation.
double twoscale_convolution_direct(const TwoScaleIntegrand& ti, double z, double y);

/// int |zeta|^mu rho(z - zeta) d zeta by corrected punctured-trapezoid
/// quadrature on the envelope grid refined `refinement` times.
double averaged_limit(std::span<const double> density, const PeriodicGrid& grid, double mu,
                      double z, int refinement = 1);

/// K(0) ||u0||^2.
double smooth_kernel_limit(const SmoothKernel& kernel, double mass);

struct AveragingRateStudy {
  std::vector<double> epsilons;
  std::vector<double> sup_errors;    // sup over the z-sample at y = 0
  std::vector<double> y_spread;      // same sup taken over y in {0, a/3, 2a/3}
  std::vector<double> sample_points;  // z-sample
  SlopeFit fit;
  /// Every error below 1e-10 relative to the limit scale.
  bool exact_agreement = false;
  std::string target;  // "averaged_limit" or "kernel_at_zero"
};

/// Sup over a z-sample of |I_eps(z, 0) - limit(z)| for each eps and the
/// log-log slope. Power-law kernels compare with averaged_limit at the same
/// quadrature resolution, smooth kernels with K(0) times the mass. The
/// z-sample has `samples` points spanning +-`widths` envelope widths around
/// the centroid (width: sqrt 2 times the rms width of rho, i.e. w for
/// exp(-z^2 / 2 w^2)). The (eps, z) evaluations run in parallel.
AveragingRateStudy averaging_rate_study(const TwoScaleIntegrand& templ,
                                        std::span<const double> epsilons, int samples = 33,
                                        double widths = 4.0);

}  // namespace nlcs
