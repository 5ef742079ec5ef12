#pragma once

#include <string>
#include <variant>

namespace nlcs {

/// f(|psi|^2) = lambda |psi|^(2 sigma).
struct LocalNonlinearity {
  int sigma = 1;
  double lambda = 1.0;
};

/// f(|psi|^2) = lambda (|x|^mu * |psi|^2).
struct HomogeneousKernel {
  double mu = -1.0;
  double lambda = 1.0;
};

/// K(x) = (a1 + a2 x^2 + a3 x^4) exp(-A^2 x^2) + a4 exp(-B^2 x^2).
///
/// This family covers the Gaussian kernel (a1 = 1, A = 1) as well as the
/// roton-type kernels used for superfluid helium models.
struct SmoothKernel {
  double a1 = 1.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double A = 1.0;
  double B = 1.0;

  double operator()(double x) const;
  double at_zero() const { return a1 + a4; }

  static SmoothKernel gaussian(double amplitude = 1.0, double inverse_width = 1.0);
};

struct NonlinearitySpec {
  std::variant<LocalNonlinearity, HomogeneousKernel, SmoothKernel> kind;
  double alpha = 1.5;

  bool is_local() const { return std::holds_alternative<LocalNonlinearity>(kind); }
  bool is_homogeneous() const { return std::holds_alternative<HomogeneousKernel>(kind); }
  bool is_smooth() const { return std::holds_alternative<SmoothKernel>(kind); }

  /// Throws ConfigurationError when the kind parameters or alpha are invalid
  /// for spatial dimension d.
  void validate(int d) const;
  std::string describe() const;
};

/// Nonlinearity strength at which nonlinear effects enter the envelope
/// equation: 1 + d sigma / 2 (local), 1 - mu / 2 (homogeneous), 1 (smooth).
double critical_alpha(const NonlinearitySpec& spec, int d);

/// True when alpha equals the critical value (to 1e-12).
bool is_critical(const NonlinearitySpec& spec, int d);

}  // namespace nlcs
