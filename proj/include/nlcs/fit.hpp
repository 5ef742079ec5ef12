#pragma once

#include <span>

namespace nlcs {

/// Least-squares line through (log eps, log error).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Half width of the 95% confidence interval of the slope (Student t).
  double slope_half_width = 0.0;
  /// Set when some error is not positive; slope and intercept are then NaN.
  bool exact_agreement = false;
  int points = 0;
  double residual_std = 0.0;  // of the log errors
  double mean_log_eps = 0.0;
  double sxx = 0.0;           // sum of squared log-eps deviations
  double t_quantile = 0.0;    // two-sided 95%, n - 2 degrees of freedom

  double predict(double eps) const;
  /// Half width of the 95% confidence band of the fitted log error at eps.
  double log_error_band(double eps) const;
};

/// Ordinary least squares on (log eps_i, log errors_i). Requires at least
/// three points and positive eps; non-positive errors select the
/// exact-agreement branch instead of throwing.
SlopeFit fit_slope(std::span<const double> eps, std::span<const double> errors);

}  // namespace nlcs
