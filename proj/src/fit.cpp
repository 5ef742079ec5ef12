#include "nlcs/fit.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "nlcs/errors.hpp"

namespace nlcs {

double SlopeFit::predict(double eps) const {
  return std::exp(intercept + slope * std::log(eps));
}

double SlopeFit::log_error_band(double eps) const {
  if (exact_agreement || points < 3) return 0.0;
  const double d = std::log(eps) - mean_log_eps;
  return t_quantile * residual_std * std::sqrt(1.0 / points + d * d / sxx);
}

SlopeFit fit_slope(std::span<const double> eps, std::span<const double> errors) {
  if (eps.size() != errors.size()) throw DomainError("fit_slope: size mismatch");
  if (eps.size() < 3) throw DomainError("fit_slope needs at least three points");
  SlopeFit fit;
  fit.points = static_cast<int>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw DomainError("fit_slope: eps must be positive");
    if (!std::isfinite(errors[i])) throw DomainError("fit_slope: non-finite error");
    if (!(errors[i] > 0.0)) fit.exact_agreement = true;
  }
  if (fit.exact_agreement) {
    fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }

  const double n = static_cast<double>(eps.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mx += std::log(eps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_slope: eps values must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ssr = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double r = std::log(errors[i]) - (fit.intercept + fit.slope * std::log(eps[i]));
    ssr += r * r;
  }
  const double dof = n - 2.0;
  const boost::math::students_t dist(dof);
  fit.mean_log_eps = mx;
  fit.sxx = sxx;
  fit.residual_std = std::sqrt(ssr / dof);
  fit.t_quantile = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.slope_half_width = fit.t_quantile * fit.residual_std / std::sqrt(sxx);
  return fit;
}

}  // namespace nlcs
