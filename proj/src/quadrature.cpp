#include "nlcs/quadrature.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <cstdlib>

#include "nlcs/errors.hpp"

namespace nlcs {

PowerLawRule::PowerLawRule(double mu_in, double h_in) : mu(mu_in), h(h_in) {
  if (!(h > 0.0)) throw DomainError("quadrature spacing must be positive");
  if (!(mu > -1.0)) throw DomainError("power-law kernel requires mu > -1");

  using boost::math::zeta;
  // c_k multiplies f^{(2k)}(0).
  const double c0 = -2.0 * zeta(-mu) * std::pow(h, mu + 1.0);
  const double c1 = -2.0 * zeta(-mu - 2.0) * std::pow(h, mu + 3.0) / 2.0;
  const double c2 = -2.0 * zeta(-mu - 4.0) * std::pow(h, mu + 5.0) / 24.0;

  // f''(0)  ~ (-f2 + 16 f1 - 30 f0 + 16 f-1 - f-2) / (12 h^2)
  // f''''(0) ~ (f2 - 4 f1 + 6 f0 - 4 f-1 + f-2) / h^4
  const double h2 = h * h;
  const double h4 = h2 * h2;
  correction[0] = c0 + c1 * (-30.0 / (12.0 * h2)) + c2 * (6.0 / h4);
  correction[1] = c1 * (16.0 / (12.0 * h2)) + c2 * (-4.0 / h4);
  correction[2] = c1 * (-1.0 / (12.0 * h2)) + c2 * (1.0 / h4);
}

double PowerLawRule::weight(long j) const {
  const long a = std::labs(j);
  double w = 0.0;
  if (a != 0) w = h * std::pow(static_cast<double>(a) * h, mu);
  if (a <= 2) w += correction[static_cast<std::size_t>(a)];
  return w;
}

std::vector<double> PowerLawRule::weights_by_offset(std::size_t count) const {
  std::vector<double> w(count);
  for (std::size_t m = 0; m < count; ++m) w[m] = weight(static_cast<long>(m));
  return w;
}

}  // namespace nlcs
