#include "nlcs/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlcs/errors.hpp"

namespace nlcs {

double SmoothKernel::operator()(double x) const {
  const double x2 = x * x;
  return (a1 + a2 * x2 + a3 * x2 * x2) * std::exp(-A * A * x2) +
         a4 * std::exp(-B * B * x2);
}

SmoothKernel SmoothKernel::gaussian(double amplitude, double inverse_width) {
  SmoothKernel k;
  k.a1 = amplitude;
  k.A = inverse_width;
  return k;
}

double critical_alpha(const NonlinearitySpec& spec, int d) {
  struct Visitor {
    int d;
    double operator()(const LocalNonlinearity& l) const { return 1.0 + d * l.sigma / 2.0; }
    double operator()(const HomogeneousKernel& h) const { return 1.0 - h.mu / 2.0; }
    double operator()(const SmoothKernel&) const { return 1.0; }
  };
  return std::visit(Visitor{d}, spec.kind);
}

bool is_critical(const NonlinearitySpec& spec, int d) {
  return std::abs(spec.alpha - critical_alpha(spec, d)) <= 1e-12;
}

void NonlinearitySpec::validate(int d) const {
  if (const auto* l = std::get_if<LocalNonlinearity>(&kind)) {
    if (l->sigma < 1) throw ConfigurationError("local nonlinearity requires sigma >= 1");
  } else if (const auto* h = std::get_if<HomogeneousKernel>(&kind)) {
    const double lower = -std::min(2.0, static_cast<double>(d));
    if (!(h->mu > lower && h->mu <= 2.0) || h->mu == 0.0)
      throw ConfigurationError("homogeneous kernel requires -min(2,d) < mu <= 2, mu != 0");
  } else {
    const auto& k = std::get<SmoothKernel>(kind);
    if (!(k.A > 0.0) || !(k.B > 0.0))
      throw ConfigurationError("smooth kernel requires A, B > 0");
  }
  if (alpha < critical_alpha(*this, d) - 1e-12) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " is below the critical value "
        << critical_alpha(*this, d);
    throw ConfigurationError(msg.str());
  }
}

std::string NonlinearitySpec::describe() const {
  std::ostringstream s;
  if (const auto* l = std::get_if<LocalNonlinearity>(&kind))
    s << "local(sigma=" << l->sigma << ", lambda=" << l->lambda << ")";
  else if (const auto* h = std::get_if<HomogeneousKernel>(&kind))
    s << "homogeneous(mu=" << h->mu << ", lambda=" << h->lambda << ")";
  else
    s << "smooth(K0=" << std::get<SmoothKernel>(kind).at_zero() << ")";
  s << ", alpha=" << alpha;
  return s.str();
}

}  // namespace nlcs
