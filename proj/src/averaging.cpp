#include "nlcs/averaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "nlcs/errors.hpp"
#include "nlcs/fft.hpp"
#include "nlcs/quadrature.hpp"

namespace nlcs {

namespace {

constexpr std::size_t kMaxQuadraturePoints = std::size_t{1} << 24;

// Zeta sums on the envelope grid refined r times. The density is resampled
// by zero-padded trigonometric interpolation on a grid through z, so every
// z is handled the same way whether or not it is a grid node.
class Evaluator {
 public:
  Evaluator(const TwoScaleIntegrand& ti, int refinement, int harmonics)
      : grid_(ti.grid),
        harmonics_(harmonics),
        n_fine_(ti.grid.n * static_cast<std::size_t>(refinement)),
        h_(ti.grid.spacing() / refinement),
        fine_fft_(n_fine_) {
    spectrum_.assign(ti.density.begin(), ti.density.end());
    Fft1d(grid_.n).forward(spectrum_);

    weights_.resize(n_fine_ + 1);
    if (const auto* p = std::get_if<PowerLaw>(&ti.kernel)) {
      const PowerLawRule rule(p->mu, h_);
      for (std::size_t m = 0; m <= n_fine_; ++m) weights_[m] = rule.weight(static_cast<long>(m));
    } else {
      const auto& k = std::get<SmoothKernel>(ti.kernel);
      const double s = std::sqrt(ti.epsilon);
      for (std::size_t m = 0; m <= n_fine_; ++m)
        weights_[m] = h_ * k(s * h_ * static_cast<double>(m));
    }
    // Phase of the first harmonic per zeta step.
    step_phase_ = -kTwoPi * h_ / (ti.fast.period * std::sqrt(ti.epsilon));
  }

  std::size_t size() const { return n_fine_; }
  double step() const { return h_; }

  // rho(z + m h), m = 0..n_fine - 1 (periodic in the box).
  RealField samples(double z) const {
    const std::size_t n = grid_.n;
    ComplexField data(n_fine_, cplx{0.0, 0.0});
    const double shift = z - grid_.origin;
    const double scale = static_cast<double>(n_fine_) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const long signed_j = j < (n + 1) / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
      const double xi = kTwoPi * static_cast<double>(signed_j) / grid_.length;
      cplx c = spectrum_[j] * scale;
      if (n % 2 == 0 && j == n / 2) {
        // Split the Nyquist bin between +-n/2 to keep the interpolant real.
        c *= 0.5;
        data[n / 2] += c * std::polar(1.0, -xi * shift);
        data[n_fine_ - n / 2] += c * std::polar(1.0, xi * shift);
        continue;
      }
      const std::size_t bin = signed_j >= 0 ? static_cast<std::size_t>(signed_j)
                                            : n_fine_ - static_cast<std::size_t>(-signed_j);
      data[bin] += c * std::polar(1.0, xi * shift);
    }
    fine_fft_.inverse(data);
    RealField out(n_fine_);
    for (std::size_t m = 0; m < n_fine_; ++m) out[m] = data[m].real();
    return out;
  }

  // Offsets j with z - j h inside the box, as [first, first + n_fine).
  long first_offset(double z) const {
    const long hi = static_cast<long>(std::floor((z - grid_.origin) / h_));
    return hi - static_cast<long>(n_fine_) + 1;
  }

  double density_at(const RealField& fine, long j) const {
    const long n = static_cast<long>(n_fine_);
    return fine[static_cast<std::size_t>(((-j) % n + n) % n)];
  }

  double weight(long j) const { return weights_[static_cast<std::size_t>(std::labs(j))]; }

  std::vector<cplx> terms(double z) const {
    const RealField fine = samples(z);
    std::vector<cplx> acc(static_cast<std::size_t>(harmonics_) + 1, cplx{0.0, 0.0});
    double acc0 = 0.0;
    const long first = first_offset(z);
    for (long j = first; j < first + static_cast<long>(n_fine_); ++j) {
      const double f = weight(j) * density_at(fine, j);
      acc0 += f;
      if (harmonics_ == 0) continue;
      const cplx base = std::polar(1.0, step_phase_ * static_cast<double>(j));
      cplx e = base;
      for (int g = 1; g <= harmonics_; ++g) {
        acc[static_cast<std::size_t>(g)] += f * e;
        e *= base;
      }
    }
    acc[0] = acc0;
    return acc;
  }

  double direct(double z, double y, const FastDensity& fast, double epsilon) const {
    const RealField fine = samples(z);
    const double s = std::sqrt(epsilon);
    double acc = 0.0;
    const long first = first_offset(z);
    for (long j = first; j < first + static_cast<long>(n_fine_); ++j) {
      acc += weight(j) * density_at(fine, j) * fast(y - static_cast<double>(j) * h_ / s);
    }
    return acc;
  }

 private:
  PeriodicGrid grid_;
  int harmonics_;
  std::size_t n_fine_;
  double h_;
  Fft1d fine_fft_;
  ComplexField spectrum_;
  RealField weights_;
  double step_phase_ = 0.0;
};

FastDensity truncated(const TwoScaleIntegrand& ti) {
  FastDensity f = ti.fast;
  f.coefficients.resize(static_cast<std::size_t>(ti.harmonics()) + 1);
  return f;
}

}  // namespace

cplx FastDensity::coefficient(int j) const {
  const int a = std::abs(j);
  if (a > max_harmonic()) return {0.0, 0.0};
  const cplx c = coefficients[static_cast<std::size_t>(a)];
  return j >= 0 ? c : std::conj(c);
}

double FastDensity::operator()(double y) const {
  double v = coefficients.empty() ? 0.0 : coefficients[0].real();
  for (int j = 1; j <= max_harmonic(); ++j)
    v += 2.0 * (coefficients[static_cast<std::size_t>(j)] *
                std::polar(1.0, kTwoPi * j * y / period))
                   .real();
  return v;
}

void FastDensity::validate() const {
  if (!(period > 0.0) || !std::isfinite(period))
    throw ConfigurationError("fast density period must be positive");
  if (coefficients.empty()) throw ConfigurationError("fast density has no coefficients");
  if (std::abs(coefficients[0] - 1.0) > 1e-10)
    throw ConfigurationError("fast density must have unit cell average (c_0 = 1)");
  for (const auto& c : coefficients)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ConfigurationError("fast density coefficients must be finite");
}

FastDensity FastDensity::uniform(double period) { return FastDensity{period, {cplx{1.0, 0.0}}}; }

FastDensity bloch_density(const BlochEigenpair& pair, double drop_below) {
  if (!pair.basis || pair.basis->lattice.dimension != 1)
    throw DomainError("bloch_density needs a 1D Bloch pair");
  const auto& basis = *pair.basis;
  const auto& c = pair.coefficients;
  const int size = static_cast<int>(basis.size());
  // Basis indices in 1D are consecutive integers -N..N.
  FastDensity out;
  out.period = basis.lattice.period[0];
  out.coefficients.assign(static_cast<std::size_t>(size), cplx{0.0, 0.0});
  for (int j = 0; j < size; ++j) {
    cplx s{0.0, 0.0};
    for (int a = j; a < size; ++a) s += c(a) * std::conj(c(a - j));
    out.coefficients[static_cast<std::size_t>(j)] = s;
  }
  int keep = 0;
  for (int j = 0; j < size; ++j)
    if (std::abs(out.coefficients[static_cast<std::size_t>(j)]) > drop_below) keep = j;
  out.coefficients.resize(static_cast<std::size_t>(keep) + 1);
  // c_0 is real and equal to ||c||^2 = 1 up to roundoff.
  out.coefficients[0] = out.coefficients[0].real();
  return out;
}

int TwoScaleIntegrand::harmonics() const {
  const int all = fast.max_harmonic();
  return max_harmonic < 0 ? all : std::min(max_harmonic, all);
}

int TwoScaleIntegrand::refinement() const {
  const int j = std::max(1, harmonics());
  const double wanted =
      grid.spacing() * points_per_period * j / (std::sqrt(epsilon) * fast.period);
  int r = 1;
  while (r < wanted) r *= 2;
  if (grid.n * static_cast<std::size_t>(r) > kMaxQuadraturePoints)
    throw ConfigurationError("two-scale quadrature would need more than 2^24 points; "
                             "reduce the harmonics or the envelope box");
  return r;
}

void TwoScaleIntegrand::validate() const {
  if (grid.n < 2 || !(grid.length > 0.0)) throw ConfigurationError("invalid envelope grid");
  if (density.size() != grid.n) throw ConfigurationError("density does not match the grid");
  for (double v : density)
    if (!std::isfinite(v)) throw ConfigurationError("density must be finite");
  if (!(epsilon > 0.0) || epsilon > 1.0) throw ConfigurationError("epsilon must lie in (0, 1]");
  if (points_per_period < kMinAveragingPointsPerPeriod)
    throw ConfigurationError("two-scale quadrature needs at least 16 points per fast period");
  fast.validate();
  if (const auto* p = std::get_if<PowerLaw>(&kernel)) {
    if (!(p->mu > -1.0) || p->mu > 2.0)
      throw ConfigurationError("power-law kernel exponent must satisfy -1 < mu <= 2");
  }
  (void)refinement();
}

TwoScaleIntegrand make_integrand(const EnvelopeState& u, FastDensity fast, AveragingKernel kernel,
                                 double epsilon) {
  TwoScaleIntegrand ti;
  ti.grid = u.grid;
  ti.density.resize(u.values.size());
  for (std::size_t j = 0; j < u.values.size(); ++j) ti.density[j] = std::norm(u.values[j]);
  ti.fast = std::move(fast);
  ti.kernel = kernel;
  ti.epsilon = epsilon;
  return ti;
}

std::vector<cplx> twoscale_terms(const TwoScaleIntegrand& ti, double z) {
  ti.validate();
  return Evaluator(ti, ti.refinement(), ti.harmonics()).terms(z);
}

double term_contribution(const TwoScaleIntegrand& ti, std::span<const cplx> terms, int j,
                         double y) {
  if (j < 0 || static_cast<std::size_t>(j) >= terms.size())
    throw DomainError("harmonic index out of range");
  const cplx c = ti.fast.coefficient(j);
  if (j == 0) return (c * terms[0]).real();
  const double gamma = kTwoPi * j / ti.fast.period;
  return 2.0 * (c * std::polar(1.0, gamma * y) * terms[static_cast<std::size_t>(j)]).real();
}

double twoscale_convolution(const TwoScaleIntegrand& ti, double z, double y) {
  const auto terms = twoscale_terms(ti, z);
  double total = 0.0;
  for (int j = 0; j < static_cast<int>(terms.size()); ++j)
    total += term_contribution(ti, terms, j, y);
  return total;
}

double twoscale_convolution_direct(const TwoScaleIntegrand& ti, double z, double y) {
  ti.validate();
  return Evaluator(ti, ti.refinement(), 0).direct(z, y, truncated(ti), ti.epsilon);
}

double averaged_limit(std::span<const double> density, const PeriodicGrid& grid, double mu,
                      double z, int refinement) {
  if (refinement < 1) throw DomainError("refinement must be at least 1");
  TwoScaleIntegrand ti;
  ti.grid = grid;
  ti.density.assign(density.begin(), density.end());
  ti.kernel = PowerLaw{mu};
  ti.epsilon = 1.0;
  ti.validate();
  return Evaluator(ti, refinement, 0).terms(z)[0].real();
}

double smooth_kernel_limit(const SmoothKernel& kernel, double mass) {
  return kernel.at_zero() * mass;
}

AveragingRateStudy averaging_rate_study(const TwoScaleIntegrand& templ,
                                        std::span<const double> epsilons, int samples,
                                        double widths) {
  if (epsilons.size() < 4) throw ConfigurationError("rate study needs at least four eps values");
  if (samples < 2 || !(widths > 0.0)) throw ConfigurationError("invalid z-sample");
  templ.validate();

  AveragingRateStudy study;
  study.epsilons.assign(epsilons.begin(), epsilons.end());
  const bool smooth = std::holds_alternative<SmoothKernel>(templ.kernel);
  study.target = smooth ? "kernel_at_zero" : "averaged_limit";

  const auto& rho = templ.density;
  const double h = templ.grid.spacing();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    m0 += rho[j];
    m1 += rho[j] * templ.grid.point(j);
  }
  if (!(m0 > 0.0)) throw ConfigurationError("rate study needs a nonzero density");
  const double centre = m1 / m0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double d = templ.grid.point(j) - centre;
    m2 += rho[j] * d * d;
  }
  const double width = std::sqrt(2.0 * m2 / m0);
  for (int i = 0; i < samples; ++i)
    study.sample_points.push_back(centre - widths * width +
                                  2.0 * widths * width * i / (samples - 1));
  const double mass = h * m0;

  // FFTW planning is not thread safe: build every evaluator up front.
  std::vector<TwoScaleIntegrand> integrands;
  std::vector<std::unique_ptr<Evaluator>> evaluators;
  for (double eps : epsilons) {
    auto ti = templ;
    ti.epsilon = eps;
    ti.validate();
    evaluators.push_back(std::make_unique<Evaluator>(ti, ti.refinement(), ti.harmonics()));
    integrands.push_back(std::move(ti));
  }

  const double a = templ.fast.period;
  const std::array<double, 3> ys{0.0, a / 3.0, 2.0 * a / 3.0};
  const long n_eps = static_cast<long>(epsilons.size());
  const long n_tasks = n_eps * samples;
  std::vector<std::array<double, 3>> errors(static_cast<std::size_t>(n_tasks));
  std::vector<double> limits(static_cast<std::size_t>(n_tasks));
#pragma omp parallel for schedule(dynamic)
  for (long task = 0; task < n_tasks; ++task) {
    const auto e = static_cast<std::size_t>(task / samples);
    const double z = study.sample_points[static_cast<std::size_t>(task % samples)];
    const auto& ti = integrands[e];
    const auto terms = evaluators[e]->terms(z);
    const double limit = smooth ? smooth_kernel_limit(std::get<SmoothKernel>(ti.kernel), mass)
                                : terms[0].real();
    limits[static_cast<std::size_t>(task)] = limit;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      double total = 0.0;
      for (int j = 0; j < static_cast<int>(terms.size()); ++j)
        total += term_contribution(ti, terms, j, ys[k]);
      errors[static_cast<std::size_t>(task)][k] = std::abs(total - limit);
    }
  }

  double scale = 1.0, worst = 0.0;
  for (long e = 0; e < n_eps; ++e) {
    double sup0 = 0.0, sup_all = 0.0;
    for (long i = 0; i < samples; ++i) {
      const auto& err = errors[static_cast<std::size_t>(e * samples + i)];
      sup0 = std::max(sup0, err[0]);
      sup_all = std::max({sup_all, err[0], err[1], err[2]});
      scale = std::max(scale, std::abs(limits[static_cast<std::size_t>(e * samples + i)]));
    }
    study.sup_errors.push_back(sup0);
    study.y_spread.push_back(sup_all);
    worst = std::max(worst, sup_all);
  }
  study.exact_agreement = worst <= 1e-10 * scale;
  if (study.exact_agreement) {
    study.fit.exact_agreement = true;
    study.fit.points = static_cast<int>(n_eps);
    study.fit.slope = study.fit.intercept = std::nan("");
  } else {
    study.fit = fit_slope(study.epsilons, study.sup_errors);
  }
  return study;
}

}  // namespace nlcs
