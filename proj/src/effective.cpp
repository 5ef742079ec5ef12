#include "nlcs/effective.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlcs/errors.hpp"
#include "nlcs/fft.hpp"
#include "nlcs/kernels.hpp"
#include "nlcs/quadrature.hpp"

namespace nlcs {

std::string to_string(Regime r) {
  return r == Regime::critical ? "critical" : "supercritical";
}

std::string to_string(ExistenceClass c) {
  switch (c) {
    case ExistenceClass::global:
      return "global";
    case ExistenceClass::possible_blowup:
      return "possible_blowup";
    case ExistenceClass::unknown:
      return "unknown";
  }
  return "unknown";
}

EffectiveParams EffectiveParams::one_dimensional(double mass, double coupling,
                                                 NonlinearitySpec nonlinearity) {
  EffectiveParams p;
  p.mass_tensor = Eigen::MatrixXd::Constant(1, 1, mass);
  p.coupling = coupling;
  p.regime = is_critical(nonlinearity, 1) ? Regime::critical : Regime::supercritical;
  p.nonlinearity = std::move(nonlinearity);
  return p;
}

// ------------------------------------------------------------- parameters

double effective_coupling(const BlochEigenpair& pair, int sigma, double lambda,
                          int points_per_axis) {
  if (lambda == 0.0) return 0.0;
  const auto& basis = *pair.basis;
  const int min_points = 8 * (2 * basis.truncation + 1);
  const int npts = std::max(points_per_axis, min_points);
  const int d = basis.lattice.dimension;
  const double power = static_cast<double>(sigma) + 1.0;  // |chi|^2 raised to this
  double sum = 0.0;
  std::size_t count = 0;
  if (d == 1) {
    const double a = basis.lattice.period[0];
    std::vector<double> y(static_cast<std::size_t>(npts));
    for (int j = 0; j < npts; ++j) y[static_cast<std::size_t>(j)] = a * j / npts;
    for (const auto& v : periodic_function_samples(pair.coefficients, basis, y)) {
      sum += std::pow(std::norm(v), power);
      ++count;
    }
  } else {
    const double a1 = basis.lattice.period[0], a2 = basis.lattice.period[1];
    for (int i = 0; i < npts; ++i) {
      for (int j = 0; j < npts; ++j) {
        const double y1 = a1 * i / npts, y2 = a2 * j / npts;
        cplx acc{0.0, 0.0};
        for (Eigen::Index n = 0; n < pair.coefficients.size(); ++n)
          acc += pair.coefficients(n) *
                 std::polar(1.0, basis.g(0, n) * y1 + basis.g(1, n) * y2);
        sum += std::pow(std::norm(acc), power);
        ++count;
      }
    }
  }
  return lambda * sum / static_cast<double>(count);
}

EffectiveParams effective_params(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 const BlochProblem& problem, const NonlinearitySpec& spec,
                                 double gap_tolerance) {
  const int d = problem.dimension();
  spec.validate(d);
  EffectiveParams p;
  p.mass_tensor = effective_mass_tensor(pair, hamiltonian, problem,
                                        MassMethod::perturbation, gap_tolerance);
  p.nonlinearity = spec;
  p.regime = is_critical(spec, d) ? Regime::critical : Regime::supercritical;
  if (const auto* l = std::get_if<LocalNonlinearity>(&spec.kind))
    p.coupling = effective_coupling(pair, l->sigma, l->lambda);
  return p;
}

ExistenceClass classify_global_existence(const EffectiveParams& params) {
  if (params.regime == Regime::supercritical) return ExistenceClass::global;
  if (!params.nonlinearity.is_local())
    throw DomainError("existence classification covers local nonlinearities only");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(params.mass_tensor,
                                                     Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const bool positive = ev.minCoeff() > 0.0;
  const bool negative = ev.maxCoeff() < 0.0;
  const double lm = params.coupling;
  if ((positive && lm >= 0.0) || (negative && lm <= 0.0)) return ExistenceClass::global;
  if (positive || negative) return ExistenceClass::possible_blowup;
  return ExistenceClass::unknown;
}

// ----------------------------------------------------------- envelopes

double EnvelopeState::mass() const {
  const double n = norm();
  return n * n;
}

double EnvelopeState::norm() const { return l2_norm(values, grid.spacing()); }

void EnvelopeState::validate() const {
  if (!is_power_of_two(grid.n))
    throw ConfigurationError("envelope grid size must be a power of two");
  if (values.size() != grid.n) throw DomainError("envelope values/grid size mismatch");
  if (!std::isfinite(mass())) throw DomainError("envelope mass is not finite");
}

EnvelopeState sample_envelope(const PeriodicGrid& grid,
                              const std::function<cplx(double)>& profile) {
  EnvelopeState s;
  s.grid = grid;
  s.values.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) s.values[j] = profile(grid.point(j));
  return s;
}

EnvelopeState gaussian_envelope(const PeriodicGrid& grid, double width, double amplitude) {
  return sample_envelope(grid, [=](double z) {
    return cplx{amplitude * std::exp(-0.5 * z * z / (width * width)), 0.0};
  });
}

EnvelopeState sech_envelope(const PeriodicGrid& grid, double amplitude) {
  return sample_envelope(grid,
                         [=](double z) { return cplx{amplitude / std::cosh(z), 0.0}; });
}

EnvelopeState gauge_away_constant(const EnvelopeState& state, double k0, double mass0) {
  EnvelopeState out = state;
  const cplx factor = std::polar(1.0, state.t * k0 * mass0);
  for (auto& v : out.values) v *= factor;
  return out;
}

RealField convolution_homogeneous(std::span<const double> u_sq, const PeriodicGrid& grid,
                                  double mu, std::vector<std::string>* warnings) {
  if (u_sq.size() != grid.n) throw DomainError("convolution: size mismatch");
  if (!(mu > -1.0 && mu <= 2.0) || mu == 0.0)
    throw DomainError("convolution_homogeneous requires -1 < mu <= 2, mu != 0 in 1D");
  if (warnings != nullptr && !u_sq.empty()) {
    double peak = 0.0;
    for (double v : u_sq) peak = std::max(peak, std::abs(v));
    const double edge = std::max(std::abs(u_sq.front()), std::abs(u_sq.back()));
    if (edge > 1e-12 * std::max(peak, 1.0))
      warnings->push_back("homogeneous convolution: density does not decay at the grid "
                          "boundary; the truncated kernel result is unreliable");
  }
  const PowerLawRule rule(mu, grid.spacing());
  const auto weights = rule.weights_by_offset(grid.n);
  RealField out(grid.n);
  kernels::toeplitz_convolution(u_sq, weights, out);
  return out;
}

// ------------------------------------------------------------- solver

double EnvelopeDiagnostics::relative_mass_drift() const {
  if (initial_mass == 0.0) return 0.0;
  return std::abs(final_mass - initial_mass) / initial_mass;
}

struct EnvelopeSolver::Impl {
  explicit Impl(std::size_t n) : fft(n), half_kinetic(n), scratch(n), potential(n) {}
  Fft1d fft;
  double cached_dt = -1.0;
  ComplexField half_kinetic;
  ComplexField scratch;
  RealField potential;
  RealField homogeneous_weights;
};

EnvelopeSolver::EnvelopeSolver(EnvelopeState initial, EffectiveParams params,
                               EnvelopeOptions options)
    : state_(std::move(initial)), params_(std::move(params)), options_(options) {
  state_.validate();
  if (params_.mass_tensor.rows() != 1 || params_.mass_tensor.cols() != 1)
    throw DomainError("envelope propagation is implemented for d = 1");
  impl_ = std::make_unique<Impl>(state_.grid.n);
  diagnostics_.initial_sup = sup_norm(state_.values);
  diagnostics_.max_sup = diagnostics_.initial_sup;
  diagnostics_.initial_mass = state_.mass();
  diagnostics_.final_mass = diagnostics_.initial_mass;
  diagnostics_.sample_times.push_back(state_.t);
  diagnostics_.sup_history.push_back(diagnostics_.initial_sup);
  if (const auto* k = std::get_if<SmoothKernel>(&params_.nonlinearity.kind))
    smooth_shift_ = k->at_zero() * diagnostics_.initial_mass;
  if (const auto* h = std::get_if<HomogeneousKernel>(&params_.nonlinearity.kind))
    impl_->homogeneous_weights =
        PowerLawRule(h->mu, state_.grid.spacing()).weights_by_offset(state_.grid.n);
  const std::size_t n = state_.grid.n;
  const double edge = std::max(std::abs(state_.values.front()), std::abs(state_.values[n - 1]));
  if (edge > options_.boundary_tolerance)
    diagnostics_.warnings.push_back("envelope does not decay at the box edge");
}

EnvelopeSolver::~EnvelopeSolver() = default;
EnvelopeSolver::EnvelopeSolver(EnvelopeSolver&&) noexcept = default;
EnvelopeSolver& EnvelopeSolver::operator=(EnvelopeSolver&&) noexcept = default;

void EnvelopeSolver::nonlinear_potential(std::span<double> out) const {
  const auto& spec = params_.nonlinearity;
  if (const auto* l = std::get_if<LocalNonlinearity>(&spec.kind)) {
    kernels::density_power(state_.values, l->sigma, params_.coupling, out);
  } else if (const auto* h = std::get_if<HomogeneousKernel>(&spec.kind)) {
    RealField rho(state_.grid.n);
    kernels::density_power(state_.values, 1, 1.0, rho);
    kernels::toeplitz_convolution(rho, impl_->homogeneous_weights, out);
    for (auto& v : out) v *= h->lambda;
  } else {
    std::fill(out.begin(), out.end(), smooth_shift_);
  }
}

void EnvelopeSolver::step(double dt) {
  auto& u = state_.values;
  const std::size_t n = state_.grid.n;
  if (dt != impl_->cached_dt) {
    const double m = params_.mass_tensor(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = state_.grid.wavenumber(j);
      impl_->half_kinetic[j] = std::polar(1.0, -0.25 * m * xi * xi * dt);
    }
    impl_->cached_dt = dt;
  }
  auto half = [&]() {
    impl_->fft.forward(u);
    for (std::size_t j = 0; j < n; ++j) u[j] *= impl_->half_kinetic[j];
  };
  half();
  impl_->fft.inverse(u);
  if (params_.regime == Regime::critical) {
    nonlinear_potential(impl_->potential);
    kernels::rotate_phase(u, impl_->potential, dt);
  }
  half();
  // Spectral tail: fraction of |u_hat|^2 above two thirds of the Nyquist
  // wavenumber.
  const double xi_cut = (2.0 / 3.0) * kPi / state_.grid.spacing();
  double total = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::norm(u[j]);
    total += w;
    if (std::abs(state_.grid.wavenumber(j)) > xi_cut) tail += w;
  }
  impl_->fft.inverse(u);
  state_.t += dt;
  ++diagnostics_.steps;
  check_blowup(total > 0.0 ? tail / total : 0.0);
}

void EnvelopeSolver::check_blowup(double spectral_tail) {
  const double sup = sup_norm(state_.values);
  diagnostics_.max_sup = std::max(diagnostics_.max_sup, sup);
  diagnostics_.sample_times.push_back(state_.t);
  diagnostics_.sup_history.push_back(sup);
  const double ratio = diagnostics_.initial_sup > 0.0 ? sup / diagnostics_.initial_sup : 0.0;
  const bool overflow = !std::isfinite(sup);
  const bool too_large = ratio > options_.blowup_threshold;
  const bool unresolved = spectral_tail > options_.spectral_tail_tolerance;
  if (!(overflow || too_large || unresolved)) return;

  // Self-similar concentration gives sup|u| ~ (T_c - t)^(-1/(2 s)), so
  // sup^(-2 s) is close to linear in t; extrapolate its zero crossing from
  // the samples where the peak has grown by a quarter.
  double s = 1.0;
  if (const auto* l = std::get_if<LocalNonlinearity>(&params_.nonlinearity.kind))
    s = l->sigma;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < diagnostics_.sup_history.size(); ++i) {
    const double v = diagnostics_.sup_history[i];
    if (std::isfinite(v) && v >= 1.25 * diagnostics_.initial_sup) {
      ts.push_back(diagnostics_.sample_times[i]);
      ys.push_back(std::pow(v, -2.0 * s));
    }
  }
  double tc = state_.t;
  if (ts.size() >= 3) {
    const std::size_t keep = std::max<std::size_t>(3, ts.size() / 2);
    const std::size_t first = ts.size() - keep;
    double mt = 0, my = 0;
    for (std::size_t i = first; i < ts.size(); ++i) {
      mt += ts[i];
      my += ys[i];
    }
    mt /= static_cast<double>(keep);
    my /= static_cast<double>(keep);
    double sxy = 0, sxx = 0;
    for (std::size_t i = first; i < ts.size(); ++i) {
      sxy += (ts[i] - mt) * (ys[i] - my);
      sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    if (sxx > 0.0 && sxy < 0.0) {
      const double slope = sxy / sxx;
      const double root = mt - my / slope;
      if (std::isfinite(root)) tc = std::max(root, state_.t);
    }
  }
  std::ostringstream msg;
  msg << "finite-time blow-up detected at t = " << state_.t << " (";
  if (overflow)
    msg << "non-finite values";
  else if (too_large)
    msg << "sup|u| grew by " << ratio;
  else
    msg << "spectral tail fraction " << spectral_tail << ", sup|u| ratio " << ratio;
  msg << "); estimated T_c = " << tc;
  throw BlowupError(msg.str(), state_.t, tc, ratio);
}

void EnvelopeSolver::advance_to(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigurationError("envelope time step must be positive");
  const double remaining = t_end - state_.t;
  if (remaining < -1e-14) throw DomainError("cannot advance the envelope backwards");
  if (remaining > 1e-14) {
    const auto nsteps = static_cast<std::size_t>(std::ceil(remaining / dt - 1e-9));
    const double h = remaining / static_cast<double>(nsteps);
    for (std::size_t i = 0; i < nsteps; ++i) step(h);
  }
  state_.t = t_end;
  diagnostics_.final_mass = state_.mass();
  const std::size_t n = state_.grid.n;
  const double edge = std::max(std::abs(state_.values.front()), std::abs(state_.values[n - 1]));
  if (edge > options_.boundary_tolerance &&
      std::find(diagnostics_.warnings.begin(), diagnostics_.warnings.end(),
                "envelope reached the box edge") == diagnostics_.warnings.end())
    diagnostics_.warnings.push_back("envelope reached the box edge");
}

EnvelopeState evolve_envelope(const EnvelopeState& state, const EffectiveParams& params,
                              double dt, double t_end, const EnvelopeOptions& options,
                              EnvelopeDiagnostics* diagnostics) {
  EnvelopeSolver solver(state, params, options);
  try {
    solver.advance_to(t_end, dt);
  } catch (...) {
    if (diagnostics != nullptr) *diagnostics = solver.diagnostics();
    throw;
  }
  if (diagnostics != nullptr) *diagnostics = solver.diagnostics();
  return solver.state();
}

}  // namespace nlcs
