#include "nlcs/direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlcs/convolution.hpp"
#include "nlcs/errors.hpp"
#include "nlcs/fft.hpp"
#include "nlcs/kernels.hpp"
#include "nlcs/quadrature.hpp"

namespace nlcs {

namespace {

std::vector<double> kernel_weights(const NonlinearitySpec& spec, const PeriodicGrid& grid) {
  const double h = grid.spacing();
  if (const auto* hk = std::get_if<HomogeneousKernel>(&spec.kind))
    return PowerLawRule(hk->mu, h).weights_by_offset(grid.n);
  const auto& k = std::get<SmoothKernel>(spec.kind);
  std::vector<double> w(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) w[j] = h * k(static_cast<double>(j) * h);
  return w;
}

double kernel_lambda(const NonlinearitySpec& spec) {
  if (const auto* hk = std::get_if<HomogeneousKernel>(&spec.kind)) return hk->lambda;
  return 1.0;
}

void check_decay(std::span<const double> rho, std::vector<std::string>* warnings) {
  if (warnings == nullptr || rho.empty()) return;
  double peak = 0.0;
  for (double v : rho) peak = std::max(peak, v);
  if (std::max(rho.front(), rho.back()) > 1e-12 * std::max(peak, 1.0))
    warnings->push_back("nonlocal term: density does not decay at the box edge; the "
                        "truncated kernel result is unreliable");
}

}  // namespace

double FieldState::mass() const {
  const double n = l2_norm(values, grid.spacing());
  return n * n;
}

void FieldState::validate(double period) const {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw ConfigurationError("epsilon must lie in (0, 1]");
  if (!is_power_of_two(grid.n)) throw ConfigurationError("n_x must be a power of two");
  if (values.size() != grid.n) throw DomainError("field values/grid size mismatch");
  const double cells = grid.length / (epsilon * period);
  if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells) || cells < 0.5)
    throw ConfigurationError("box length must hold a whole number of potential periods");
  if (grid.spacing() > epsilon * period / kMinPointsPerPeriod * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid spacing " << grid.spacing() << " does not resolve the period "
        << epsilon * period << " with " << kMinPointsPerPeriod << " points";
    throw ConfigurationError(msg.str());
  }
}

PeriodicGrid field_grid(double epsilon, double period, std::size_t periods,
                        std::size_t points_per_period) {
  if (periods == 0 || points_per_period < static_cast<std::size_t>(kMinPointsPerPeriod))
    throw ConfigurationError("field grid needs at least one period and 16 points per period");
  return PeriodicGrid::centered(static_cast<double>(periods) * epsilon * period,
                                periods * points_per_period);
}

PeriodicGrid field_grid_for_length(double epsilon, double period, double length,
                                   std::size_t points_per_period) {
  const double cells = length / (epsilon * period);
  const double rounded = std::round(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * cells)
    throw ConfigurationError("box length must be a whole number of periods eps * a");
  return field_grid(epsilon, period, static_cast<std::size_t>(rounded), points_per_period);
}

RealField sample_potential(const PeriodicPotential& potential, double period,
                           const PeriodicGrid& grid, double epsilon) {
  RealField v(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) v[j] = potential.evaluate(grid.point(j) / epsilon, period);
  return v;
}

double DirectDiagnostics::relative_mass_drift() const {
  if (initial_mass == 0.0) return 0.0;
  return std::abs(final_mass - initial_mass) / initial_mass;
}

struct DirectSolver::Impl {
  explicit Impl(std::size_t n) : fft(n), half(n), full(n), phase(n), density(n) {}
  Fft1d fft;
  double cached_dt = -1.0;
  ComplexField half, full;
  RealField potential_over_eps;
  RealField phase, density;
  std::unique_ptr<ToeplitzConvolution> convolution;
  double nonlinear_scale = 0.0;
};

DirectSolver::DirectSolver(FieldState initial, const BlochProblem& problem,
                           NonlinearitySpec spec)
    : state_(std::move(initial)), spec_(std::move(spec)) {
  if (problem.dimension() != 1) throw DomainError("direct solver is implemented for d = 1");
  const double period = problem.lattice().period[0];
  state_.validate(period);
  spec_.validate(1);
  impl_ = std::make_unique<Impl>(state_.grid.n);
  const double eps = state_.epsilon;
  impl_->potential_over_eps = sample_potential(problem.potential(), period, state_.grid, eps);
  for (auto& v : impl_->potential_over_eps) v /= eps;
  const double scale = std::pow(eps, spec_.alpha - 1.0);
  if (const auto* l = std::get_if<LocalNonlinearity>(&spec_.kind)) {
    impl_->nonlinear_scale = scale * l->lambda;
  } else {
    impl_->nonlinear_scale = scale * kernel_lambda(spec_);
    const auto w = kernel_weights(spec_, state_.grid);
    impl_->convolution = std::make_unique<ToeplitzConvolution>(w);
  }
  diagnostics_.initial_mass = state_.mass();
  diagnostics_.final_mass = diagnostics_.initial_mass;
  diagnostics_.mass_log.emplace_back(state_.t, diagnostics_.initial_mass);
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::total_phase(std::span<double> out) const {
  const auto& u = state_.values;
  if (const auto* l = std::get_if<LocalNonlinearity>(&spec_.kind)) {
    kernels::density_power(u, l->sigma, impl_->nonlinear_scale, out);
  } else {
    kernels::density_power(u, 1, 1.0, impl_->density);
    impl_->convolution->apply(impl_->density, out);
    for (auto& v : out) v *= impl_->nonlinear_scale;
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += impl_->potential_over_eps[j];
}

void DirectSolver::advance_to(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigurationError("direct time step must be positive");
  const double remaining = t_end - state_.t;
  if (remaining < -1e-14) throw DomainError("cannot advance the field backwards");
  if (remaining <= 1e-14) {
    state_.t = t_end;
    return;
  }
  const auto nsteps = static_cast<std::size_t>(std::ceil(remaining / dt - 1e-9));
  const double h = remaining / static_cast<double>(nsteps);
  const std::size_t n = state_.grid.n;
  auto& u = state_.values;
  if (h != impl_->cached_dt) {
    const double eps = state_.epsilon;
    for (std::size_t j = 0; j < n; ++j) {
      const double xi = state_.grid.wavenumber(j);
      impl_->half[j] = std::polar(1.0, -0.25 * eps * xi * xi * h);
      impl_->full[j] = impl_->half[j] * impl_->half[j];
    }
    impl_->cached_dt = h;
  }
  // Consecutive kinetic half steps are merged; the field is only in physical
  // space for the phase rotation.
  impl_->fft.forward(u);
  for (std::size_t j = 0; j < n; ++j) u[j] *= impl_->half[j];
  for (std::size_t s = 0; s < nsteps; ++s) {
    impl_->fft.inverse(u);
    total_phase(impl_->phase);
    kernels::rotate_phase(u, impl_->phase, h);
    impl_->fft.forward(u);
    const auto& mult = s + 1 == nsteps ? impl_->half : impl_->full;
    for (std::size_t j = 0; j < n; ++j) u[j] *= mult[j];
    if ((s & 63) == 63 && !std::isfinite(std::norm(u[0]) + std::norm(u[n / 2]))) break;
  }
  impl_->fft.inverse(u);
  diagnostics_.steps += nsteps;
  const double sup = sup_norm(u);
  if (!std::isfinite(sup)) {
    std::ostringstream msg;
    msg << "direct field overflowed between t = " << state_.t << " and " << t_end;
    throw BlowupError(msg.str(), state_.t, state_.t, std::numeric_limits<double>::infinity());
  }
  state_.t = t_end;
  diagnostics_.final_mass = state_.mass();
  diagnostics_.mass_log.emplace_back(state_.t, diagnostics_.final_mass);
}

FieldState evolve_direct(const FieldState& state, const BlochProblem& problem,
                         const NonlinearitySpec& spec, double dt, double t_end,
                         DirectDiagnostics* diagnostics) {
  DirectSolver solver(state, problem, spec);
  solver.advance_to(t_end, dt);
  if (diagnostics != nullptr) *diagnostics = solver.diagnostics();
  return solver.state();
}

RealField nonlocal_term(const FieldState& state, const NonlinearitySpec& spec, bool fast,
                        std::vector<std::string>* warnings) {
  if (spec.is_local()) throw DomainError("nonlocal_term needs a kernel nonlinearity");
  RealField rho(state.grid.n), out(state.grid.n);
  kernels::density_power(state.values, 1, 1.0, rho);
  check_decay(rho, warnings);
  const auto w = kernel_weights(spec, state.grid);
  if (fast)
    ToeplitzConvolution(w).apply(rho, out);
  else
    kernels::toeplitz_convolution(rho, w, out);
  return out;
}

RealField nonlocal_term(const FieldState& state, const std::function<double(double)>& kernel) {
  const std::size_t n = state.grid.n;
  const double h = state.grid.spacing();
  RealField rho(n), w(n), out(n);
  kernels::density_power(state.values, 1, 1.0, rho);
  for (std::size_t j = 0; j < n; ++j) w[j] = h * kernel(static_cast<double>(j) * h);
  kernels::toeplitz_convolution(rho, w, out);
  return out;
}

}  // namespace nlcs
