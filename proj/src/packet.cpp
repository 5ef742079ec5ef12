#include "nlcs/packet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlcs/errors.hpp"
#include "nlcs/fft.hpp"
#include "nlcs/kernels.hpp"

namespace nlcs {

namespace {

constexpr double kEdgeTolerance = 1e-8;

Coefficients project_out(const Coefficients& c, const Coefficients& w) {
  return w - c * c.dot(w);
}

// (g + k - v) w, componentwise.
Coefficients shifted_momentum(const PlaneWaveBasis& basis, double k, double v,
                              const Coefficients& w) {
  Coefficients out(w.size());
  for (Eigen::Index n = 0; n < w.size(); ++n) out(n) = (basis.g(0, n) + k - v) * w(n);
  return out;
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Fourier coefficients of u on its grid, normalized for trig_interpolate.
ComplexField interpolation_coefficients(std::span<const cplx> values) {
  ComplexField c(values.begin(), values.end());
  Fft1d(c.size()).forward(c);
  const double inv = 1.0 / static_cast<double>(c.size());
  for (auto& v : c) v *= inv;
  return c;
}

}  // namespace

Coefficients power_nonlinearity_coefficients(const Coefficients& c, const PlaneWaveBasis& basis,
                                             int sigma) {
  if (basis.lattice.dimension != 1) throw DomainError("1D lattices only");
  const auto nmax = static_cast<std::size_t>(basis.truncation);
  const std::size_t p = next_power_of_two(2 * (2 * static_cast<std::size_t>(sigma) + 2) * nmax + 2);
  const double a = basis.lattice.period[0];
  std::vector<double> y(p);
  for (std::size_t j = 0; j < p; ++j) y[j] = a * static_cast<double>(j) / static_cast<double>(p);
  auto f = periodic_function_samples(c, basis, y);
  for (auto& v : f) v *= std::pow(std::norm(v), sigma);
  Fft1d(p).forward(f);
  Coefficients out(c.size());
  const auto ip = static_cast<long>(p);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const long n = basis.index[static_cast<std::size_t>(i)][0];
    out(i) = f[static_cast<std::size_t>(((n % ip) + ip) % ip)] / static_cast<double>(p);
  }
  return out;
}

double l2_error(const FieldState& a, const FieldState& b) {
  if (!a.grid.same_as(b.grid) || a.values.size() != b.values.size())
    throw DomainError("l2_error: grid mismatch");
  if (std::abs(a.epsilon - b.epsilon) > 1e-14 * a.epsilon)
    throw DomainError("l2_error: epsilon mismatch");
  ComplexField d(a.values.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = a.values[j] - b.values[j];
  return l2_norm(d, a.grid.spacing());
}

// --------------------------------------------------------------- model

PacketModel::PacketModel(const BlochProblem& problem, PacketSpec spec,
                         NonlinearitySpec nonlinearity, double gap_tolerance)
    : spec_(spec), nonlinearity_(std::move(nonlinearity)), gap_tolerance_(gap_tolerance) {
  if (problem.dimension() != 1) throw DomainError("packets are implemented for d = 1");
  if (!(spec_.epsilon > 0.0 && spec_.epsilon <= 1.0))
    throw ConfigurationError("epsilon must lie in (0, 1]");
  const auto k = kpoint(spec_.p0);
  const double gap = band_gap_at(problem, k, spec_.band);
  if (gap < gap_tolerance) {
    std::ostringstream msg;
    msg << "band " << spec_.band << " is not simple at p0 = " << spec_.p0 << " (gap " << gap
        << ")";
    throw NearDegeneracyError(msg.str(), gap);
  }
  pair_ = solve_band(problem, k, spec_.band);
  hamiltonian_ = build_hamiltonian(problem, k);
  velocity_ = group_velocity(pair_)(0);
  dk_chi_ = nlcs::dk_chi(pair_, hamiltonian_, gap_tolerance)[0];
  params_ = effective_params(pair_, hamiltonian_, problem, nonlinearity_, gap_tolerance);

  const auto& basis = *pair_.basis;
  const ReducedResolvent resolvent(pair_, hamiltonian_, gap_tolerance);
  const auto& c = pair_.coefficients;
  u2_a_ = resolvent.solve(project_out(c, shifted_momentum(basis, spec_.p0, velocity_, dk_chi_)));
  u2_b_ = Coefficients::Zero(c.size());
  nonlinear_profile_ = Coefficients::Zero(c.size());
  if (params_.regime == Regime::critical) {
    if (const auto* l = std::get_if<LocalNonlinearity>(&nonlinearity_.kind)) {
      nonlinear_profile_ = power_nonlinearity_coefficients(c, basis, l->sigma);
      u2_b_ = -l->lambda * resolvent.solve(project_out(c, nonlinear_profile_));
    }
  }
}

PacketModel PacketModel::rotated(double theta) const {
  PacketModel m = *this;
  const cplx f = std::polar(1.0, theta);
  m.pair_ = pair_.rotated(theta);
  m.dk_chi_ *= f;
  m.u2_a_ *= f;
  m.u2_b_ *= f;
  m.nonlinear_profile_ *= f;
  return m;
}

double PacketModel::phase(double t, double x) const {
  return spec_.p0 * (x - spec_.q0) - t * pair_.energy;
}

RealField PacketModel::phase(double t, const PeriodicGrid& grid) const {
  RealField out(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) out[j] = phase(t, grid.point(j));
  return out;
}

struct PacketModel::Samples {
  ComplexField u, uz, uzz;
  std::vector<double> y;
};

PacketModel::Samples PacketModel::sample(const EnvelopeState& u, const PeriodicGrid& grid,
                                         bool derivatives, bool check_edges) const {
  Samples s;
  const double eps = spec_.epsilon;
  const double q = center(u.t);
  const double scale = 1.0 / std::sqrt(eps);
  std::vector<double> z(grid.n);
  s.y.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.point(j);
    z[j] = (x - q) * scale;
    s.y[j] = x / eps;
  }
  auto interpolate = [&](std::span<const cplx> values) {
    ComplexField out(grid.n);
    kernels::trig_interpolate(interpolation_coefficients(values), u.grid, z, out);
    return out;
  };
  s.u = interpolate(u.values);
  const double peak = sup_norm(u.values);
  const double edge = std::max(std::abs(s.u.front()), std::abs(s.u.back()));
  if (check_edges && edge > kEdgeTolerance * peak) {
    std::ostringstream msg;
    msg << "packet reaches the box boundary at t = " << u.t << " (|u| = " << edge
        << " at the edge); enlarge L_x";
    throw DomainError(msg.str());
  }
  if (derivatives) {
    s.uz = interpolate(spectral_derivative(u.values, u.grid, 1));
    s.uzz = interpolate(spectral_derivative(u.values, u.grid, 2));
  }
  return s;
}

FieldState PacketModel::assemble(const EnvelopeState& u, const PeriodicGrid& grid,
                                 PacketOrder order) const {
  const double eps = spec_.epsilon;
  const bool higher = order != PacketOrder::leading;
  const auto s = sample(u, grid, higher, true);
  const auto& basis = *pair_.basis;
  const auto chi = periodic_function_samples(pair_.coefficients, basis, s.y);
  ComplexField dchi, a, b;
  if (higher) dchi = periodic_function_samples(dk_chi_, basis, s.y);
  if (order == PacketOrder::second) {
    a = periodic_function_samples(u2_a_, basis, s.y);
    b = periodic_function_samples(u2_b_, basis, s.y);
  }
  int sigma = 1;
  if (const auto* l = std::get_if<LocalNonlinearity>(&nonlinearity_.kind)) sigma = l->sigma;
  const double pref = std::pow(eps, -0.25);
  const double root = std::sqrt(eps);
  const cplx I{0.0, 1.0};
  FieldState out{eps, grid, ComplexField(grid.n), u.t};
  for (std::size_t j = 0; j < grid.n; ++j) {
    cplx v = s.u[j] * chi[j];
    if (higher) v += root * (-I * s.uz[j] * dchi[j]);
    if (order == PacketOrder::second) {
      const cplx nl = s.u[j] * std::pow(std::norm(s.u[j]), sigma);
      v += eps * (s.uzz[j] * a[j] + nl * b[j]);
    }
    out.values[j] = pref * v * std::polar(1.0, phase(u.t, grid.point(j)) / eps);
  }
  return out;
}

FieldState PacketModel::initial_data(const EnvelopeState& u0, const PeriodicGrid& grid,
                                     bool well_prepared) const {
  return assemble(u0, grid, well_prepared ? PacketOrder::first : PacketOrder::leading);
}

ComplexField PacketModel::corrector_U1(const EnvelopeState& u, const PeriodicGrid& grid) const {
  const auto s = sample(u, grid, true, false);
  const auto dchi = periodic_function_samples(dk_chi_, *pair_.basis, s.y);
  ComplexField out(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) out[j] = cplx{0.0, -1.0} * s.uz[j] * dchi[j];
  return out;
}

ComplexField PacketModel::corrector_U2(const EnvelopeState& u, const PeriodicGrid& grid) const {
  const auto s = sample(u, grid, true, false);
  const auto a = periodic_function_samples(u2_a_, *pair_.basis, s.y);
  const auto b = periodic_function_samples(u2_b_, *pair_.basis, s.y);
  int sigma = 1;
  if (const auto* l = std::get_if<LocalNonlinearity>(&nonlinearity_.kind)) sigma = l->sigma;
  ComplexField out(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j)
    out[j] = s.uzz[j] * a[j] + s.u[j] * std::pow(std::norm(s.u[j]), sigma) * b[j];
  return out;
}

HierarchyResiduals PacketModel::hierarchy_residuals(const EnvelopeState& u) const {
  const auto& basis = *pair_.basis;
  const auto& c = pair_.coefficients;
  const Eigen::Index size = c.size();
  const Eigen::MatrixXcd l0 =
      hamiltonian_ - pair_.energy * Eigen::MatrixXcd::Identity(size, size);
  const auto uz = spectral_derivative(u.values, u.grid, 1);
  const auto uzz = spectral_derivative(u.values, u.grid, 2);
  const double mass = params_.mass_tensor(0, 0);
  const bool critical = params_.regime == Regime::critical;

  // Effective potential G(z) of the envelope equation and N(U0).
  RealField g(u.grid.n, 0.0);
  int sigma = 1;
  double lambda = 0.0;
  if (critical) {
    if (const auto* l = std::get_if<LocalNonlinearity>(&nonlinearity_.kind)) {
      sigma = l->sigma;
      lambda = l->lambda;
      kernels::density_power(u.values, sigma, params_.coupling, g);
    } else if (const auto* h = std::get_if<HomogeneousKernel>(&nonlinearity_.kind)) {
      RealField rho(u.grid.n);
      kernels::density_power(u.values, 1, 1.0, rho);
      g = convolution_homogeneous(rho, u.grid, h->mu);
      for (auto& v : g) v *= h->lambda;
    } else {
      std::fill(g.begin(), g.end(),
                std::get<SmoothKernel>(nonlinearity_.kind).at_zero() * u.mass());
    }
  }

  const Coefficients w = shifted_momentum(basis, spec_.p0, velocity_, c);
  const Coefficients wd = shifted_momentum(basis, spec_.p0, velocity_, dk_chi_);
  const Coefficients l0c = l0 * c;
  const Coefficients l0d = l0 * dk_chi_;
  const Coefficients l0a = l0 * u2_a_;
  const Coefficients l0b = l0 * u2_b_;
  const cplx I{0.0, 1.0};
  HierarchyResiduals r;
  for (std::size_t j = 0; j < u.grid.n; ++j) {
    const cplx uj = u.values[j];
    const cplx nl = uj * std::pow(std::norm(uj), sigma);
    r.first = std::max(r.first, (l0c * uj).norm());
    // L0 U1 + L1 U0 with U1 = -i u_z dchi, L1 = -i (g + p0 - v) d/dz.
    const Coefficients second = -I * uz[j] * l0d - I * uz[j] * w;
    r.second = std::max(r.second, second.norm());
    // L1 U1 = -(g + p0 - v) dchi u_zz;  L2 U0 = (-i u_t - u_zz / 2) chi with
    // -i u_t = M u_zz / 2 - G u from the envelope equation.
    const Coefficients u2 = uzz[j] * u2_a_ + nl * u2_b_;
    Coefficients third = uzz[j] * l0a + nl * l0b - uzz[j] * wd +
                         (0.5 * (mass - 1.0) * uzz[j] - g[j] * uj) * c;
    if (critical) {
      if (nonlinearity_.is_local())
        third += lambda * nl * nonlinear_profile_;
      else
        third += g[j] * uj * c;
    }
    r.third = std::max(r.third, third.norm());
    r.orthogonality_u1 = std::max(r.orthogonality_u1, std::abs(c.dot(dk_chi_) * uz[j]));
    r.orthogonality_u2 = std::max(r.orthogonality_u2, std::abs(c.dot(u2)));
  }
  return r;
}

}  // namespace nlcs
