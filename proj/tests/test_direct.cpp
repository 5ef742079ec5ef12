#include <cmath>

#include "doctest.h"
#include "nlcs/direct.hpp"
#include "nlcs/errors.hpp"

using namespace nlcs;

namespace {

const cplx I{0.0, 1.0};

// Free Gaussian packet eps^{-1/4} u((x - q)/sqrt(eps)) e^{i p (x - q)/eps} with
// u solving i u_t + u_zz / 2 = 0, u0 = exp(-z^2 / 2).
cplx free_packet(double x, double t, double eps, double p, double q0) {
  const double q = q0 + p * t;
  const double z = (x - q) / std::sqrt(eps);
  const cplx u = std::exp(-z * z / (2.0 * (1.0 + I * t))) / std::sqrt(1.0 + I * t);
  const double phase = p * (x - q0) - 0.5 * p * p * t;
  return std::pow(eps, -0.25) * u * std::exp(I * phase / eps);
}

FieldState packet_state(double eps, const PeriodicGrid& grid, double p, double q0) {
  FieldState s{eps, grid, ComplexField(grid.n), 0.0};
  for (std::size_t j = 0; j < grid.n; ++j) s.values[j] = free_packet(grid.point(j), 0.0, eps, p, q0);
  return s;
}

BlochProblem free_problem() { return {Lattice::cubic(1), PeriodicPotential::zero(1), 4}; }
BlochProblem mathieu() { return {Lattice::cubic(1), PeriodicPotential::cosine(1.0), 8}; }

NonlinearitySpec linear() { return {LocalNonlinearity{1, 0.0}, 1.5}; }
NonlinearitySpec cubic() { return {LocalNonlinearity{1, 1.0}, 1.5}; }

double l2_distance(const ComplexField& a, const ComplexField& b, double h) {
  ComplexField d(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d[j] = a[j] - b[j];
  return l2_norm(d, h);
}

}  // namespace

TEST_CASE("field grid construction and validation") {
  const auto g = field_grid(1.0 / 16, 1.0, 64, 16);
  CHECK(g.n == 1024);
  CHECK(g.length == doctest::Approx(4.0));
  CHECK(field_grid_for_length(1.0 / 32, 1.0, 4.0, 16).n == 2048);
  CHECK_THROWS_AS(field_grid_for_length(0.3, 1.0, 4.0, 16), ConfigurationError);
  CHECK_THROWS_AS(field_grid(0.1, 1.0, 10, 8), ConfigurationError);

  FieldState s{1.0 / 16, PeriodicGrid::centered(4.0, 512), ComplexField(512), 0.0};
  CHECK_THROWS_AS(s.validate(1.0), ConfigurationError);  // 8 points per period
  s.grid = PeriodicGrid::centered(4.1, 1024);
  s.values.resize(1024);
  CHECK_THROWS_AS(s.validate(1.0), ConfigurationError);  // fractional periods
  s.grid = PeriodicGrid::centered(4.0, 1024);
  CHECK_NOTHROW(s.validate(1.0));
  s.epsilon = 1.5;
  CHECK_THROWS_AS(s.validate(1.0), ConfigurationError);
}

TEST_CASE("sampled potential is periodic on the fine scale") {
  const double eps = 1.0 / 8;
  const auto g = field_grid(eps, 1.0, 16, 16);
  const auto v = sample_potential(PeriodicPotential::cosine(1.0), 1.0, g, eps);
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(v[j] == doctest::Approx(std::cos(kTwoPi * g.point(j) / eps)).scale(1.0).epsilon(1e-12));
    CHECK(v[j] == doctest::Approx(v[(j + 16) % g.n]).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("free packet matches the exact solution") {
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 8.0, 16);
  const auto psi0 = packet_state(eps, grid, 0.5, 0.0);
  DirectDiagnostics diag;
  const auto psi = evolve_direct(psi0, free_problem(), linear(), default_direct_dt(eps), 1.0, &diag);
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    err = std::max(err, std::abs(psi.values[j] - free_packet(grid.point(j), 1.0, eps, 0.5, 0.0)));
  CHECK(err <= 1e-6);
  CHECK(diag.steps == 320);
  CHECK(diag.relative_mass_drift() <= 1e-12);
}

TEST_CASE("direct mass conservation with potential and nonlinearity") {
  const double eps = 1.0 / 32;
  const auto grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  const auto psi0 = packet_state(eps, grid, 0.5 * kPi, 0.0);
  DirectDiagnostics diag;
  evolve_direct(psi0, mathieu(), cubic(), 1e-3, 1.0, &diag);
  CHECK(diag.steps == 1000);
  CHECK(diag.relative_mass_drift() <= 1e-12);
  REQUIRE(diag.mass_log.size() == 2);
}

TEST_CASE("epsilon rescaling of the free equation") {
  // psi^eps(t, x) = Psi(t / eps, x / eps) where Psi solves the eps = 1 problem.
  const double eps = 0.25;
  const std::size_t n = 1024;
  FieldState small{eps, PeriodicGrid::centered(16.0, n), ComplexField(n), 0.0};
  FieldState unit{1.0, PeriodicGrid::centered(64.0, n), ComplexField(n), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double x = small.grid.point(j);
    small.values[j] = std::exp(-x * x + I * 2.0 * x);
    unit.values[j] = small.values[j];
  }
  const auto a = evolve_direct(small, free_problem(), linear(), 0.01 * eps, 0.5);
  const auto b = evolve_direct(unit, free_problem(), linear(), 0.01, 0.5 / eps);
  CHECK(l2_distance(a.values, b.values, 1.0) <= 1e-8);
}

TEST_CASE("grid and time refinement") {
  const double eps = 1.0 / 16;
  const auto coarse_grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  const auto fine_grid = field_grid_for_length(eps, 1.0, 4.0, 32);
  const double dt = default_direct_dt(eps);
  const auto a = evolve_direct(packet_state(eps, coarse_grid, 0.5 * kPi, -0.5), mathieu(),
                               cubic(), dt, 1.0);
  const auto b = evolve_direct(packet_state(eps, fine_grid, 0.5 * kPi, -0.5), mathieu(),
                               cubic(), dt, 1.0);
  ComplexField restricted(coarse_grid.n);
  for (std::size_t j = 0; j < coarse_grid.n; ++j) restricted[j] = b.values[2 * j];
  const double grid_change = l2_distance(a.values, restricted, coarse_grid.spacing());
  MESSAGE("grid refinement change " << grid_change);
  CHECK(grid_change <= 1e-6);

  const auto psi0 = packet_state(eps, coarse_grid, 0.5 * kPi, -0.5);
  const double big = dt;
  const auto ref = evolve_direct(psi0, mathieu(), cubic(), big / 8, 0.5);
  const auto e1 = l2_distance(evolve_direct(psi0, mathieu(), cubic(), big, 0.5).values,
                              ref.values, coarse_grid.spacing());
  const auto e2 = l2_distance(evolve_direct(psi0, mathieu(), cubic(), big / 2, 0.5).values,
                              ref.values, coarse_grid.spacing());
  MESSAGE("time refinement ratio " << e1 / e2);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("nonlocal term with a constant kernel") {
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  const auto psi = packet_state(eps, grid, 1.0, 0.0);
  const auto out = nonlocal_term(psi, [](double) { return 3.0; });
  for (double v : out) CHECK(v == doctest::Approx(3.0 * psi.mass()).epsilon(1e-12));
}

TEST_CASE("nonlocal term parity and fast path") {
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  const auto psi = packet_state(eps, grid, 1.0, 0.0);
  for (const NonlinearitySpec spec :
       {NonlinearitySpec{SmoothKernel{1.0, -0.5, 0.1, 0.3, 2.0, 0.7}, 1.0},
        NonlinearitySpec{HomogeneousKernel{-0.5, 1.0}, 1.25},
        NonlinearitySpec{HomogeneousKernel{1.0, 1.0}, 1.0}}) {
    CAPTURE(spec.describe());
    std::vector<std::string> warnings;
    const auto slow = nonlocal_term(psi, spec, false, &warnings);
    const auto fast = nonlocal_term(psi, spec, true);
    CHECK(warnings.empty());
    double scale = 0.0, diff = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
      scale = std::max(scale, std::abs(slow[j]));
      diff = std::max(diff, std::abs(slow[j] - fast[j]));
    }
    CHECK(diff <= 1e-12 * scale);
    // Packet centered at x = 0, which is node n/2; mirror of node j is n - j.
    for (std::size_t j = 1; j < grid.n; ++j)
      REQUIRE(slow[j] == doctest::Approx(slow[grid.n - j]).epsilon(1e-12).scale(scale));
  }
  CHECK_THROWS_AS(nonlocal_term(psi, cubic()), DomainError);
}

TEST_CASE("Gaussian kernel against a Gaussian density") {
  // int exp(-(x - y)^2) exp(-y^2 / s^2) dy = sqrt(pi) s / sqrt(1 + s^2) exp(-x^2 / (1 + s^2))
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 16.0, 16);
  const double s = 0.7;
  FieldState psi{eps, grid, ComplexField(grid.n), 0.0};
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.point(j);
    psi.values[j] = std::exp(-x * x / (2.0 * s * s)) * std::exp(I * 5.0 * x);
  }
  const auto out = nonlocal_term(psi, {SmoothKernel::gaussian(), 1.0});
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.point(j);
    const double exact = std::sqrt(kPi) * s / std::sqrt(1.0 + s * s) * std::exp(-x * x / (1.0 + s * s));
    if (std::abs(x) < 4.0) err = std::max(err, std::abs(out[j] - exact));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("smooth-kernel field conserves mass") {
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  DirectDiagnostics diag;
  evolve_direct(packet_state(eps, grid, 0.5 * kPi, 0.0), mathieu(),
                {SmoothKernel::gaussian(1.0, 1.0), 1.0}, default_direct_dt(eps), 0.5, &diag);
  CHECK(diag.relative_mass_drift() <= 1e-12);
}

TEST_CASE("resumable stepping reproduces a single run") {
  const double eps = 1.0 / 16;
  const auto grid = field_grid_for_length(eps, 1.0, 4.0, 16);
  const auto psi0 = packet_state(eps, grid, 0.5 * kPi, 0.0);
  DirectSolver solver(psi0, mathieu(), cubic());
  solver.advance_to(0.25, 0.005);
  solver.advance_to(0.5, 0.005);
  const auto once = evolve_direct(psi0, mathieu(), cubic(), 0.005, 0.5);
  CHECK(l2_distance(solver.state().values, once.values, grid.spacing()) <= 1e-12);
  CHECK(solver.diagnostics().mass_log.size() == 3);
}
