#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlcs/effective.hpp"
#include "nlcs/errors.hpp"

using namespace nlcs;

namespace {

NonlinearitySpec local(int sigma, double lambda, double alpha) {
  return {LocalNonlinearity{sigma, lambda}, alpha};
}

NonlinearitySpec cubic_critical(double lambda = 1.0) { return local(1, lambda, 1.5); }

EffectiveParams params_2d(double m1, double m2, double coupling) {
  EffectiveParams p;
  p.mass_tensor = Eigen::Matrix2d{{m1, 0.0}, {0.0, m2}};
  p.coupling = coupling;
  p.nonlinearity = local(1, coupling, 2.0);
  p.regime = Regime::critical;
  return p;
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("critical exponents") {
  CHECK(critical_alpha(local(1, 1.0, 1.5), 1) == doctest::Approx(1.5));
  CHECK(critical_alpha({HomogeneousKernel{-1.0, 1.0}, 1.5}, 3) == doctest::Approx(1.5));
  CHECK(critical_alpha({SmoothKernel::gaussian(), 1.0}, 1) == doctest::Approx(1.0));
  CHECK(critical_alpha(local(2, 1.0, 2.0), 1) == doctest::Approx(2.0));
  CHECK(is_critical(cubic_critical(), 1));
  CHECK_FALSE(is_critical(local(1, 1.0, 2.5), 1));
}

TEST_CASE("nonlinearity validation") {
  CHECK_NOTHROW(cubic_critical().validate(1));
  CHECK_THROWS_AS(local(0, 1.0, 1.5).validate(1), ConfigurationError);
  CHECK_THROWS_AS(local(1, 1.0, 1.2).validate(1), ConfigurationError);
  CHECK_THROWS_AS(NonlinearitySpec({HomogeneousKernel{0.0, 1.0}, 1.0}).validate(1),
                  ConfigurationError);
  CHECK_THROWS_AS(NonlinearitySpec({HomogeneousKernel{-1.0, 1.0}, 1.5}).validate(1),
                  ConfigurationError);
  CHECK_NOTHROW(NonlinearitySpec({HomogeneousKernel{-1.0, 1.0}, 1.5}).validate(3));
  CHECK_THROWS_AS(NonlinearitySpec({HomogeneousKernel{2.5, 1.0}, 0.0}).validate(1),
                  ConfigurationError);
}

TEST_CASE("effective coupling") {
  const BlochProblem free(Lattice::cubic(1), PeriodicPotential::zero(1), 8);
  const auto free_pair = solve_band(free, kpoint(0.3), 0);
  CHECK(effective_coupling(free_pair, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(effective_coupling(free_pair, 2, -3.0) == doctest::Approx(-3.0).epsilon(1e-13));

  const BlochProblem mathieu(Lattice::cubic(1), PeriodicPotential::cosine(1.0), 16);
  const auto pair = solve_band(mathieu, kpoint(0.5 * kPi), 0);
  CHECK(effective_coupling(pair, 1, 0.0) == 0.0);
  const double base = effective_coupling(pair, 1, 1.0);
  const double doubled = effective_coupling(pair, 1, 1.0, 2 * 8 * 33);
  CHECK(std::abs(base - doubled) <= 1e-10 * std::abs(base));
  // Jensen: the mean of |chi|^4 is at least the squared mean of |chi|^2 = 1.
  CHECK(base > 1.0);
  CHECK(effective_coupling(pair, 1, -2.0) == doctest::Approx(-2.0 * base).epsilon(1e-14));
}

TEST_CASE("effective parameters for the Mathieu band") {
  const BlochProblem mathieu(Lattice::cubic(1), PeriodicPotential::cosine(1.0), 16);
  const auto k = kpoint(0.5 * kPi);
  const auto h = build_hamiltonian(mathieu, k);
  const auto pair = solve_band(mathieu, k, 0);
  const auto p = effective_params(pair, h, mathieu, cubic_critical(1.0));
  CHECK(p.regime == Regime::critical);
  CHECK(p.mass_tensor.rows() == 1);
  CHECK(p.coupling == doctest::Approx(effective_coupling(pair, 1, 1.0)));
  const auto q = effective_params(pair, h, mathieu, local(1, 1.0, 2.5));
  CHECK(q.regime == Regime::supercritical);
  CHECK_THROWS_AS(effective_params(pair, h, mathieu, local(1, 1.0, 1.0)), ConfigurationError);
}

TEST_CASE("global existence classifier") {
  const auto spec = cubic_critical();
  CHECK(classify_global_existence(EffectiveParams::one_dimensional(1.0, 1.0, spec)) ==
        ExistenceClass::global);
  CHECK(classify_global_existence(EffectiveParams::one_dimensional(-1.0, -1.0, spec)) ==
        ExistenceClass::global);
  CHECK(classify_global_existence(EffectiveParams::one_dimensional(1.0, -1.0, spec)) ==
        ExistenceClass::possible_blowup);
  CHECK(classify_global_existence(params_2d(1.0, -1.0, 1.0)) == ExistenceClass::unknown);
  CHECK(classify_global_existence(params_2d(1.0, -1.0, -7.0)) == ExistenceClass::unknown);
  CHECK(classify_global_existence(params_2d(2.0, 0.5, -1.0)) == ExistenceClass::possible_blowup);
  CHECK(to_string(ExistenceClass::possible_blowup) == "possible_blowup");

  const auto super = EffectiveParams::one_dimensional(1.0, -1.0, local(1, -1.0, 2.5));
  CHECK(classify_global_existence(super) == ExistenceClass::global);
  const auto hartree =
      EffectiveParams::one_dimensional(1.0, 0.0, {HomogeneousKernel{-0.5, 1.0}, 1.25});
  CHECK_THROWS_AS(classify_global_existence(hartree), DomainError);
}

TEST_CASE("classifier is invariant under a joint sign flip") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = params_2d(dist(rng), dist(rng), dist(rng));
    auto q = p;
    q.mass_tensor = -p.mass_tensor;
    q.coupling = -p.coupling;
    CHECK(classify_global_existence(p) == classify_global_existence(q));
  }
}

TEST_CASE("free Gaussian spreads exactly") {
  const auto grid = PeriodicGrid::centered(40.0 * kPi, 1 << 12);
  const auto u0 = gaussian_envelope(grid);
  const auto params = EffectiveParams::one_dimensional(1.0, 0.0, cubic_critical(0.0));
  const auto u = evolve_envelope(u0, params, 1e-2, 1.0);
  CHECK(u.t == 1.0);
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double z = grid.point(j);
    const double exact = std::exp(-z * z / 2.0) / std::sqrt(2.0);
    err = std::max(err, std::abs(std::norm(u.values[j]) - exact));
  }
  CHECK(err <= 1e-6);

  // Negative mass spreads at the same rate.
  const auto neg = EffectiveParams::one_dimensional(-1.0, 0.0, cubic_critical(0.0));
  const auto v = evolve_envelope(u0, neg, 1e-2, 1.0);
  for (std::size_t j = 0; j < grid.n; j += 64)
    CHECK(std::abs(v.values[j]) == doctest::Approx(std::abs(u.values[j])).epsilon(1e-12));
}

TEST_CASE("focusing cubic soliton keeps its shape") {
  const auto grid = PeriodicGrid::centered(40.0 * kPi, 1 << 12);
  const auto u0 = sech_envelope(grid);
  const auto params = EffectiveParams::one_dimensional(1.0, -1.0, cubic_critical(-1.0));
  EnvelopeDiagnostics diag;
  const auto u = evolve_envelope(u0, params, 1e-3, 2.0, {}, &diag);
  double drift = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j)
    drift = std::max(drift, std::abs(std::abs(u.values[j]) - 1.0 / std::cosh(grid.point(j))));
  CHECK(drift <= 1e-6);
  CHECK(diag.steps == 2000);
  CHECK(diag.relative_mass_drift() <= 2e-12);
  CHECK(diag.warnings.empty());
}

TEST_CASE("mass is conserved to roundoff") {
  const auto grid = PeriodicGrid::centered(20.0 * kPi, 1 << 10);
  const auto u0 = gaussian_envelope(grid, 1.0, 1.2);
  const auto params = EffectiveParams::one_dimensional(0.7, 2.0, cubic_critical(2.0));
  EnvelopeDiagnostics diag;
  evolve_envelope(u0, params, 1e-3, 1.0, {}, &diag);
  CHECK(diag.steps == 1000);
  CHECK(diag.relative_mass_drift() <= 1e-12);
}

TEST_CASE("Strang splitting is second order") {
  const auto grid = PeriodicGrid::centered(20.0 * kPi, 1 << 10);
  const auto u0 = gaussian_envelope(grid, 1.0, 1.5);
  const auto params = EffectiveParams::one_dimensional(1.0, -1.0, cubic_critical(-1.0));
  const double dt = 0.05;
  const auto ref = evolve_envelope(u0, params, dt / 8, 1.0);
  const auto coarse = evolve_envelope(u0, params, dt, 1.0);
  const auto fine = evolve_envelope(u0, params, dt / 2, 1.0);
  const double ratio = max_abs_diff(coarse.values, ref.values) /
                       max_abs_diff(fine.values, ref.values);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("supercritical evolution ignores the nonlinearity") {
  const auto grid = PeriodicGrid::centered(20.0 * kPi, 1 << 10);
  const auto u0 = gaussian_envelope(grid);
  const auto a = evolve_envelope(
      u0, EffectiveParams::one_dimensional(0.8, 1.0, local(1, 1.0, 2.5)), 1e-2, 1.0);
  const auto b = evolve_envelope(
      u0, EffectiveParams::one_dimensional(0.8, -5.0, local(2, -5.0, 3.0)), 1e-2, 1.0);
  const auto c = evolve_envelope(
      u0, EffectiveParams::one_dimensional(0.8, 0.0, {HomogeneousKernel{1.0, 3.0}, 1.0}),
      1e-2, 1.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    REQUIRE(a.values[j] == b.values[j]);
    REQUIRE(a.values[j] == c.values[j]);
  }
}

TEST_CASE("smooth-kernel envelope reduces to the free one by a gauge") {
  const auto grid = PeriodicGrid::centered(40.0 * kPi, 1 << 12);
  const auto u0 = gaussian_envelope(grid);
  const auto kernel = SmoothKernel::gaussian(2.0, 1.0);
  const auto smooth = EffectiveParams::one_dimensional(1.0, 0.0, {kernel, 1.0});
  const auto free = EffectiveParams::one_dimensional(1.0, 0.0, cubic_critical(0.0));
  const auto u = evolve_envelope(u0, smooth, 1e-2, 1.0);
  const auto v = gauge_away_constant(u, kernel.at_zero(), u0.mass());
  const auto w = evolve_envelope(u0, free, 1e-2, 1.0);
  CHECK(max_abs_diff(v.values, w.values) <= 1e-8);
  for (std::size_t j = 0; j < grid.n; ++j)
    REQUIRE(std::abs(std::abs(v.values[j]) - std::abs(u.values[j])) <= 1e-15);

  const auto same = gauge_away_constant(u, 0.0, u0.mass());
  CHECK(max_abs_diff(same.values, u.values) == 0.0);
}

TEST_CASE("homogeneous convolution of a point mass") {
  const auto grid = PeriodicGrid::centered(8.0, 256);
  RealField delta(grid.n, 0.0);
  const std::size_t c = grid.n / 2;
  REQUIRE(std::abs(grid.point(c)) < 1e-14);
  delta[c] = 1.0 / grid.spacing();
  const auto out = convolution_homogeneous(delta, grid, 2.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double z = grid.point(j);
    CHECK(out[j] == doctest::Approx(z * z).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("homogeneous convolution symmetry, linearity and translation") {
  const auto grid = PeriodicGrid::centered(30.0, 512);
  auto bump = [&](double shift) {
    RealField r(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) r[j] = std::exp(-std::pow(grid.point(j) - shift, 2));
    return r;
  };
  const auto even = bump(0.0);
  const auto out = convolution_homogeneous(even, grid, 1.0);
  // Grid is symmetric about index n/2, so z_j and z_{n-j} are mirror images.
  for (std::size_t j = 1; j < grid.n; ++j)
    CHECK(out[j] == doctest::Approx(out[grid.n - j]).epsilon(1e-13));

  const auto other = bump(2.0);
  RealField mix(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) mix[j] = 2.0 * even[j] - 0.5 * other[j];
  const auto lhs = convolution_homogeneous(mix, grid, -0.5);
  const auto a = convolution_homogeneous(even, grid, -0.5);
  const auto b = convolution_homogeneous(other, grid, -0.5);
  for (std::size_t j = 0; j < grid.n; ++j)
    CHECK(lhs[j] == doctest::Approx(2.0 * a[j] - 0.5 * b[j]).epsilon(1e-12).scale(1.0));

  // Shift by 20 grid cells.
  const double shift = 20 * grid.spacing();
  const auto moved = convolution_homogeneous(bump(shift), grid, -0.5);
  for (std::size_t j = 100; j + 120 < grid.n; ++j)
    CHECK(moved[j + 20] == doctest::Approx(a[j]).epsilon(1e-12));
}

TEST_CASE("homogeneous convolution matches adaptive quadrature") {
  const auto grid = PeriodicGrid::centered(40.0, 1 << 12);
  RealField rho(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) rho[j] = std::exp(-grid.point(j) * grid.point(j));
  std::vector<std::string> warnings;
  const auto out = convolution_homogeneous(rho, grid, -0.5, &warnings);
  CHECK(warnings.empty());
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (std::size_t j = grid.n / 2 - 500; j <= grid.n / 2 + 500; j += 111) {
    const double z = grid.point(j);
    auto f = [z](double s) { return std::pow(s, -0.5) * std::exp(-(z - s) * (z - s)); };
    auto g = [z](double s) { return std::pow(s, -0.5) * std::exp(-(z + s) * (z + s)); };
    const double exact = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity()) +
                         integrator.integrate(g, 0.0, std::numeric_limits<double>::infinity());
    CHECK(out[j] == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("homogeneous convolution warns on truncated data") {
  const auto grid = PeriodicGrid::centered(4.0, 64);
  RealField rho(grid.n, 1.0);
  std::vector<std::string> warnings;
  convolution_homogeneous(rho, grid, 1.0, &warnings);
  CHECK(warnings.size() == 1);
  CHECK_THROWS_AS(convolution_homogeneous(rho, grid, 0.0), DomainError);
}

TEST_CASE("homogeneous-kernel envelope conserves mass") {
  const auto grid = PeriodicGrid::centered(40.0, 512);
  const auto u0 = gaussian_envelope(grid);
  const auto params =
      EffectiveParams::one_dimensional(1.0, 0.0, {HomogeneousKernel{-0.5, 1.0}, 1.25});
  EnvelopeDiagnostics diag;
  const auto u = evolve_envelope(u0, params, 1e-2, 0.5, {}, &diag);
  CHECK(diag.relative_mass_drift() <= 1e-12);
  CHECK(std::isfinite(u.values[grid.n / 2].real()));
}

TEST_CASE("focusing quintic with large data aborts with a blow-up estimate") {
  const auto grid = PeriodicGrid::centered(40.0, 1 << 12);
  const auto u0 = gaussian_envelope(grid, 1.0, 4.0);
  const auto params = EffectiveParams::one_dimensional(1.0, -1.0, local(2, -1.0, 2.0));
  CHECK(classify_global_existence(params) == ExistenceClass::possible_blowup);
  bool aborted = false;
  try {
    evolve_envelope(u0, params, 1e-4, 1.0);
  } catch (const BlowupError& e) {
    aborted = true;
    CHECK(std::isfinite(e.tc_estimate()));
    CHECK(e.tc_estimate() >= e.abort_time());
    CHECK(e.abort_time() < 1.0);
    MESSAGE("abort at t = " << e.abort_time() << ", T_c ~ " << e.tc_estimate() << " " << std::string(e.what()));
  }
  CHECK(aborted);
}

TEST_CASE("envelope input validation") {
  const auto grid = PeriodicGrid::centered(10.0, 100);
  const auto params = EffectiveParams::one_dimensional(1.0, 0.0, cubic_critical(0.0));
  CHECK_THROWS_AS(EnvelopeSolver(gaussian_envelope(grid), params), ConfigurationError);
  const auto good = PeriodicGrid::centered(10.0, 128);
  EnvelopeSolver solver(gaussian_envelope(good), params);
  CHECK_THROWS_AS(solver.advance_to(1.0, 0.0), ConfigurationError);
  CHECK_FALSE(solver.diagnostics().warnings.empty());  // e^{-25/2} at the edge
}
