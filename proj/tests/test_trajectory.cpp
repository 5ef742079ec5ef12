#include <cmath>
#include <random>

#include "doctest.h"
#include "nlcs/errors.hpp"
#include "nlcs/trajectory.hpp"

using namespace nlcs;

namespace {

BlochProblem mathieu() { return {Lattice::cubic(1), PeriodicPotential::cosine(1.0), 16}; }

double state_distance(const Trajectory& a, const Trajectory& b) {
  const auto i = a.size() - 1, j = b.size() - 1;
  return std::abs(a.q[i] - b.q[j]) + std::abs(a.p[i] - b.p[j]) + std::abs(a.S[i] - b.S[j]);
}

}  // namespace

TEST_CASE("periodic spline reproduces smooth periodic data") {
  std::vector<double> y(256);
  const double h = kTwoPi / 256;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::sin(-kPi + h * static_cast<double>(j));
  const PeriodicSpline s(-kPi, kTwoPi, y);
  for (double x : {-3.0, -1.0, 0.123, 2.5, 10.0}) {
    CHECK(s(x) == doctest::Approx(std::sin(x)).epsilon(1e-8).scale(1.0));
    CHECK(s.derivative(x) == doctest::Approx(std::cos(x)).epsilon(1e-5).scale(1.0));
  }
  CHECK(s(-kPi + 3 * h) == doctest::Approx(y[3]).epsilon(1e-14).scale(1.0));
}

TEST_CASE("free flow without external force") {
  const auto traj = classical_trajectory(free_band(), ExternalPotential::zero(), 0.3, 1.2, 1.0, 1e-2);
  REQUIRE(traj.size() == 101);
  CHECK(traj.t.back() == 1.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.p[i] == 1.2);
    CHECK(traj.q[i] == doctest::Approx(0.3 + 1.2 * traj.t[i]).epsilon(1e-14));
    CHECK(traj.S[i] == doctest::Approx(traj.t[i] * (1.2 * 1.2 - 0.72)).epsilon(1e-13).scale(1.0));
  }
  // Phi reduces to p0 (x - q0) - t E(p0).
  const double x = 0.9, t = traj.t.back();
  CHECK(traj.phase(traj.size() - 1, x) ==
        doctest::Approx(1.2 * (x - 0.3) - t * 0.72).epsilon(1e-13));
}

TEST_CASE("Mathieu band flow without external force") {
  const auto problem = mathieu();
  const auto band = sampled_band(problem, 0);
  const double p0 = 0.5 * kPi;
  const auto traj = classical_trajectory(band, ExternalPotential::zero(), 0.0, p0, 1.0, 1e-2);
  const auto pair = solve_band(problem, kpoint(p0), 0);
  const double v = group_velocity(pair)(0);
  CHECK(traj.p.back() == p0);
  CHECK(traj.q.back() == doctest::Approx(v).epsilon(1e-5));
  CHECK(traj.S.back() == doctest::Approx(p0 * v - pair.energy).epsilon(1e-5));
}

TEST_CASE("harmonic oscillator on the free band") {
  const double q0 = 0.7, p0 = -0.4;
  const double T = kTwoPi;
  const auto potential = ExternalPotential::harmonic();
  const auto traj = classical_trajectory(free_band(), potential, q0, p0, T, 1e-3);
  CHECK(std::abs(traj.q.back() - (q0 * std::cos(T) + p0 * std::sin(T))) <= 1e-8);
  CHECK(std::abs(traj.p.back() - (p0 * std::cos(T) - q0 * std::sin(T))) <= 1e-8);
  // S = int p^2 - H dt = int (p^2 - q^2) / 2 dt, which vanishes over a period.
  CHECK(std::abs(traj.S.back()) <= 1e-8);
  const auto h = trajectory_energy(traj, free_band(), potential);
  double drift = 0.0;
  for (double e : h) drift = std::max(drift, std::abs(e - h.front()));
  CHECK(drift <= 1e-8);
}

TEST_CASE("RK4 order by step halving") {
  const auto potential = ExternalPotential::harmonic();
  auto err = [&](double dt) {
    const auto traj = classical_trajectory(free_band(), potential, 1.0, 0.0, 2.0, dt);
    return std::abs(traj.q.back() - std::cos(2.0)) + std::abs(traj.p.back() + std::sin(2.0));
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);

  // The C^2 spline leaves a ~1e-10 floor that hides the RK4 error under a
  // weak force, so the smooth trigonometric band is used here.
  const auto problem = mathieu();
  const auto band = sampled_band(problem, 0, 256, BandInterpolation::trigonometric);
  const auto lin = ExternalPotential::linear(0.1);
  const auto ref = classical_trajectory(band, lin, 0.0, 0.5 * kPi, 1.0, 1e-3);
  const double e1 = state_distance(classical_trajectory(band, lin, 0.0, 0.5 * kPi, 1.0, 0.25), ref);
  const double e2 = state_distance(classical_trajectory(band, lin, 0.0, 0.5 * kPi, 1.0, 0.125), ref);
  MESSAGE("Mathieu step-halving factor " << e1 / e2);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("spline velocity matches the perturbative group velocity") {
  const auto problem = mathieu();
  const auto band = sampled_band(problem, 0);
  const auto trig = sampled_band(problem, 0, 256, BandInterpolation::trigonometric);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> k(-kPi, kPi);
  double worst = 0.0, worst_trig = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double kk = k(rng);
    const auto pair = solve_band(problem, kpoint(kk), 0);
    const double v = group_velocity(pair)(0);
    worst = std::max(worst, std::abs(band.velocity(kk) - v));
    worst_trig = std::max(worst_trig, std::abs(trig.velocity(kk) - v));
    CHECK(band.energy(kk) == doctest::Approx(pair.energy).epsilon(1e-7));
    CHECK(trig.energy(kk) == doctest::Approx(pair.energy).epsilon(1e-11));
  }
  MESSAGE("max velocity error: spline " << worst << ", trigonometric " << worst_trig);
  CHECK(worst <= 1e-5);
  CHECK(worst_trig <= 1e-8);
}

TEST_CASE("trajectory aborts at a band crossing") {
  // Free lattice: bands 0 and 1 touch at the zone edge k = pi.
  const BlochProblem free(Lattice::cubic(1), PeriodicPotential::zero(1), 8);
  const auto band = sampled_band(free, 0);
  CHECK_THROWS_AS(classical_trajectory(band, ExternalPotential::linear(-1.0), 0.0, 2.5, 2.0, 1e-2,
                                       1e-2),
                  NearDegeneracyError);
  CHECK_THROWS_AS(sampled_band(free, 0, 100), ConfigurationError);
}
