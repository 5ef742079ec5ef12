#include "nlcs/trajectory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "nlcs/errors.hpp"

namespace nlcs {

PeriodicSpline::PeriodicSpline(double x0, double period, std::vector<double> values)
    : x0_(x0), period_(period), y_(std::move(values)) {
  const auto n = static_cast<Eigen::Index>(y_.size());
  if (n < 4) throw DomainError("periodic spline needs at least four samples");
  if (!(period > 0.0)) throw DomainError("periodic spline needs a positive period");
  h_ = period / static_cast<double>(n);
  // Cyclic tridiagonal system h/6 m_{i-1} + 2h/3 m_i + h/6 m_{i+1} = second difference.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index prev = (i + n - 1) % n, next = (i + 1) % n;
    a(i, prev) += h_ / 6.0;
    a(i, i) += 2.0 * h_ / 3.0;
    a(i, next) += h_ / 6.0;
    rhs(i) = (y_[static_cast<std::size_t>(next)] - 2.0 * y_[static_cast<std::size_t>(i)] +
              y_[static_cast<std::size_t>(prev)]) / h_;
  }
  const Eigen::VectorXd m = a.partialPivLu().solve(rhs);
  m_.assign(m.data(), m.data() + n);
}

std::size_t PeriodicSpline::locate(double x, double& s) const {
  double r = std::fmod(x - x0_, period_);
  if (r < 0.0) r += period_;
  const auto n = y_.size();
  auto i = static_cast<std::size_t>(r / h_);
  if (i >= n) i = n - 1;
  s = r - static_cast<double>(i) * h_;
  return i;
}

double PeriodicSpline::operator()(double x) const {
  double s = 0.0;
  const std::size_t i = locate(x, s);
  const std::size_t j = (i + 1) % y_.size();
  const double t = h_ - s;
  return m_[i] * t * t * t / (6.0 * h_) + m_[j] * s * s * s / (6.0 * h_) +
         (y_[i] / h_ - m_[i] * h_ / 6.0) * t + (y_[j] / h_ - m_[j] * h_ / 6.0) * s;
}

double PeriodicSpline::derivative(double x) const {
  double s = 0.0;
  const std::size_t i = locate(x, s);
  const std::size_t j = (i + 1) % y_.size();
  const double t = h_ - s;
  return -m_[i] * t * t / (2.0 * h_) + m_[j] * s * s / (2.0 * h_) +
         (y_[j] - y_[i]) / h_ - (m_[j] - m_[i]) * h_ / 6.0;
}

PeriodicTrigInterpolant::PeriodicTrigInterpolant(double x0, double period,
                                                 const std::vector<double>& values)
    : x0_(x0), period_(period) {
  const std::size_t n = values.size();
  if (n < 4 || n % 2 != 0) throw DomainError("trig interpolation needs an even sample count >= 4");
  const std::size_t half = n / 2;
  cos_.assign(half + 1, 0.0);
  sin_.assign(half + 1, 0.0);
  for (std::size_t m = 0; m <= half; ++m) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double theta = kTwoPi * static_cast<double>(m * j % n) / static_cast<double>(n);
      a += values[j] * std::cos(theta);
      b += values[j] * std::sin(theta);
    }
    const double w = (m == 0 || m == half) ? 1.0 : 2.0;
    cos_[m] = w * a / static_cast<double>(n);
    sin_[m] = (m == 0 || m == half) ? 0.0 : w * b / static_cast<double>(n);
  }
}

double PeriodicTrigInterpolant::operator()(double x) const {
  const double theta = kTwoPi * (x - x0_) / period_;
  double s = 0.0;
  for (std::size_t m = 0; m < cos_.size(); ++m) {
    const double mt = static_cast<double>(m) * theta;
    s += cos_[m] * std::cos(mt) + sin_[m] * std::sin(mt);
  }
  return s;
}

double PeriodicTrigInterpolant::derivative(double x) const {
  const double scale = kTwoPi / period_;
  const double theta = scale * (x - x0_);
  double s = 0.0;
  // The Nyquist cosine is dropped: its derivative vanishes at every node and
  // keeping it would make the interpolant's slope sample-dependent.
  for (std::size_t m = 1; m + 1 < cos_.size(); ++m) {
    const double mt = static_cast<double>(m) * theta;
    s += static_cast<double>(m) * (-cos_[m] * std::sin(mt) + sin_[m] * std::cos(mt));
  }
  return scale * s;
}

BandFunction free_band() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {[](double k) { return 0.5 * k * k; }, [](double k) { return k; },
          [](double) { return inf; }, [](double, double) { return inf; }};
}

BandFunction sampled_band(const BlochProblem& problem, int band, int points,
                          BandInterpolation method) {
  if (problem.dimension() != 1) throw DomainError("sampled bands are 1D");
  if (points < 256) throw ConfigurationError("band tables need at least 256 k-points");
  const double a = problem.lattice().period[0];
  const double width = kTwoPi / a;
  const double k0 = -kPi / a;
  std::vector<double> energy(static_cast<std::size_t>(points));
  std::vector<double> gap(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const auto k = kpoint(k0 + width * j / points);
    const auto pairs = solve_bands(problem, k, band + 2);
    energy[static_cast<std::size_t>(j)] = pairs[static_cast<std::size_t>(band)].energy;
    gap[static_cast<std::size_t>(j)] = band_gap(pairs, band);
  }
  auto gaps = std::make_shared<const std::vector<double>>(std::move(gap));
  BandFunction f;
  if (method == BandInterpolation::cubic_spline) {
    auto spline = std::make_shared<const PeriodicSpline>(k0, width, energy);
    f.energy = [spline](double k) { return (*spline)(k); };
    f.velocity = [spline](double k) { return spline->derivative(k); };
  } else {
    auto trig = std::make_shared<const PeriodicTrigInterpolant>(k0, width, energy);
    f.energy = [trig](double k) { return (*trig)(k); };
    f.velocity = [trig](double k) { return trig->derivative(k); };
  }
  const double h = width / static_cast<double>(points);
  f.gap = [gaps, k0, width, h](double k) {
    const auto n = gaps->size();
    double r = std::fmod(k - k0, width);
    if (r < 0.0) r += width;
    auto i = static_cast<std::size_t>(r / h);
    if (i >= n) i = n - 1;
    const double s = r / h - static_cast<double>(i);
    return (1.0 - s) * (*gaps)[i] + s * (*gaps)[(i + 1) % n];
  };
  // The piecewise linear gap attains its minimum at an end or at a knot.
  f.min_gap = [gaps, k0, h, g = f.gap](double a, double b) {
    if (a > b) std::swap(a, b);
    double m = std::min(g(a), g(b));
    const auto n = static_cast<long>(gaps->size());
    for (long j = static_cast<long>(std::ceil((a - k0) / h)); k0 + j * h < b; ++j)
      m = std::min(m, (*gaps)[static_cast<std::size_t>(((j % n) + n) % n)]);
    return m;
  };
  return f;
}

ExternalPotential ExternalPotential::zero() {
  return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; }, true};
}

ExternalPotential ExternalPotential::linear(double slope) {
  return {[slope](double, double x) { return slope * x; },
          [slope](double, double) { return slope; }, true};
}

ExternalPotential ExternalPotential::harmonic(double omega) {
  const double w2 = omega * omega;
  return {[w2](double, double x) { return 0.5 * w2 * x * x; },
          [w2](double, double x) { return w2 * x; }, true};
}

Trajectory classical_trajectory(const BandFunction& band, const ExternalPotential& potential,
                                double q0, double p0, double T, double dt,
                                double gap_tolerance) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ConfigurationError("trajectory needs dt > 0, T >= 0");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : T / static_cast<double>(steps);
  struct Y {
    double q, p, s;
  };
  auto rhs = [&](double t, const Y& y) {
    const double v = band.velocity(y.p);
    return Y{v, -potential.gradient(t, y.q),
             y.p * v - band.energy(y.p) - potential.value(t, y.q)};
  };
  auto check_gap = [&](double t, double p_from, double p) {
    const double g = band.min_gap ? band.min_gap(p_from, p) : band.gap(p);
    if (g < gap_tolerance) {
      std::ostringstream msg;
      msg << "trajectory enters a band crossing at t = " << t << ", p = " << p
          << " (gap " << g << ")";
      throw NearDegeneracyError(msg.str(), g);
    }
  };
  Trajectory traj;
  traj.t.reserve(steps + 1);
  Y y{q0, p0, 0.0};
  double t = 0.0;
  auto record = [&]() {
    traj.t.push_back(t);
    traj.q.push_back(y.q);
    traj.p.push_back(y.p);
    traj.S.push_back(y.s);
  };
  check_gap(t, y.p, y.p);
  record();
  for (std::size_t i = 0; i < steps; ++i) {
    const double p_old = y.p;
    const Y k1 = rhs(t, y);
    const Y k2 = rhs(t + 0.5 * h, {y.q + 0.5 * h * k1.q, y.p + 0.5 * h * k1.p, y.s + 0.5 * h * k1.s});
    const Y k3 = rhs(t + 0.5 * h, {y.q + 0.5 * h * k2.q, y.p + 0.5 * h * k2.p, y.s + 0.5 * h * k2.s});
    const Y k4 = rhs(t + h, {y.q + h * k3.q, y.p + h * k3.p, y.s + h * k3.s});
    y.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    y.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    y.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    t = (i + 1 == steps) ? T : h * static_cast<double>(i + 1);
    check_gap(t, p_old, y.p);
    record();
  }
  return traj;
}

std::vector<double> trajectory_energy(const Trajectory& traj, const BandFunction& band,
                                      const ExternalPotential& potential) {
  std::vector<double> h(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    h[i] = band.energy(traj.p[i]) + potential.value(traj.t[i], traj.q[i]);
  return h;
}

}  // namespace nlcs
