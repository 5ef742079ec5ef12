#include "nlcs/bloch.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlcs/errors.hpp"

namespace nlcs {

KPoint kpoint(double k) {
  KPoint p(1);
  p(0) = k;
  return p;
}

KPoint kpoint(double k1, double k2) {
  KPoint p(2);
  p << k1, k2;
  return p;
}

// ---------------------------------------------------------------- Lattice

Lattice Lattice::cubic(int dimension, double a) {
  Lattice l;
  l.dimension = dimension;
  l.period = {a, a};
  l.validate();
  return l;
}

void Lattice::validate() const {
  if (dimension != 1 && dimension != 2)
    throw ConfigurationError("lattice dimension must be 1 or 2");
  for (int i = 0; i < dimension; ++i)
    if (!(period[static_cast<std::size_t>(i)] > 0.0))
      throw ConfigurationError("lattice period must be strictly positive");
}

double Lattice::cell_measure() const {
  double m = 1.0;
  for (int i = 0; i < dimension; ++i) m *= period[static_cast<std::size_t>(i)];
  return m;
}

double Lattice::dual_spacing(int axis) const {
  return kTwoPi / period[static_cast<std::size_t>(axis)];
}

KPoint Lattice::reduce(const KPoint& k) const {
  if (k.size() != dimension) throw DomainError("k-point dimension mismatch");
  KPoint r = k;
  for (int i = 0; i < dimension; ++i) {
    const double b = dual_spacing(i);
    const double half = 0.5 * b;
    double v = std::fmod(k(i) + half, b);
    if (v < 0.0) v += b;
    v -= half;
    // fmod can land exactly on +half after rounding.
    if (v >= half) v -= b;
    r(i) = v;
  }
  return r;
}

// ------------------------------------------------------ PeriodicPotential

void PeriodicPotential::set(const LatticeIndex& g, cplx value) {
  const LatticeIndex minus{-g[0], -g[1]};
  if (g == minus) {
    if (std::abs(value.imag()) > 1e-12 * std::max(1.0, std::abs(value)))
      throw ConfigurationError("V_0 of a real potential must be real");
    value = cplx{value.real(), 0.0};
  }
  if (value == cplx{0.0, 0.0}) {
    coefficients_.erase(g);
    coefficients_.erase(minus);
    return;
  }
  coefficients_[g] = value;
  coefficients_[minus] = std::conj(value);
}

cplx PeriodicPotential::coefficient(const LatticeIndex& g) const {
  auto it = coefficients_.find(g);
  return it == coefficients_.end() ? cplx{0.0, 0.0} : it->second;
}

int PeriodicPotential::radius() const {
  int r = 0;
  for (const auto& [g, v] : coefficients_)
    if (v != cplx{0.0, 0.0}) r = std::max({r, std::abs(g[0]), std::abs(g[1])});
  return r;
}

double PeriodicPotential::evaluate(double y, double period) const {
  double v = 0.0;
  for (const auto& [g, c] : coefficients_) {
    const double phase = kTwoPi * static_cast<double>(g[0]) * y / period;
    v += (c * std::polar(1.0, phase)).real();
  }
  return v;
}

PeriodicPotential PeriodicPotential::zero(int dimension) {
  return PeriodicPotential(dimension);
}

PeriodicPotential PeriodicPotential::cosine(double amplitude) {
  PeriodicPotential p(1);
  p.set({1, 0}, cplx{0.5 * amplitude, 0.0});
  return p;
}

// ----------------------------------------------------------- BlochProblem

BlochProblem::BlochProblem(Lattice lattice, PeriodicPotential potential, int truncation)
    : potential_(std::move(potential)) {
  lattice.validate();
  if (potential_.dimension() != lattice.dimension)
    throw ConfigurationError("potential and lattice dimensions differ");
  const int radius = potential_.radius();
  if (truncation < radius + 2) {
    std::ostringstream msg;
    msg << "plane-wave truncation N=" << truncation
        << " must be at least G_max + 2 = " << radius + 2;
    throw ConfigurationError(msg.str());
  }
  auto basis = std::make_shared<PlaneWaveBasis>();
  basis->lattice = lattice;
  basis->truncation = truncation;
  const int span2 = lattice.dimension == 2 ? truncation : 0;
  for (int n1 = -truncation; n1 <= truncation; ++n1)
    for (int n2 = -span2; n2 <= span2; ++n2) basis->index.push_back({n1, n2});
  const auto size = static_cast<Eigen::Index>(basis->index.size());
  basis->g.resize(lattice.dimension, size);
  for (Eigen::Index n = 0; n < size; ++n)
    for (int i = 0; i < lattice.dimension; ++i)
      basis->g(i, n) = lattice.dual_spacing(i) *
                       static_cast<double>(basis->index[static_cast<std::size_t>(n)]
                                                       [static_cast<std::size_t>(i)]);
  basis_ = std::move(basis);
}

// --------------------------------------------------------------- spectra

BlochEigenpair BlochEigenpair::rotated(double theta) const {
  BlochEigenpair out = *this;
  out.coefficients *= std::polar(1.0, theta);
  out.gauge = GaugeTag::unfixed;
  return out;
}

Eigen::MatrixXcd build_hamiltonian(const BlochProblem& problem, const KPoint& k_in) {
  const auto& basis = *problem.basis();
  const KPoint k = basis.lattice.reduce(k_in);
  const auto size = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
  for (Eigen::Index n = 0; n < size; ++n) {
    h(n, n) = 0.5 * (basis.g.col(n) + k).squaredNorm();
  }
  const auto& pot = problem.potential();
  for (Eigen::Index n = 0; n < size; ++n) {
    const auto& a = basis.index[static_cast<std::size_t>(n)];
    for (Eigen::Index m = 0; m < size; ++m) {
      const auto& b = basis.index[static_cast<std::size_t>(m)];
      const cplx v = pot.coefficient({a[0] - b[0], a[1] - b[1]});
      if (v != cplx{0.0, 0.0}) h(n, m) += v;
    }
  }
  return h;
}

Coefficients fix_gauge(const Coefficients& c) {
  const double norm = c.norm();
  if (!(norm > 0.0)) throw DomainError("fix_gauge: zero coefficient vector");
  double largest = 0.0;
  for (Eigen::Index n = 0; n < c.size(); ++n) largest = std::max(largest, std::abs(c(n)));
  // First (lowest lexicographic index) coefficient within roundoff of the max.
  Eigen::Index pick = 0;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    if (std::abs(c(n)) >= largest * (1.0 - 1e-10)) {
      pick = n;
      break;
    }
  }
  const cplx phase = std::conj(c(pick)) / std::abs(c(pick));
  Coefficients out = c * phase;
  out(pick) = cplx{out(pick).real(), 0.0};
  return out;
}

double spectral_residual(const BlochEigenpair& pair, const Eigen::MatrixXcd& h) {
  return (h * pair.coefficients - pair.energy * pair.coefficients).norm();
}

std::vector<BlochEigenpair> solve_bands(const BlochProblem& problem, const KPoint& k_in,
                                        int count) {
  const auto size = static_cast<int>(problem.matrix_size());
  if (count < 1 || count > size)
    throw DomainError("solve_bands: band count must lie in [1, matrix dimension]");
  const KPoint k = problem.lattice().reduce(k_in);
  const Eigen::MatrixXcd h = build_hamiltonian(problem, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Hermitian eigensolver did not converge (matrix size " << size
        << ", k = " << k.transpose() << ")";
    throw NumericalError(msg.str());
  }
  std::vector<BlochEigenpair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    BlochEigenpair p;
    p.k = k;
    p.band = m;
    p.energy = solver.eigenvalues()(m);
    p.coefficients = fix_gauge(solver.eigenvectors().col(m));
    p.coefficients.normalize();
    p.gauge = GaugeTag::largest_coefficient_real;
    p.basis = problem.basis();
    const double res = spectral_residual(p, h);
    if (res > 1e-10 * std::max(1.0, std::abs(p.energy))) {
      std::ostringstream msg;
      msg << "eigenpair residual " << res << " exceeds tolerance (band " << m << ")";
      throw NumericalError(msg.str());
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

BlochEigenpair solve_band(const BlochProblem& problem, const KPoint& k, int band) {
  auto pairs = solve_bands(problem, k, band + 1);
  return std::move(pairs.back());
}

double band_gap(std::span<const BlochEigenpair> pairs, int m) {
  const BlochEigenpair* self = nullptr;
  for (const auto& p : pairs)
    if (p.band == m) self = &p;
  if (self == nullptr) throw DomainError("band_gap: band not present");
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (p.band == m - 1 || p.band == m + 1)
      gap = std::min(gap, std::abs(p.energy - self->energy));
  }
  return gap;
}

double band_gap_at(const BlochProblem& problem, const KPoint& k, int m) {
  const int count = std::min<int>(m + 2, static_cast<int>(problem.matrix_size()));
  const auto pairs = solve_bands(problem, k, count);
  return band_gap(pairs, m);
}

KPoint group_velocity(const BlochEigenpair& pair) {
  const auto& basis = *pair.basis;
  const int d = basis.lattice.dimension;
  KPoint v = KPoint::Zero(d);
  for (Eigen::Index n = 0; n < pair.coefficients.size(); ++n) {
    const double w = std::norm(pair.coefficients(n));
    v += w * (basis.g.col(n) + pair.k);
  }
  return v;
}

// ---------------------------------------------------- reduced resolvent

ReducedResolvent::ReducedResolvent(const BlochEigenpair& pair,
                                   const Eigen::MatrixXcd& hamiltonian,
                                   double gap_tolerance)
    : chi_(pair.coefficients), energy_(pair.energy), hamiltonian_(hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw NumericalError("reduced resolvent: eigensolver did not converge");
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
  double best = -1.0;
  for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
    const double overlap = std::abs(vectors_.col(j).dot(chi_));
    if (overlap > best) {
      best = overlap;
      self_ = j;
    }
  }
  gap_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < values_.size(); ++j)
    if (j != self_) gap_ = std::min(gap_, std::abs(values_(j) - energy_));
  if (gap_ < gap_tolerance) {
    std::ostringstream msg;
    msg << "band " << pair.band << " is not simple at k = " << pair.k.transpose()
        << " (gap " << gap_ << " < tolerance " << gap_tolerance << ")";
    throw NearDegeneracyError(msg.str(), gap_);
  }
}

Coefficients ReducedResolvent::solve(const Coefficients& rhs) const {
  if (rhs.size() != chi_.size()) throw DomainError("reduced resolvent: size mismatch");
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Coefficients::Zero(rhs.size());
  if (std::abs(chi_.dot(rhs)) > 1e-8 * std::max(1.0, rhs_norm))
    throw DomainError("reduced resolvent: right-hand side not orthogonal to chi");
  Eigen::VectorXcd proj = vectors_.adjoint() * rhs;
  for (Eigen::Index j = 0; j < proj.size(); ++j)
    proj(j) = (j == self_) ? cplx{0.0, 0.0} : proj(j) / (values_(j) - energy_);
  Coefficients w = vectors_ * proj;
  w -= chi_ * chi_.dot(w);
  const double residual =
      (hamiltonian_ * w - energy_ * w - (rhs - chi_ * chi_.dot(rhs))).norm();
  if (residual > 1e-8 * rhs_norm) {
    std::ostringstream msg;
    msg << "reduced resolvent residual " << residual << " too large";
    throw NumericalError(msg.str());
  }
  return w;
}

Coefficients reduced_resolvent_solve(const BlochEigenpair& pair,
                                     const Eigen::MatrixXcd& hamiltonian,
                                     const Coefficients& rhs, double gap_tolerance) {
  return ReducedResolvent(pair, hamiltonian, gap_tolerance).solve(rhs);
}

namespace {

std::vector<Coefficients> dk_chi_with(const BlochEigenpair& pair,
                                      const ReducedResolvent& resolvent) {
  const auto& basis = *pair.basis;
  const int d = basis.lattice.dimension;
  const KPoint v = group_velocity(pair);
  const Coefficients& c = pair.coefficients;
  std::vector<Coefficients> out;
  for (int j = 0; j < d; ++j) {
    Coefficients rhs(c.size());
    for (Eigen::Index n = 0; n < c.size(); ++n)
      rhs(n) = (basis.g(j, n) + pair.k(j) - v(j)) * c(n);
    rhs -= c * c.dot(rhs);
    out.push_back(-resolvent.solve(rhs));
  }
  return out;
}

Eigen::MatrixXd perturbative_mass(const BlochEigenpair& pair,
                                  const std::vector<Coefficients>& dchi) {
  const auto& basis = *pair.basis;
  const int d = basis.lattice.dimension;
  const KPoint v = group_velocity(pair);
  const Coefficients& c = pair.coefficients;
  Eigen::MatrixXd m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < d; ++l) {
      Coefficients a(c.size());
      for (Eigen::Index n = 0; n < c.size(); ++n) {
        a(n) = (basis.g(j, n) + pair.k(j)) * dchi[static_cast<std::size_t>(l)](n) +
               (basis.g(l, n) + pair.k(l)) * dchi[static_cast<std::size_t>(j)](n) -
               v(l) * dchi[static_cast<std::size_t>(j)](n) -
               v(j) * dchi[static_cast<std::size_t>(l)](n);
      }
      m(j, l) = (j == l ? 1.0 : 0.0) + a.dot(c).real();
    }
  }
  return 0.5 * (m + m.transpose());
}

double band_energy_checked(const BlochProblem& problem, const KPoint& k, int band,
                           double gap_tolerance) {
  const int count = std::min<int>(band + 2, static_cast<int>(problem.matrix_size()));
  const auto pairs = solve_bands(problem, k, count);
  const double gap = band_gap(pairs, band);
  if (gap < gap_tolerance) {
    std::ostringstream msg;
    msg << "band " << band << " is not simple near k = " << k.transpose() << " (gap "
        << gap << ")";
    throw NearDegeneracyError(msg.str(), gap);
  }
  return pairs[static_cast<std::size_t>(band)].energy;
}

Eigen::MatrixXd finite_difference_mass(const BlochEigenpair& pair,
                                       const BlochProblem& problem, double gap_tolerance) {
  const double h = 1e-4;
  const int d = problem.dimension();
  const int m = pair.band;
  const double e0 = band_energy_checked(problem, pair.k, m, gap_tolerance);
  Eigen::MatrixXd hess(d, d);
  for (int j = 0; j < d; ++j) {
    KPoint kp = pair.k, km = pair.k;
    kp(j) += h;
    km(j) -= h;
    const double ep = band_energy_checked(problem, kp, m, gap_tolerance);
    const double em = band_energy_checked(problem, km, m, gap_tolerance);
    hess(j, j) = (ep - 2.0 * e0 + em) / (h * h);
    for (int l = j + 1; l < d; ++l) {
      auto shifted = [&](double sj, double sl) {
        KPoint k = pair.k;
        k(j) += sj * h;
        k(l) += sl * h;
        return band_energy_checked(problem, k, m, gap_tolerance);
      };
      const double mixed = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) +
                            shifted(-1, -1)) / (4.0 * h * h);
      hess(j, l) = mixed;
      hess(l, j) = mixed;
    }
  }
  return hess;
}

}  // namespace

std::vector<Coefficients> dk_chi(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 double gap_tolerance) {
  const ReducedResolvent resolvent(pair, hamiltonian, gap_tolerance);
  return dk_chi_with(pair, resolvent);
}

Eigen::MatrixXd effective_mass_tensor(const BlochEigenpair& pair,
                                      const Eigen::MatrixXcd& hamiltonian,
                                      const BlochProblem& problem, MassMethod method,
                                      double gap_tolerance) {
  if (method == MassMethod::finite_difference)
    return finite_difference_mass(pair, problem, gap_tolerance);
  return perturbative_mass(pair, dk_chi(pair, hamiltonian, gap_tolerance));
}

BandDerivatives band_derivatives(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 const BlochProblem& problem, double gap_tolerance) {
  (void)problem;
  const ReducedResolvent resolvent(pair, hamiltonian, gap_tolerance);
  BandDerivatives out;
  out.gradient = group_velocity(pair);
  out.dk_chi = dk_chi_with(pair, resolvent);
  out.hessian = perturbative_mass(pair, out.dk_chi);
  return out;
}

// ---------------------------------------------------------- evaluation

ComplexField periodic_function_samples(const Coefficients& c, const PlaneWaveBasis& basis,
                                       std::span<const double> y) {
  if (basis.lattice.dimension != 1)
    throw DomainError("periodic_function_samples: 1D lattices only");
  ComplexField out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    cplx acc{0.0, 0.0};
    for (Eigen::Index n = 0; n < c.size(); ++n)
      acc += c(n) * std::polar(1.0, basis.g(0, n) * y[j]);
    out[j] = acc;
  }
  return out;
}

ComplexField bloch_function_samples(const BlochEigenpair& pair, std::span<const double> y) {
  return periodic_function_samples(pair.coefficients, *pair.basis, y);
}

}  // namespace nlcs
