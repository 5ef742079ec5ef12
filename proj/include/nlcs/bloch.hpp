#pragma once

// Bloch band structure in a truncated plane-wave basis.
//
// Conventions:
//  * H(k) = 1/2 (-i grad_y + k)^2 + V_per(y) acting on Y-periodic functions.
//  * chi(y) = sum_n c_n exp(i g_n . y) with sum |c_n|^2 = 1, so the cell
//    average of |chi|^2 is one (equivalently int_Y |chi|^2 dy = 1 for a unit
//    cell).
//  * Crystal momenta are reduced into Y* = [-pi/a, pi/a) per axis.

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlcs/grid.hpp"

namespace nlcs {

using KPoint = Eigen::VectorXd;
using Coefficients = Eigen::VectorXcd;
using LatticeIndex = std::array<int, 2>;

inline constexpr double kDefaultGapTolerance = 1e-6;

KPoint kpoint(double k);
KPoint kpoint(double k1, double k2);

struct Lattice {
  int dimension = 1;
  std::array<double, 2> period{1.0, 1.0};

  static Lattice cubic(int dimension, double a = 1.0);

  double cell_measure() const;
  double dual_spacing(int axis) const;
  /// Reduces k modulo the dual lattice into [-pi/a, pi/a) per axis.
  KPoint reduce(const KPoint& k) const;
  void validate() const;
};

/// Fourier coefficients of a real, lattice-periodic potential.
class PeriodicPotential {
 public:
  PeriodicPotential() = default;
  explicit PeriodicPotential(int dimension) : dimension_(dimension) {}

  /// Inserts V_g and its Hermitian partner V_{-g} = conj(V_g).
  void set(const LatticeIndex& g, cplx value);

  int dimension() const { return dimension_; }
  cplx coefficient(const LatticeIndex& g) const;
  /// Largest |g_i| over stored nonzero coefficients.
  int radius() const;
  const std::map<LatticeIndex, cplx>& coefficients() const { return coefficients_; }

  /// V(y) for a 1D lattice with the given period.
  double evaluate(double y, double period) const;

  static PeriodicPotential zero(int dimension = 1);
  /// amplitude * cos(2 pi y / a), i.e. V_{+-1} = amplitude / 2.
  static PeriodicPotential cosine(double amplitude = 1.0);

 private:
  int dimension_ = 1;
  std::map<LatticeIndex, cplx> coefficients_;
};

/// Index set and reciprocal vectors of the truncated plane-wave basis.
struct PlaneWaveBasis {
  Lattice lattice;
  int truncation = 0;
  std::vector<LatticeIndex> index;  // lexicographic order
  Eigen::MatrixXd g;                // dimension x size, g_n = 2 pi n / a

  std::size_t size() const { return index.size(); }
};

class BlochProblem {
 public:
  BlochProblem(Lattice lattice, PeriodicPotential potential, int truncation);

  const Lattice& lattice() const { return basis_->lattice; }
  const PeriodicPotential& potential() const { return potential_; }
  int truncation() const { return basis_->truncation; }
  int dimension() const { return basis_->lattice.dimension; }
  std::size_t matrix_size() const { return basis_->size(); }
  const std::shared_ptr<const PlaneWaveBasis>& basis() const { return basis_; }

 private:
  PeriodicPotential potential_;
  std::shared_ptr<const PlaneWaveBasis> basis_;
};

enum class GaugeTag { unfixed, largest_coefficient_real };

struct BlochEigenpair {
  KPoint k;
  int band = 0;
  double energy = 0.0;
  Coefficients coefficients;
  GaugeTag gauge = GaugeTag::unfixed;
  std::shared_ptr<const PlaneWaveBasis> basis;

  /// Same pair with coefficients multiplied by exp(i theta).
  BlochEigenpair rotated(double theta) const;
};

struct BandDerivatives {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  std::vector<Coefficients> dk_chi;
};

Eigen::MatrixXcd build_hamiltonian(const BlochProblem& problem, const KPoint& k);

/// Lowest `count` eigenpairs at k, ascending, gauge fixed by fix_gauge.
std::vector<BlochEigenpair> solve_bands(const BlochProblem& problem, const KPoint& k,
                                        int count);
BlochEigenpair solve_band(const BlochProblem& problem, const KPoint& k, int band);

/// Distance from E_m to its neighbours in `pairs` (+inf without neighbours).
double band_gap(std::span<const BlochEigenpair> pairs, int m);
/// band_gap of band m at k, solving for the neighbouring bands.
double band_gap_at(const BlochProblem& problem, const KPoint& k, int m);

Coefficients fix_gauge(const Coefficients& c);

KPoint group_velocity(const BlochEigenpair& pair);

/// (H - E)^{-1} restricted to the orthogonal complement of chi_m.
class ReducedResolvent {
 public:
  ReducedResolvent(const BlochEigenpair& pair, const Eigen::MatrixXcd& hamiltonian,
                   double gap_tolerance = kDefaultGapTolerance);

  /// w with (H - E) w = rhs and <chi, w> = 0. rhs must be orthogonal to chi.
  Coefficients solve(const Coefficients& rhs) const;
  double gap() const { return gap_; }

 private:
  Coefficients chi_;
  double energy_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
  Eigen::Index self_ = 0;
  double gap_ = 0.0;
};

Coefficients reduced_resolvent_solve(const BlochEigenpair& pair,
                                     const Eigen::MatrixXcd& hamiltonian,
                                     const Coefficients& rhs,
                                     double gap_tolerance = kDefaultGapTolerance);

/// Orthogonal-gauge derivatives d chi / d k_j, one per axis.
std::vector<Coefficients> dk_chi(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 double gap_tolerance = kDefaultGapTolerance);

enum class MassMethod { perturbation, finite_difference };

Eigen::MatrixXd effective_mass_tensor(const BlochEigenpair& pair,
                                      const Eigen::MatrixXcd& hamiltonian,
                                      const BlochProblem& problem,
                                      MassMethod method = MassMethod::perturbation,
                                      double gap_tolerance = kDefaultGapTolerance);

BandDerivatives band_derivatives(const BlochEigenpair& pair,
                                 const Eigen::MatrixXcd& hamiltonian,
                                 const BlochProblem& problem,
                                 double gap_tolerance = kDefaultGapTolerance);

/// sum_n c_n exp(i g_n y) at each y (1D lattices).
ComplexField periodic_function_samples(const Coefficients& c,
                                       const PlaneWaveBasis& basis,
                                       std::span<const double> y);

/// Values of chi_m(y, k) (periodic part) at each y (1D lattices).
ComplexField bloch_function_samples(const BlochEigenpair& pair,
                                    std::span<const double> y);

double spectral_residual(const BlochEigenpair& pair, const Eigen::MatrixXcd& hamiltonian);

/// Parses {"period": a, "coefficients": [{"g": n, "re": x, "im": y}, ...]}.
/// Hermitian partners are completed; conflicting partners are rejected.
PeriodicPotential parse_potential_json(const std::string& text, Lattice* lattice = nullptr);
PeriodicPotential load_potential_json(const std::filesystem::path& path,
                                      Lattice* lattice = nullptr);
std::string potential_to_json(const PeriodicPotential& potential, const Lattice& lattice);

}  // namespace nlcs
