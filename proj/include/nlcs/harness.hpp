#pragma once

// Experiment configuration, the direct-vs-packet convergence study and the
// report writers behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlcs/averaging.hpp"
#include "nlcs/bloch.hpp"
#include "nlcs/fit.hpp"
#include "nlcs/nonlinearity.hpp"
#include "nlcs/trajectory.hpp"

namespace nlcs {

struct EnvelopeProfile {
  std::string name = "gaussian";  // gaussian | sech
  double width = 1.0;
  double amplitude = 1.0;
};

struct GridConfig {
  double x_length = 8.0;
  std::size_t points_per_period = 32;
  double z_length = 40.0;
  std::size_t z_points = 1024;
};

struct BandsConfig {
  double kmin = -kPi;
  double kmax = kPi;
  int nk = 128;
  int count = 4;
};

struct AveragingConfig {
  AveragingKernel kernel = PowerLaw{1.0};
  std::vector<double> epsilons{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128,
                               1.0 / 256, 1.0 / 512, 1.0 / 1024};
  int samples = 33;
  double widths = 4.0;
  int points_per_period = 32;
};

struct TrajectoryConfig {
  std::string external = "zero";  // zero | linear | harmonic
  double slope = 0.0;
  double omega = 1.0;
  double T = 1.0;
  double dt = 1e-3;
  int k_points = 256;
  BandInterpolation interpolation = BandInterpolation::cubic_spline;
  bool free_band = false;  // analytic E = k^2 / 2 instead of a sampled band
};

struct RunConfig {
  Lattice lattice = Lattice::cubic(1);
  PeriodicPotential potential = PeriodicPotential::zero(1);
  std::string potential_source = "inline";
  int truncation = 16;
  int band = 0;
  double p0 = 0.0;
  double q0 = 0.0;
  EnvelopeProfile envelope;
  NonlinearitySpec nonlinearity{LocalNonlinearity{1, 1.0}, 1.5};
  std::vector<double> epsilons{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  double T = 1.0;
  GridConfig grid;
  double direct_c = 0.05;      // direct dt = c eps
  double envelope_dt = 1e-3;
  int error_samples = 16;
  bool well_prepared = false;
  bool both_variants = false;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  BandsConfig bands;
  AveragingConfig averaging;
  TrajectoryConfig trajectory;

  BlochProblem problem() const;
  /// Field grid for one eps: x_length / (eps a) periods of points_per_period nodes.
  PeriodicGrid field_grid_for(double epsilon) const;
  PeriodicGrid envelope_grid() const;
  EnvelopeState initial_envelope() const;
  /// Throws ConfigurationError naming the offending field.
  void validate() const;
};

/// Parses the JSON schema documented in docs/config_schema.md. Relative
/// potential_file paths are resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& config);

struct ErrorSeries {
  std::string label;  // "leading", "well_prepared", "nonlinear_envelope"
  std::vector<double> times;
  std::vector<double> errors;
  double sup_error = 0.0;
};

struct EpsilonRun {
  double epsilon = 0.0;
  std::size_t x_points = 0;
  double direct_dt = 0.0;
  std::vector<ErrorSeries> series;  // series[0] is the one entering the fit
  double direct_mass_drift = 0.0;
  double envelope_mass_drift = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct ConvergenceReport {
  std::vector<EpsilonRun> runs;
  SlopeFit fit;
  /// Fits of the secondary series by label (same eps list).
  std::vector<std::pair<std::string, SlopeFit>> secondary_fits;
  double alpha = 0.0;
  double alpha_critical = 0.0;
  Regime regime = Regime::critical;
  std::string nonlinearity;
  double mass = 0.0;
  double coupling = 0.0;
  double velocity = 0.0;
  bool exact_agreement = false;
  bool mass_failure = false;  // some mass drift above 1e-10
  std::vector<std::string> warnings;
};

inline constexpr double kMassDriftTolerance = 1e-10;
/// Errors below this are reported as exact agreement.
inline constexpr double kExactAgreementTolerance = 1e-10;

/// For each eps: initial data from the packet (leading or well-prepared), the
/// direct solve and the envelope solve to T, with the L2 distance between
/// the direct field and the leading-order packet sampled at
/// error_samples + 1 equally spaced times including 0. Supercritical runs
/// compare with the linear-envelope packet and add the nonlinear-envelope
/// packet as a secondary series. Throws BlowupError when the envelope
/// collapses before T.
ConvergenceReport run_convergence_study(const RunConfig& config);

/// Deterministic serializations (no timings in report_json).
nlohmann::json report_json(const ConvergenceReport& report, const RunConfig& config);
std::string errors_csv(const ConvergenceReport& report);
nlohmann::json timing_json(const ConvergenceReport& report);

/// Shortest round-trip decimal form used in every CSV writer.
std::string format_number(double v);

/// Writes `text` to dir / name, creating the directory.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// Command-line entry point: returns 0 on success, 1 for usage or
/// configuration errors, 2 for numerical failures (after writing
/// failure.json to the output directory).
int cli_main(int argc, const char* const* argv);

}  // namespace nlcs
