#include <CLI11.hpp>
#include <iostream>
#include <random>
#include <sstream>

#include "nlcs/direct.hpp"
#include "nlcs/effective.hpp"
#include "nlcs/errors.hpp"
#include "nlcs/harness.hpp"
#include "nlcs/packet.hpp"

namespace nlcs {

using nlohmann::json;

namespace {

struct Context {
  RunConfig config;
  std::filesystem::path out;
  bool quiet = false;

  void note(const std::string& msg) const {
    if (!quiet) std::cout << msg << '\n';
  }
};

std::string field_csv_header(const char* coord, const char* field) {
  std::ostringstream s;
  s << "t," << coord << ",re_" << field << ",im_" << field << ",abs_" << field << '\n';
  return s.str();
}

void append_rows(std::ostringstream& out, double t, const PeriodicGrid& grid,
                 const ComplexField& values) {
  for (std::size_t j = 0; j < grid.n; ++j)
    out << format_number(t) << ',' << format_number(grid.point(j)) << ','
        << format_number(values[j].real()) << ',' << format_number(values[j].imag()) << ','
        << format_number(std::abs(values[j])) << '\n';
}

std::vector<double> snapshot_times(double T, int snapshots) {
  std::vector<double> t;
  for (int i = 0; i <= snapshots; ++i) t.push_back(T * i / snapshots);
  return t;
}

int run_bands(const Context& ctx, double kmin, double kmax, int nk, int count) {
  const auto& c = ctx.config;
  if (nk < 1 || count < 1 || !(kmin < kmax) || count > 2 * c.truncation + 1)
    throw ConfigurationError("invalid k-grid or band count");
  const auto problem = c.problem();
  std::ostringstream out;
  out << "k,band,energy,gap\n";
  for (int i = 0; i < nk; ++i) {
    const double k = nk == 1 ? kmin : kmin + (kmax - kmin) * i / (nk - 1);
    const auto pairs = solve_bands(problem, kpoint(k), std::min(count + 1, 2 * c.truncation + 1));
    for (int m = 0; m < count; ++m)
      out << format_number(k) << ',' << m << ',' << format_number(pairs[static_cast<std::size_t>(m)].energy)
          << ',' << format_number(band_gap(pairs, m)) << '\n';
  }
  write_text(ctx.out, "bands.csv", out.str());
  ctx.note("wrote " + (ctx.out / "bands.csv").string());
  return 0;
}

int run_effective(const Context& ctx, std::optional<double> k_override) {
  const auto& c = ctx.config;
  const auto problem = c.problem();
  const double k = k_override.value_or(c.p0);
  const auto pair = solve_band(problem, kpoint(k), c.band);
  const auto H = build_hamiltonian(problem, kpoint(k));
  const auto params = effective_params(pair, H, problem, c.nonlinearity);
  std::string existence;
  try {
    existence = to_string(classify_global_existence(params));
  } catch (const DomainError&) {
    existence = "not_applicable";
  }
  const auto& M = params.mass_tensor;
  json mass = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    mass.push_back(row);
  }
  const json doc = {{"k", k},
                    {"band", c.band},
                    {"energy", pair.energy},
                    {"group_velocity", group_velocity(pair)(0)},
                    {"band_gap", band_gap_at(problem, kpoint(k), c.band)},
                    {"mass_tensor", mass},
                    {"effective_coupling", params.coupling},
                    {"alpha", c.nonlinearity.alpha},
                    {"alpha_critical", critical_alpha(c.nonlinearity, 1)},
                    {"regime", to_string(params.regime)},
                    {"existence_class", existence},
                    {"nonlinearity", c.nonlinearity.describe()}};
  write_text(ctx.out, "effective_params.json", doc.dump(2) + "\n");
  ctx.note(doc.dump(2));
  return 0;
}

EffectiveParams envelope_params(const RunConfig& c) {
  const auto problem = c.problem();
  const auto pair = solve_band(problem, kpoint(c.p0), c.band);
  return effective_params(pair, build_hamiltonian(problem, kpoint(c.p0)), problem, c.nonlinearity);
}

int run_evolve_envelope(const Context& ctx, int snapshots) {
  const auto& c = ctx.config;
  const auto params = envelope_params(c);
  EnvelopeSolver solver(c.initial_envelope(), params);
  std::ostringstream csv;
  csv << field_csv_header("z", "u");
  json mass_log = json::array();
  for (double t : snapshot_times(c.T, snapshots)) {
    solver.advance_to(t, c.envelope_dt);
    append_rows(csv, t, solver.state().grid, solver.state().values);
    mass_log.push_back({t, solver.state().mass()});
  }
  const auto& d = solver.diagnostics();
  const json meta = {{"mass", params.mass_tensor(0, 0)},
                     {"coupling", params.coupling},
                     {"regime", to_string(params.regime)},
                     {"dt", c.envelope_dt},
                     {"T", c.T},
                     {"z_length", c.grid.z_length},
                     {"z_points", c.grid.z_points},
                     {"steps", d.steps},
                     {"relative_mass_drift", d.relative_mass_drift()},
                     {"max_sup", d.max_sup},
                     {"mass_log", mass_log},
                     {"warnings", d.warnings},
                     {"nonlinearity", c.nonlinearity.describe()}};
  write_text(ctx.out, "envelope.csv", csv.str());
  write_text(ctx.out, "envelope_run.json", meta.dump(2) + "\n");
  ctx.note("wrote envelope.csv and envelope_run.json to " + ctx.out.string());
  return 0;
}

int run_evolve_direct(const Context& ctx, std::optional<double> eps_override, int snapshots) {
  const auto& c = ctx.config;
  const double eps = eps_override.value_or(c.epsilons.front());
  const auto problem = c.problem();
  const PacketModel model(problem, {c.band, c.p0, c.q0, eps}, c.nonlinearity);
  const auto grid = c.field_grid_for(eps);
  const double dt = default_direct_dt(eps, c.direct_c);
  DirectSolver solver(model.initial_data(c.initial_envelope(), grid, c.well_prepared), problem,
                      c.nonlinearity);
  std::ostringstream csv;
  csv << field_csv_header("x", "psi");
  for (double t : snapshot_times(c.T, snapshots)) {
    solver.advance_to(t, dt);
    append_rows(csv, t, grid, solver.state().values);
  }
  const auto& d = solver.diagnostics();
  json mass_log = json::array();
  for (const auto& [t, m] : d.mass_log) mass_log.push_back({t, m});
  const json meta = {{"epsilon", eps},
                     {"x_length", grid.length},
                     {"x_points", grid.n},
                     {"dt", dt},
                     {"T", c.T},
                     {"steps", d.steps},
                     {"well_prepared", c.well_prepared},
                     {"nonlinearity", c.nonlinearity.describe()},
                     {"relative_mass_drift", d.relative_mass_drift()},
                     {"mass_log", mass_log},
                     {"warnings", d.warnings}};
  write_text(ctx.out, "field.csv", csv.str());
  write_text(ctx.out, "direct_run.json", meta.dump(2) + "\n");
  ctx.note("wrote field.csv and direct_run.json to " + ctx.out.string());
  return 0;
}

int run_compare(const Context& ctx) {
  const auto report = run_convergence_study(ctx.config);
  write_text(ctx.out, "report.json", report_json(report, ctx.config).dump(2) + "\n");
  write_text(ctx.out, "errors.csv", errors_csv(report));
  write_text(ctx.out, "timing.json", timing_json(report).dump(2) + "\n");
  if (report.exact_agreement) {
    ctx.note("exact agreement over " + std::to_string(report.runs.size()) + " eps values");
    return 0;
  }
  std::ostringstream s;
  s << "slope " << format_number(report.fit.slope) << " +- "
    << format_number(report.fit.slope_half_width) << " over " << report.runs.size() << " eps values";
  ctx.note(s.str());
  return 0;
}

int run_averaging(const Context& ctx) {
  const auto& c = ctx.config;
  const auto pair = solve_band(c.problem(), kpoint(c.p0), c.band);
  auto ti = make_integrand(c.initial_envelope(), bloch_density(pair), c.averaging.kernel,
                           c.averaging.epsilons.front());
  ti.points_per_period = c.averaging.points_per_period;
  const auto study =
      averaging_rate_study(ti, c.averaging.epsilons, c.averaging.samples, c.averaging.widths);
  std::ostringstream csv;
  csv << "eps,sup_error\n";
  for (std::size_t i = 0; i < study.epsilons.size(); ++i)
    csv << format_number(study.epsilons[i]) << ',' << format_number(study.sup_errors[i]) << '\n';
  const json doc = {{"target", study.target},
                    {"slope", study.fit.slope},
                    {"intercept", study.fit.intercept},
                    {"slope_half_width", study.fit.slope_half_width},
                    {"exact_agreement", study.exact_agreement},
                    {"epsilons", study.epsilons},
                    {"sup_errors", study.sup_errors},
                    {"sup_errors_over_y", study.y_spread},
                    {"z_min", study.sample_points.front()},
                    {"z_max", study.sample_points.back()},
                    {"z_samples", study.sample_points.size()}};
  write_text(ctx.out, "averaging.csv", csv.str());
  write_text(ctx.out, "averaging.json", doc.dump(2) + "\n");
  ctx.note(study.exact_agreement ? std::string("exact agreement")
                                 : "slope " + format_number(study.fit.slope));
  return 0;
}

int run_trajectory(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& tc = c.trajectory;
  const auto problem = c.problem();
  const BandFunction band =
      tc.free_band ? free_band() : sampled_band(problem, c.band, tc.k_points, tc.interpolation);
  ExternalPotential V = ExternalPotential::zero();
  if (tc.external == "linear") V = ExternalPotential::linear(tc.slope);
  if (tc.external == "harmonic") V = ExternalPotential::harmonic(tc.omega);
  const auto traj = classical_trajectory(band, V, c.q0, c.p0, tc.T, tc.dt);

  std::ostringstream csv;
  csv << "t,q,p,S\n";
  for (std::size_t i = 0; i < traj.size(); ++i)
    csv << format_number(traj.t[i]) << ',' << format_number(traj.q[i]) << ','
        << format_number(traj.p[i]) << ',' << format_number(traj.S[i]) << '\n';

  json doc = {{"q_final", traj.q.back()}, {"p_final", traj.p.back()}, {"S_final", traj.S.back()},
              {"steps", traj.size() - 1}};
  if (V.time_independent) {
    const auto h = trajectory_energy(traj, band, V);
    double drift = 0.0;
    for (double e : h) drift = std::max(drift, std::abs(e - h.front()));
    doc["energy_drift"] = drift;
  }
  if (!tc.free_band) {
    // Interpolated velocity against the perturbative formula at seeded random k.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> dist(-kPi / c.lattice.period[0], kPi / c.lattice.period[0]);
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double k = dist(rng);
      const auto pair = solve_band(problem, kpoint(k), c.band);
      worst = std::max(worst, std::abs(band.velocity(k) - group_velocity(pair)(0)));
    }
    doc["velocity_check_max_error"] = worst;
  }
  write_text(ctx.out, "trajectory.csv", csv.str());
  write_text(ctx.out, "trajectory.json", doc.dump(2) + "\n");
  ctx.note("wrote trajectory.csv and trajectory.json to " + ctx.out.string());
  return 0;
}

void write_failure(const std::filesystem::path& out, const std::string& kind, const std::string& what,
                   json extra) {
  extra["error"] = kind;
  extra["message"] = what;
  try {
    write_text(out, "failure.json", extra.dump(2) + "\n");
  } catch (const std::exception&) {
    // The diagnostic still goes to stderr.
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Semiclassical wave packets in periodic potentials: solvers and convergence studies"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* bands = app.add_subcommand("bands", "band structure over a k-grid -> bands.csv");
  std::optional<double> kmin, kmax;
  std::optional<int> nk, nbands;
  bands->add_option("--kmin", kmin);
  bands->add_option("--kmax", kmax);
  bands->add_option("--nk", nk);
  bands->add_option("--bands", nbands);

  auto* eff = app.add_subcommand("effective-params", "M, lambda_m, alpha_c, existence class -> JSON");
  std::optional<double> k_eff;
  eff->add_option("--k", k_eff, "quasi-momentum (default p0)");

  auto* env = app.add_subcommand("evolve-envelope", "envelope equation -> envelope.csv");
  int env_snapshots = 4;
  env->add_option("--snapshots", env_snapshots)->check(CLI::PositiveNumber);

  auto* dir = app.add_subcommand("evolve-direct", "full-scale equation -> field.csv");
  std::optional<double> eps_direct;
  int dir_snapshots = 4;
  dir->add_option("--epsilon", eps_direct, "eps (default: first of epsilons)");
  dir->add_option("--snapshots", dir_snapshots)->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "convergence study -> report.json, errors.csv");
  auto* avg = app.add_subcommand("averaging", "two-scale averaging rate study");
  auto* trj = app.add_subcommand("trajectory", "band-Hamiltonian trajectory -> trajectory.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Context ctx;
  ctx.quiet = quiet;
  try {
    ctx.config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (config_path.empty()) ctx.config.validate();
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }
  ctx.out = out_dir.empty() ? std::filesystem::path(ctx.config.output_dir) : std::filesystem::path(out_dir);

  try {
    if (bands->parsed())
      return run_bands(ctx, kmin.value_or(ctx.config.bands.kmin), kmax.value_or(ctx.config.bands.kmax),
                       nk.value_or(ctx.config.bands.nk), nbands.value_or(ctx.config.bands.count));
    if (eff->parsed()) return run_effective(ctx, k_eff);
    if (env->parsed()) return run_evolve_envelope(ctx, env_snapshots);
    if (dir->parsed()) return run_evolve_direct(ctx, eps_direct, dir_snapshots);
    if (cmp->parsed()) return run_compare(ctx);
    if (avg->parsed()) return run_averaging(ctx);
    if (trj->parsed()) return run_trajectory(ctx);
  } catch (const BlowupError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    write_failure(ctx.out, "blowup", e.what(),
                  {{"abort_time", e.abort_time()}, {"tc_estimate", e.tc_estimate()}, {"sup_ratio", e.sup_ratio()}});
    return 2;
  } catch (const NearDegeneracyError& e) {
    std::cerr << "near degeneracy: " << e.what() << '\n';
    write_failure(ctx.out, "near_degeneracy", e.what(), {{"gap", e.gap()}});
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    write_failure(ctx.out, "numerical", e.what(), json::object());
    return 2;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nlcs
