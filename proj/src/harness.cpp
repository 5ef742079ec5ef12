#include "nlcs/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nlcs/direct.hpp"
#include "nlcs/effective.hpp"
#include "nlcs/errors.hpp"
#include "nlcs/packet.hpp"

namespace nlcs {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed` so that typos do not silently fall back to
// defaults.
void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigurationError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) throw ConfigurationError("unknown key \"" + key + "\" in " + where);
  }
}

template <class T>
T get(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigurationError(where + "." + key + " has the wrong type");
  }
}

SmoothKernel parse_smooth_kernel(const json& j, const std::string& where) {
  SmoothKernel k;
  k.a1 = get(j, "a1", k.a1, where);
  k.a2 = get(j, "a2", k.a2, where);
  k.a3 = get(j, "a3", k.a3, where);
  k.a4 = get(j, "a4", k.a4, where);
  k.A = get(j, "A", k.A, where);
  k.B = get(j, "B", k.B, where);
  return k;
}

json smooth_kernel_json(const SmoothKernel& k) {
  return {{"a1", k.a1}, {"a2", k.a2}, {"a3", k.a3}, {"a4", k.a4}, {"A", k.A}, {"B", k.B}};
}

NonlinearitySpec parse_nonlinearity(const json& j) {
  const std::string where = "nonlinearity";
  const auto kind = get<std::string>(j, "kind", "local", where);
  NonlinearitySpec spec;
  if (kind == "local") {
    check_keys(j, {"kind", "sigma", "lambda", "alpha"}, where);
    spec.kind = LocalNonlinearity{get(j, "sigma", 1, where), get(j, "lambda", 1.0, where)};
  } else if (kind == "homogeneous") {
    check_keys(j, {"kind", "mu", "lambda", "alpha"}, where);
    spec.kind = HomogeneousKernel{get(j, "mu", -1.0, where), get(j, "lambda", 1.0, where)};
  } else if (kind == "smooth") {
    check_keys(j, {"kind", "a1", "a2", "a3", "a4", "A", "B", "alpha"}, where);
    spec.kind = parse_smooth_kernel(j, where);
  } else {
    throw ConfigurationError("nonlinearity.kind must be local, homogeneous or smooth");
  }
  spec.alpha = j.contains("alpha") ? get(j, "alpha", 0.0, where) : critical_alpha(spec, 1);
  return spec;
}

json nonlinearity_json(const NonlinearitySpec& spec) {
  json j;
  if (const auto* l = std::get_if<LocalNonlinearity>(&spec.kind)) {
    j = {{"kind", "local"}, {"sigma", l->sigma}, {"lambda", l->lambda}};
  } else if (const auto* h = std::get_if<HomogeneousKernel>(&spec.kind)) {
    j = {{"kind", "homogeneous"}, {"mu", h->mu}, {"lambda", h->lambda}};
  } else {
    j = smooth_kernel_json(std::get<SmoothKernel>(spec.kind));
    j["kind"] = "smooth";
  }
  j["alpha"] = spec.alpha;
  return j;
}

AveragingKernel parse_averaging_kernel(const json& j) {
  const std::string where = "averaging.kernel";
  const auto kind = get<std::string>(j, "kind", "power", where);
  if (kind == "power") {
    check_keys(j, {"kind", "mu"}, where);
    return PowerLaw{get(j, "mu", 1.0, where)};
  }
  if (kind == "smooth") {
    check_keys(j, {"kind", "a1", "a2", "a3", "a4", "A", "B"}, where);
    return parse_smooth_kernel(j, where);
  }
  throw ConfigurationError("averaging.kernel.kind must be power or smooth");
}

std::vector<double> parse_list(const json& obj, const std::string& key,
                               std::vector<double> fallback, const std::string& where) {
  return get(obj, key, std::move(fallback), where);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool is_dyadic(double v) {
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

json fit_json(const SlopeFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"slope_half_width", fit.slope_half_width},
          {"points", fit.points},
          {"exact_agreement", fit.exact_agreement}};
}

}  // namespace

BlochProblem RunConfig::problem() const { return {lattice, potential, truncation}; }

PeriodicGrid RunConfig::field_grid_for(double epsilon) const {
  return field_grid_for_length(epsilon, lattice.period[0], grid.x_length, grid.points_per_period);
}

PeriodicGrid RunConfig::envelope_grid() const {
  return PeriodicGrid::centered(grid.z_length, grid.z_points);
}

EnvelopeState RunConfig::initial_envelope() const {
  const auto g = envelope_grid();
  if (envelope.name == "gaussian") return gaussian_envelope(g, envelope.width, envelope.amplitude);
  const double a = envelope.amplitude, w = envelope.width;
  return sample_envelope(g, [=](double z) { return cplx{a / std::cosh(z / w), 0.0}; });
}

void RunConfig::validate() const {
  if (lattice.dimension != 1) throw ConfigurationError("only 1D lattices are supported here");
  if (truncation < 1) throw ConfigurationError("truncation must be at least 1");
  if (band < 0 || band > 2 * truncation) throw ConfigurationError("band index out of range");
  if (!std::isfinite(p0) || !std::isfinite(q0)) throw ConfigurationError("p0 and q0 must be finite");
  if (envelope.name != "gaussian" && envelope.name != "sech")
    throw ConfigurationError("envelope.profile must be gaussian or sech");
  if (!(envelope.width > 0.0)) throw ConfigurationError("envelope.width must be positive");
  if (!std::isfinite(envelope.amplitude)) throw ConfigurationError("envelope.amplitude must be finite");
  nonlinearity.validate(1);
  if (epsilons.empty()) throw ConfigurationError("epsilons must not be empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || epsilons[i] > 1.0)
      throw ConfigurationError("every eps must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ConfigurationError("epsilons must be strictly decreasing");
  }
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigurationError("T must be positive");
  if (!(grid.x_length > 0.0)) throw ConfigurationError("grid.x_length must be positive");
  if (grid.points_per_period < static_cast<std::size_t>(kMinPointsPerPeriod))
    throw ConfigurationError("grid.points_per_period must be at least 16");
  if (!(grid.z_length > 0.0)) throw ConfigurationError("grid.z_length must be positive");
  if (!is_power_of_two(grid.z_points) || grid.z_points < 16)
    throw ConfigurationError("grid.z_points must be a power of two >= 16");
  for (double eps : epsilons) {
    const auto g = field_grid_for(eps);
    FieldState probe{eps, g, {}, 0.0};
    probe.values.resize(g.n);
    probe.validate(lattice.period[0]);
  }
  if (!(direct_c > 0.0)) throw ConfigurationError("time_step.direct_c must be positive");
  if (!(envelope_dt > 0.0)) throw ConfigurationError("time_step.envelope_dt must be positive");
  if (error_samples < 16) throw ConfigurationError("error_samples must be at least 16");
  if (bands.nk < 1 || bands.count < 1 || !(bands.kmin < bands.kmax))
    throw ConfigurationError("invalid bands section");
  if (bands.count > 2 * truncation + 1)
    throw ConfigurationError("bands.count exceeds the basis size");
  const auto& tr = trajectory;
  if (tr.external != "zero" && tr.external != "linear" && tr.external != "harmonic")
    throw ConfigurationError("trajectory.external must be zero, linear or harmonic");
  if (!(tr.T > 0.0) || !(tr.dt > 0.0)) throw ConfigurationError("trajectory T and dt must be positive");
  if (tr.k_points < 256) throw ConfigurationError("trajectory.k_points must be at least 256");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc,
             {"potential", "potential_file", "truncation", "band", "p0", "q0", "envelope",
              "nonlinearity", "epsilons", "T", "grid", "time_step", "error_samples",
              "well_prepared", "both_variants", "seed", "output_dir", "bands", "averaging",
              "trajectory"},
             "config");
  RunConfig c;
  const std::string top = "config";
  if (doc.contains("potential") && doc.contains("potential_file"))
    throw ConfigurationError("give either potential or potential_file, not both");
  if (doc.contains("potential_file")) {
    auto path = std::filesystem::path(get<std::string>(doc, "potential_file", "", top));
    if (path.is_relative()) path = base_dir / path;
    c.potential = load_potential_json(path, &c.lattice);
    c.potential_source = path.string();
  } else if (doc.contains("potential")) {
    c.potential = parse_potential_json(doc.at("potential").dump(), &c.lattice);
  }
  c.truncation = get(doc, "truncation", c.truncation, top);
  c.band = get(doc, "band", c.band, top);
  c.p0 = get(doc, "p0", c.p0, top);
  c.q0 = get(doc, "q0", c.q0, top);
  if (doc.contains("envelope")) {
    const auto& e = doc.at("envelope");
    check_keys(e, {"profile", "width", "amplitude"}, "envelope");
    c.envelope.name = get(e, "profile", c.envelope.name, "envelope");
    c.envelope.width = get(e, "width", c.envelope.width, "envelope");
    c.envelope.amplitude = get(e, "amplitude", c.envelope.amplitude, "envelope");
  }
  if (doc.contains("nonlinearity")) c.nonlinearity = parse_nonlinearity(doc.at("nonlinearity"));
  c.epsilons = parse_list(doc, "epsilons", c.epsilons, top);
  c.T = get(doc, "T", c.T, top);
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    check_keys(g, {"x_length", "points_per_period", "z_length", "z_points"}, "grid");
    c.grid.x_length = get(g, "x_length", c.grid.x_length, "grid");
    c.grid.points_per_period = get(g, "points_per_period", c.grid.points_per_period, "grid");
    c.grid.z_length = get(g, "z_length", c.grid.z_length, "grid");
    c.grid.z_points = get(g, "z_points", c.grid.z_points, "grid");
  }
  if (doc.contains("time_step")) {
    const auto& t = doc.at("time_step");
    check_keys(t, {"direct_c", "envelope_dt"}, "time_step");
    c.direct_c = get(t, "direct_c", c.direct_c, "time_step");
    c.envelope_dt = get(t, "envelope_dt", c.envelope_dt, "time_step");
  }
  c.error_samples = get(doc, "error_samples", c.error_samples, top);
  c.well_prepared = get(doc, "well_prepared", c.well_prepared, top);
  c.both_variants = get(doc, "both_variants", c.both_variants, top);
  c.seed = get(doc, "seed", c.seed, top);
  c.output_dir = get(doc, "output_dir", c.output_dir, top);
  if (doc.contains("bands")) {
    const auto& b = doc.at("bands");
    check_keys(b, {"kmin", "kmax", "nk", "count"}, "bands");
    c.bands.kmin = get(b, "kmin", c.bands.kmin, "bands");
    c.bands.kmax = get(b, "kmax", c.bands.kmax, "bands");
    c.bands.nk = get(b, "nk", c.bands.nk, "bands");
    c.bands.count = get(b, "count", c.bands.count, "bands");
  }
  if (doc.contains("averaging")) {
    const auto& a = doc.at("averaging");
    check_keys(a, {"kernel", "epsilons", "samples", "widths", "points_per_period"}, "averaging");
    if (a.contains("kernel")) c.averaging.kernel = parse_averaging_kernel(a.at("kernel"));
    c.averaging.epsilons = parse_list(a, "epsilons", c.averaging.epsilons, "averaging");
    c.averaging.samples = get(a, "samples", c.averaging.samples, "averaging");
    c.averaging.widths = get(a, "widths", c.averaging.widths, "averaging");
    c.averaging.points_per_period =
        get(a, "points_per_period", c.averaging.points_per_period, "averaging");
  }
  if (doc.contains("trajectory")) {
    const auto& t = doc.at("trajectory");
    const std::string w = "trajectory";
    check_keys(t, {"external", "slope", "omega", "T", "dt", "k_points", "interpolation", "free_band"}, w);
    auto& tr = c.trajectory;
    tr.external = get(t, "external", tr.external, w);
    tr.slope = get(t, "slope", tr.slope, w);
    tr.omega = get(t, "omega", tr.omega, w);
    tr.T = get(t, "T", tr.T, w);
    tr.dt = get(t, "dt", tr.dt, w);
    tr.k_points = get(t, "k_points", tr.k_points, w);
    tr.free_band = get(t, "free_band", tr.free_band, w);
    const auto interp = get<std::string>(t, "interpolation", "cubic_spline", w);
    if (interp == "cubic_spline")
      tr.interpolation = BandInterpolation::cubic_spline;
    else if (interp == "trigonometric")
      tr.interpolation = BandInterpolation::trigonometric;
    else
      throw ConfigurationError("trajectory.interpolation must be cubic_spline or trigonometric");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const RunConfig& c) {
  json averaging_kernel;
  if (const auto* p = std::get_if<PowerLaw>(&c.averaging.kernel)) {
    averaging_kernel = {{"kind", "power"}, {"mu", p->mu}};
  } else {
    averaging_kernel = smooth_kernel_json(std::get<SmoothKernel>(c.averaging.kernel));
    averaging_kernel["kind"] = "smooth";
  }
  return {
      {"potential", json::parse(potential_to_json(c.potential, c.lattice))},
      {"truncation", c.truncation},
      {"band", c.band},
      {"p0", c.p0},
      {"q0", c.q0},
      {"envelope",
       {{"profile", c.envelope.name}, {"width", c.envelope.width}, {"amplitude", c.envelope.amplitude}}},
      {"nonlinearity", nonlinearity_json(c.nonlinearity)},
      {"epsilons", c.epsilons},
      {"T", c.T},
      {"grid",
       {{"x_length", c.grid.x_length},
        {"points_per_period", c.grid.points_per_period},
        {"z_length", c.grid.z_length},
        {"z_points", c.grid.z_points}}},
      {"time_step", {{"direct_c", c.direct_c}, {"envelope_dt", c.envelope_dt}}},
      {"error_samples", c.error_samples},
      {"well_prepared", c.well_prepared},
      {"both_variants", c.both_variants},
      {"seed", c.seed},
      {"bands", {{"kmin", c.bands.kmin}, {"kmax", c.bands.kmax}, {"nk", c.bands.nk}, {"count", c.bands.count}}},
      {"averaging",
       {{"kernel", averaging_kernel},
        {"epsilons", c.averaging.epsilons},
        {"samples", c.averaging.samples},
        {"widths", c.averaging.widths},
        {"points_per_period", c.averaging.points_per_period}}},
      {"trajectory",
       {{"external", c.trajectory.external},
        {"slope", c.trajectory.slope},
        {"omega", c.trajectory.omega},
        {"T", c.trajectory.T},
        {"dt", c.trajectory.dt},
        {"k_points", c.trajectory.k_points},
        {"interpolation", c.trajectory.interpolation == BandInterpolation::trigonometric
                              ? "trigonometric"
                              : "cubic_spline"},
        {"free_band", c.trajectory.free_band}}},
  };
}

ConvergenceReport run_convergence_study(const RunConfig& config) {
  config.validate();
  for (double eps : config.epsilons)
    if (!is_dyadic(eps)) throw ConfigurationError("convergence studies need dyadic eps values");
  if (config.epsilons.size() < 3) throw ConfigurationError("convergence studies need at least three eps values");

  const auto problem = config.problem();
  const auto u0 = config.initial_envelope();
  const double a = config.lattice.period[0];

  ConvergenceReport report;
  report.alpha = config.nonlinearity.alpha;
  report.alpha_critical = critical_alpha(config.nonlinearity, 1);
  report.nonlinearity = config.nonlinearity.describe();

  // Decay radius of the initial envelope in z. Nonlinear evolution fattens
  // the tails, so the box check below asks for 1.5 times this radius; the
  // packet assembly still refuses envelopes that reach the edge.
  double sup = 0.0;
  for (const auto& v : u0.values) sup = std::max(sup, std::abs(v));
  double reach = 0.0;
  for (std::size_t j = 0; j < u0.grid.n; ++j)
    if (std::abs(u0.values[j]) > 1e-8 * sup) reach = std::max(reach, std::abs(u0.grid.point(j)));

  for (double eps : config.epsilons) {
    const auto start = std::chrono::steady_clock::now();
    const PacketModel model(problem, {config.band, config.p0, config.q0, eps}, config.nonlinearity);
    if (report.runs.empty()) {
      report.regime = model.params().regime;
      report.mass = model.params().mass_tensor(0, 0);
      report.coupling = model.params().coupling;
      report.velocity = model.velocity();
    }
    const auto xgrid = config.field_grid_for(eps);
    const double half = 0.5 * config.grid.x_length;
    const double margin = 1.5 * reach * std::sqrt(eps);
    const double far = std::max(std::abs(model.center(0.0)), std::abs(model.center(config.T)));
    if (far + margin > half - 2.0 * xgrid.spacing())
      throw ConfigurationError("grid.x_length too small: the packet reaches the box edge before T "
                               "(needs |q| + " + format_number(margin) + " <= " +
                               format_number(half) + ")");

    EpsilonRun run;
    run.epsilon = eps;
    run.x_points = xgrid.n;
    run.direct_dt = default_direct_dt(eps, config.direct_c);

    std::vector<bool> variants{config.well_prepared};
    if (config.both_variants) variants.push_back(!config.well_prepared);

    EnvelopeSolver envelope(u0, model.params());
    std::optional<EnvelopeSolver> nonlinear_envelope;
    if (model.params().regime == Regime::supercritical) {
      // Same envelope equation with the nonlinear term kept at full strength.
      auto forced = model.params();
      forced.regime = Regime::critical;
      nonlinear_envelope.emplace(u0, forced);
    }

    std::vector<DirectSolver> direct;
    for (bool wp : variants) direct.emplace_back(model.initial_data(u0, xgrid, wp), problem, config.nonlinearity);
    for (bool wp : variants) run.series.push_back({wp ? "well_prepared" : "leading", {}, {}, 0.0});
    if (nonlinear_envelope) run.series.push_back({"nonlinear_envelope", {}, {}, 0.0});

    for (int i = 0; i <= config.error_samples; ++i) {
      const double t = config.T * i / config.error_samples;
      envelope.advance_to(t, config.envelope_dt);
      const auto packet = model.assemble(envelope.state(), xgrid, PacketOrder::leading);
      for (std::size_t v = 0; v < direct.size(); ++v) {
        direct[v].advance_to(t, run.direct_dt);
        const double err = l2_error(direct[v].state(), packet);
        run.series[v].times.push_back(t);
        run.series[v].errors.push_back(err);
      }
      if (nonlinear_envelope) {
        nonlinear_envelope->advance_to(t, config.envelope_dt);
        const auto other = model.assemble(nonlinear_envelope->state(), xgrid, PacketOrder::leading);
        auto& s = run.series.back();
        s.times.push_back(t);
        s.errors.push_back(l2_error(direct[0].state(), other));
      }
    }
    for (auto& s : run.series) s.sup_error = *std::max_element(s.errors.begin(), s.errors.end());

    for (const auto& d : direct) {
      run.direct_mass_drift = std::max(run.direct_mass_drift, d.diagnostics().relative_mass_drift());
      for (const auto& w : d.diagnostics().warnings) run.warnings.push_back(w);
    }
    run.envelope_mass_drift = envelope.diagnostics().relative_mass_drift();
    for (const auto& w : envelope.diagnostics().warnings) run.warnings.push_back(w);
    if (run.direct_mass_drift > kMassDriftTolerance || run.envelope_mass_drift > kMassDriftTolerance)
      report.mass_failure = true;
    run.runtime_seconds = seconds_since(start);
    report.runs.push_back(std::move(run));
  }

  std::vector<double> eps_list, sups;
  for (const auto& r : report.runs) {
    eps_list.push_back(r.epsilon);
    sups.push_back(r.series[0].sup_error);
  }
  report.exact_agreement =
      *std::max_element(sups.begin(), sups.end()) <= kExactAgreementTolerance;
  if (report.exact_agreement) {
    report.fit.exact_agreement = true;
    report.fit.points = static_cast<int>(sups.size());
    report.fit.slope = report.fit.intercept = std::nan("");
  } else {
    report.fit = fit_slope(eps_list, sups);
  }
  for (std::size_t s = 1; s < report.runs.front().series.size(); ++s) {
    std::vector<double> other;
    for (const auto& r : report.runs) other.push_back(r.series[s].sup_error);
    const bool exact = *std::max_element(other.begin(), other.end()) <= kExactAgreementTolerance;
    SlopeFit f;
    if (exact) {
      f.exact_agreement = true;
      f.points = static_cast<int>(other.size());
      f.slope = f.intercept = std::nan("");
    } else {
      f = fit_slope(eps_list, other);
    }
    report.secondary_fits.emplace_back(report.runs.front().series[s].label, f);
  }
  if (report.mass_failure)
    report.warnings.push_back("mass drift above 1e-10 in at least one run");
  return report;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json report_json(const ConvergenceReport& report, const RunConfig& config) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    json series = json::array();
    for (const auto& s : r.series)
      series.push_back({{"label", s.label}, {"sup_error", s.sup_error}, {"times", s.times}, {"errors", s.errors}});
    runs.push_back({{"epsilon", r.epsilon},
                    {"x_points", r.x_points},
                    {"direct_dt", r.direct_dt},
                    {"direct_mass_drift", r.direct_mass_drift},
                    {"envelope_mass_drift", r.envelope_mass_drift},
                    {"series", series},
                    {"warnings", r.warnings}});
  }
  json secondary = json::object();
  for (const auto& [label, fit] : report.secondary_fits) secondary[label] = fit_json(fit);
  return {{"regime", to_string(report.regime)},
          {"alpha", report.alpha},
          {"alpha_critical", report.alpha_critical},
          {"nonlinearity", report.nonlinearity},
          {"effective_mass", report.mass},
          {"effective_coupling", report.coupling},
          {"group_velocity", report.velocity},
          {"fit", fit_json(report.fit)},
          {"secondary_fits", secondary},
          {"exact_agreement", report.exact_agreement},
          {"mass_failure", report.mass_failure},
          {"warnings", report.warnings},
          {"runs", runs},
          {"config", config_to_json(config)},
          {"potential_source", config.potential_source}};
}

std::string errors_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "eps,series,t,error\n";
  for (const auto& r : report.runs)
    for (const auto& s : r.series)
      for (std::size_t i = 0; i < s.times.size(); ++i)
        out << format_number(r.epsilon) << ',' << s.label << ',' << format_number(s.times[i]) << ','
            << format_number(s.errors[i]) << '\n';
  return out.str();
}

json timing_json(const ConvergenceReport& report) {
  json runs = json::array();
  double total = 0.0;
  for (const auto& r : report.runs) {
    runs.push_back({{"epsilon", r.epsilon}, {"x_points", r.x_points}, {"runtime_seconds", r.runtime_seconds}});
    total += r.runtime_seconds;
  }
  return {{"runs", runs}, {"total_seconds", total}};
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write " + (dir / name).string());
  out << text;
}

}  // namespace nlcs
