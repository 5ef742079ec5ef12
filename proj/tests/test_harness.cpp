#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlcs/errors.hpp"
#include "nlcs/harness.hpp"

using namespace nlcs;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nlcs_test_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path write_config(const std::filesystem::path& dir, const json& doc) {
  const auto path = dir / "config.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"nlcs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

// Small Mathieu study that finishes in about a second.
json quick_study() {
  return {{"potential", {{"period", 1.0}, {"coefficients", {{{"g", 1}, {"re", 0.5}}}}}},
          {"p0", 1.0},
          {"q0", 0.0},
          {"nonlinearity", {{"kind", "local"}, {"sigma", 1}, {"lambda", 1.0}}},
          {"epsilons", {0.25, 0.125, 0.0625}},
          {"T", 0.25},
          {"grid", {{"x_length", 16.0}, {"points_per_period", 16}, {"z_points", 512}}},
          {"time_step", {{"direct_c", 0.02}}}};
}

}  // namespace

TEST_CASE("fit_slope recovers an exact power law") {
  const std::vector<double> eps{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<double> err;
  for (double e : eps) err.push_back(3.0 * std::pow(e, 0.5));
  const auto fit = fit_slope(eps, err);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.slope_half_width < 1e-10);
  CHECK(!fit.exact_agreement);
}

TEST_CASE("fit_slope of constant errors is zero") {
  const std::vector<double> eps{0.5, 0.25, 0.125};
  const std::vector<double> err{0.1, 0.1, 0.1};
  CHECK(std::abs(fit_slope(eps, err).slope) < 1e-12);
}

TEST_CASE("fit_slope under seeded 5 percent noise") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> eps, err;
  for (int k = 4; k <= 10; ++k) {
    const double e = std::ldexp(1.0, -k);
    eps.push_back(e);
    err.push_back(std::sqrt(e) * (1.0 + noise(rng)));
  }
  const auto fit = fit_slope(eps, err);
  CHECK(std::abs(fit.slope - 0.5) < 0.05);
  CHECK(fit.slope_half_width > 0.0);
  CHECK(std::abs(fit.slope - 0.5) <= fit.slope_half_width + 0.05);
}

TEST_CASE("fit_slope edge cases") {
  const std::vector<double> two{0.5, 0.25};
  CHECK_THROWS_AS(fit_slope(two, two), DomainError);
  const std::vector<double> eps{0.5, 0.25, 0.125};
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  const auto fit = fit_slope(eps, zeros);
  CHECK(fit.exact_agreement);
  CHECK(std::isnan(fit.slope));
  const std::vector<double> bad{0.5, -0.25, 0.125};
  CHECK_THROWS_AS(fit_slope(bad, eps), DomainError);
}

TEST_CASE("config parsing round trips and rejects unknown keys") {
  const auto c = parse_config(quick_study());
  CHECK(c.p0 == 1.0);
  CHECK(c.epsilons.size() == 3);
  CHECK(c.nonlinearity.alpha == doctest::Approx(1.5));
  const auto again = parse_config(config_to_json(c));
  CHECK(config_to_json(again).dump() == config_to_json(c).dump());

  auto doc = quick_study();
  doc["epsilon"] = 0.1;
  CHECK_THROWS_AS(parse_config(doc), ConfigurationError);
  doc = quick_study();
  doc["grid"]["ppp"] = 8;
  CHECK_THROWS_AS(parse_config(doc), ConfigurationError);
  doc = quick_study();
  doc["nonlinearity"]["kind"] = "cubic";
  CHECK_THROWS_AS(parse_config(doc), ConfigurationError);
}

TEST_CASE("config validation") {
  auto expect_invalid = [](const std::function<void(json&)>& edit) {
    auto doc = quick_study();
    edit(doc);
    CHECK_THROWS_AS(parse_config(doc), ConfigurationError);
  };
  expect_invalid([](json& d) { d["grid"]["points_per_period"] = 8; });
  expect_invalid([](json& d) { d["epsilons"] = {0.25, 0.0}; });
  expect_invalid([](json& d) { d["T"] = -1.0; });
  expect_invalid([](json& d) { d["truncation"] = 1; });
  expect_invalid([](json& d) { d["error_samples"] = 4; });
  expect_invalid([](json& d) { d["time_step"]["direct_c"] = 0.0; });
  expect_invalid([](json& d) { d["bands"] = {{"count", 100}}; });
  expect_invalid([](json& d) { d["potential_file"] = "missing.json"; });
}

TEST_CASE("free flow without nonlinearity agrees exactly") {
  auto doc = quick_study();
  doc.erase("potential");
  doc["nonlinearity"]["lambda"] = 0.0;
  const auto report = run_convergence_study(parse_config(doc));
  CHECK(report.exact_agreement);
  for (const auto& run : report.runs) CHECK(run.series[0].sup_error < kExactAgreementTolerance);
}

TEST_CASE("report slope is the fit of its own errors") {
  const auto config = parse_config(quick_study());
  const auto report = run_convergence_study(config);
  REQUIRE(report.runs.size() == 3);
  std::vector<double> eps, err;
  for (const auto& run : report.runs) {
    eps.push_back(run.epsilon);
    err.push_back(run.series[0].sup_error);
    CHECK(run.series[0].times.size() == static_cast<std::size_t>(config.error_samples) + 1);
    CHECK(run.direct_mass_drift < kMassDriftTolerance);
    CHECK(run.envelope_mass_drift < kMassDriftTolerance);
  }
  const auto refit = fit_slope(eps, err);
  CHECK(std::abs(refit.slope - report.fit.slope) < 1e-12);
  const auto j = report_json(report, config);
  CHECK(std::abs(j.at("fit").at("slope").get<double>() - report.fit.slope) < 1e-12);
  CHECK(report.regime == Regime::critical);
  CHECK(!report.mass_failure);
}

TEST_CASE("supercritical study carries the nonlinear-envelope series") {
  auto doc = quick_study();
  doc["nonlinearity"]["alpha"] = 2.5;
  doc["epsilons"] = {0.25, 0.125, 0.0625};
  const auto report = run_convergence_study(parse_config(doc));
  CHECK(report.regime == Regime::supercritical);
  REQUIRE(report.runs.front().series.size() == 2);
  CHECK(report.runs.front().series[1].label == "nonlinear_envelope");
  REQUIRE(report.secondary_fits.size() == 1);
}

TEST_CASE("format_number is shortest round trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(std::stod(format_number(std::sqrt(2.0))) == std::sqrt(2.0));
}

TEST_CASE("cli bands writes nk x bands free-particle rows") {
  const auto dir = scratch("bands");
  const auto cfg = write_config(dir, json::object());
  REQUIRE(run_cli({"--quiet", "--config", cfg.string(), "--out", dir.string(), "bands", "--kmin",
                   "-3.14159", "--kmax", "3.14159", "--nk", "128", "--bands", "4"}) == 0);
  std::istringstream csv(slurp(dir / "bands.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "k,band,energy,gap");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(csv, line)) {
    ++rows;
    double k, e;
    int m;
    char comma;
    std::istringstream(line) >> k >> comma >> m >> comma >> e;
    // Free bands: |k + g|^2 / 2 over the reciprocal lattice, sorted.
    std::vector<double> free;
    for (int g = -3; g <= 3; ++g) free.push_back(0.5 * std::pow(k + 2 * kPi * g, 2));
    std::sort(free.begin(), free.end());
    worst = std::max(worst, std::abs(e - free[static_cast<std::size_t>(m)]));
  }
  CHECK(rows == 128 * 4);
  CHECK(worst < 1e-10);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("codes");
  CHECK(run_cli({"--quiet", "no-such-command"}) == 1);
  CHECK(run_cli({"--quiet", "--bogus", "bands"}) == 1);
  CHECK(run_cli({"--quiet"}) == 1);

  auto bad = quick_study();
  bad["unknown"] = 1;
  const auto bad_cfg = write_config(dir, bad);
  CHECK(run_cli({"--quiet", "--config", bad_cfg.string(), "--out", dir.string(), "compare"}) == 1);

  // Focusing supercritical envelope with mass above the ground-state threshold:
  // the envelope collapses before T, which is a numerical failure.
  const auto blow = dir / "blowup";
  std::filesystem::create_directories(blow);
  json doc = {{"nonlinearity", {{"kind", "local"}, {"sigma", 3}, {"lambda", -1.0}}},
              {"envelope", {{"profile", "gaussian"}, {"width", 0.5}, {"amplitude", 4.0}}},
              {"T", 1.0},
              {"epsilons", {0.25, 0.125, 0.0625}},
              {"grid", {{"x_length", 16.0}, {"points_per_period", 16}, {"z_points", 1024}}}};
  const auto blow_cfg = write_config(blow, doc);
  CHECK(run_cli({"--quiet", "--config", blow_cfg.string(), "--out", blow.string(),
                 "evolve-envelope"}) == 2);
  const auto failure = json::parse(slurp(blow / "failure.json"));
  CHECK(failure.at("error") == "blowup");
  CHECK(failure.at("abort_time").get<double>() < 1.0);
}

TEST_CASE("cli outputs are byte-identical across runs") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto doc = quick_study();
  doc["seed"] = 5;
  doc["trajectory"] = {{"T", 0.5}, {"dt", 0.01}, {"external", "harmonic"}};
  const auto cfg = write_config(a, doc);
  for (const auto& out : {a, b}) {
    for (const char* cmd : {"compare", "trajectory", "effective-params"})
      REQUIRE(run_cli({"--quiet", "--config", cfg.string(), "--out", out.string(), cmd}) == 0);
  }
  for (const char* f : {"report.json", "errors.csv", "trajectory.csv", "trajectory.json",
                        "effective_params.json"})
    CHECK(slurp(a / f) == slurp(b / f));
  CHECK(!slurp(a / "errors.csv").empty());
}

TEST_CASE("cli evolve and averaging subcommands write their files") {
  const auto dir = scratch("evolve");
  auto doc = quick_study();
  doc["averaging"] = {{"epsilons", {0.0625, 0.03125, 0.015625, 0.0078125}}, {"samples", 9}};
  const auto cfg = write_config(dir, doc);
  const auto base = std::vector<std::string>{"--quiet", "--config", cfg.string(), "--out", dir.string()};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  CHECK(run_cli(with({"evolve-envelope", "--snapshots", "2"})) == 0);
  CHECK(run_cli(with({"evolve-direct", "--epsilon", "0.25", "--snapshots", "2"})) == 0);
  CHECK(run_cli(with({"averaging"})) == 0);

  const auto env = json::parse(slurp(dir / "envelope_run.json"));
  CHECK(env.at("relative_mass_drift").get<double>() < 1e-10);
  const auto direct = json::parse(slurp(dir / "direct_run.json"));
  CHECK(direct.at("relative_mass_drift").get<double>() < 1e-10);
  CHECK(direct.at("x_points").get<std::size_t>() == 16 * 4 * 16);
  const auto avg = json::parse(slurp(dir / "averaging.json"));
  CHECK(avg.at("sup_errors").size() == 4);
  CHECK(slurp(dir / "averaging.csv").rfind("eps,sup_error\n", 0) == 0);
}
