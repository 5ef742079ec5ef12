#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlcs/bloch.hpp"
#include "nlcs/errors.hpp"

namespace nlcs {

using nlohmann::json;

namespace {

LatticeIndex parse_index(const json& g, int dimension) {
  if (g.is_number_integer()) {
    if (dimension != 1) throw ConfigurationError("scalar index given for a 2D lattice");
    return {g.get<int>(), 0};
  }
  if (g.is_array() && static_cast<int>(g.size()) == dimension) {
    LatticeIndex idx{0, 0};
    for (int i = 0; i < dimension; ++i) idx[static_cast<std::size_t>(i)] = g.at(i).get<int>();
    return idx;
  }
  throw ConfigurationError("coefficient index \"g\" must be an integer or an array");
}

}  // namespace

PeriodicPotential parse_potential_json(const std::string& text, Lattice* lattice) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("potential file: ") + e.what());
  }
  Lattice lat;
  try {
    const json& period = doc.at("period");
    if (period.is_array()) {
      lat.dimension = static_cast<int>(period.size());
      for (std::size_t i = 0; i < period.size() && i < 2; ++i)
        lat.period[i] = period.at(i).get<double>();
    } else {
      lat.dimension = 1;
      lat.period = {period.get<double>(), period.get<double>()};
    }
    lat.validate();

    // Collect raw entries first so that conflicting Hermitian partners can be
    // detected before completion.
    std::map<LatticeIndex, cplx> raw;
    for (const auto& entry : doc.at("coefficients")) {
      const LatticeIndex g = parse_index(entry.at("g"), lat.dimension);
      const cplx v{entry.value("re", 0.0), entry.value("im", 0.0)};
      if (raw.count(g) != 0) throw ConfigurationError("duplicate coefficient index");
      raw[g] = v;
    }
    PeriodicPotential pot(lat.dimension);
    for (const auto& [g, v] : raw) {
      const LatticeIndex minus{-g[0], -g[1]};
      auto partner = raw.find(minus);
      if (partner != raw.end() &&
          std::abs(partner->second - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v)))
        throw ConfigurationError("coefficients violate V_{-g} = conj(V_g)");
      pot.set(g, v);
    }
    if (lattice != nullptr) *lattice = lat;
    return pot;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("potential file: ") + e.what());
  }
}

PeriodicPotential load_potential_json(const std::filesystem::path& path, Lattice* lattice) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open potential file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_potential_json(ss.str(), lattice);
}

std::string potential_to_json(const PeriodicPotential& potential, const Lattice& lattice) {
  json doc;
  if (lattice.dimension == 1)
    doc["period"] = lattice.period[0];
  else
    doc["period"] = {lattice.period[0], lattice.period[1]};
  json coeffs = json::array();
  for (const auto& [g, v] : potential.coefficients()) {
    json e;
    if (lattice.dimension == 1)
      e["g"] = g[0];
    else
      e["g"] = {g[0], g[1]};
    e["re"] = v.real();
    e["im"] = v.imag();
    coeffs.push_back(e);
  }
  doc["coefficients"] = coeffs;
  return doc.dump(2);
}

}  // namespace nlcs
