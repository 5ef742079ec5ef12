#include "nlcs/grid.hpp"

#include <algorithm>
#include <cmath>

namespace nlcs {

std::vector<double> PeriodicGrid::points() const {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = point(j);
  return x;
}

double PeriodicGrid::wavenumber(std::size_t j) const {
  const auto nn = static_cast<long>(n);
  long k = static_cast<long>(j);
  if (k >= (nn + 1) / 2) k -= nn;
  return kTwoPi * static_cast<double>(k) / length;
}

std::vector<double> PeriodicGrid::wavenumbers() const {
  std::vector<double> xi(n);
  for (std::size_t j = 0; j < n; ++j) xi[j] = wavenumber(j);
  return xi;
}

bool PeriodicGrid::same_as(const PeriodicGrid& other, double rel_tol) const {
  if (n != other.n) return false;
  const double scale = std::max(std::abs(length), 1.0);
  return std::abs(length - other.length) <= rel_tol * scale &&
         std::abs(origin - other.origin) <= rel_tol * scale;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double l2_norm(std::span<const cplx> values, double spacing) {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * spacing);
}

double sup_norm(std::span<const cplx> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace nlcs
