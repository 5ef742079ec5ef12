#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace nlcs {

/// Weights of the punctured trapezoid rule for integrals of |s|^mu f(s) on a
/// uniform grid s_j = j h, corrected at the singular node.
///
/// The rule is h * sum_{j != 0} |jh|^mu f(jh) plus the generalized
/// Euler-Maclaurin (Navot) end corrections
///   -2 zeta(-mu - 2k) h^{mu + 2k + 1} f^{(2k)}(0) / (2k)!,  k = 0, 1, 2,
/// with the even derivatives of f replaced by centered difference stencils.
/// The resulting error is O(h^{mu + 7}) for smooth, decaying f.
struct PowerLawRule {
  double mu = 0.0;
  double h = 1.0;
  /// Additive corrections to the weight at offsets 0, 1, 2.
  std::array<double, 3> correction{};

  PowerLawRule(double mu, double h);

  /// Weight multiplying f(j h).
  double weight(long j) const;

  /// weights for offsets 0..count-1 (the rule is symmetric in j).
  std::vector<double> weights_by_offset(std::size_t count) const;
};

}  // namespace nlcs
