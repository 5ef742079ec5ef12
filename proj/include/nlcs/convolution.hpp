#pragma once

#include <span>
#include <vector>

#include "nlcs/fft.hpp"
#include "nlcs/grid.hpp"

namespace nlcs {

/// Symmetric Toeplitz product out_i = sum_j w[|i - j|] rho_j evaluated in
/// O(n log n) through a circulant embedding of length 2n. Distances are not
/// wrapped, so the result equals kernels::toeplitz_convolution up to roundoff.
class ToeplitzConvolution {
 public:
  explicit ToeplitzConvolution(std::span<const double> weights_by_offset);

  std::size_t size() const { return n_; }
  void apply(std::span<const double> density, std::span<double> out) const;

 private:
  std::size_t n_;
  Fft1d fft_;
  ComplexField symbol_;
  mutable ComplexField work_;
};

}  // namespace nlcs
