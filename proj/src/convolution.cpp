#include "nlcs/convolution.hpp"

#include "nlcs/errors.hpp"

namespace nlcs {

ToeplitzConvolution::ToeplitzConvolution(std::span<const double> weights_by_offset)
    : n_(weights_by_offset.size()),
      fft_(2 * weights_by_offset.size()),
      symbol_(2 * weights_by_offset.size(), cplx{0.0, 0.0}),
      work_(2 * weights_by_offset.size()) {
  if (n_ == 0) throw DomainError("empty convolution kernel");
  for (std::size_t j = 0; j < n_; ++j) symbol_[j] = weights_by_offset[j];
  for (std::size_t j = 1; j < n_; ++j) symbol_[2 * n_ - j] = weights_by_offset[j];
  fft_.forward(symbol_);
}

void ToeplitzConvolution::apply(std::span<const double> density,
                                std::span<double> out) const {
  if (density.size() != n_ || out.size() != n_)
    throw DomainError("convolution: size mismatch");
  for (std::size_t j = 0; j < n_; ++j) work_[j] = density[j];
  for (std::size_t j = n_; j < 2 * n_; ++j) work_[j] = 0.0;
  fft_.forward(work_);
  for (std::size_t j = 0; j < 2 * n_; ++j) work_[j] *= symbol_[j];
  fft_.inverse(work_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = work_[j].real();
}

}  // namespace nlcs
