#pragma once

#include <cstddef>
#include <span>

#include "nlcs/grid.hpp"

namespace nlcs {

/// Owning wrapper around a pair of FFTW plans of fixed length.
///
/// Plans use FFTW_ESTIMATE so that repeated runs pick the same algorithm and
/// produce bit-identical output. `inverse` is normalized by 1/n.
class Fft1d {
 public:
  explicit Fft1d(std::size_t n);
  ~Fft1d();

  Fft1d(const Fft1d&) = delete;
  Fft1d& operator=(const Fft1d&) = delete;
  Fft1d(Fft1d&& other) noexcept;
  Fft1d& operator=(Fft1d&& other) noexcept;

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  void release() noexcept;

  std::size_t n_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Spectral derivative d/dz of a periodic grid function.
ComplexField spectral_derivative(std::span<const cplx> values,
                                 const PeriodicGrid& grid, int order = 1);

}  // namespace nlcs
