#include "nlcs/fft.hpp"

#include <fftw3.h>

#include <stdexcept>
#include <utility>
#include <vector>

#include "nlcs/errors.hpp"

namespace nlcs {

namespace {

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft1d::Fft1d(std::size_t n) : n_(n) {
  if (n == 0) throw ConfigurationError("FFT length must be positive");
  std::vector<cplx> scratch(n);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()),
                                   as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    release();
    throw NumericalError("FFTW plan creation failed");
  }
}

Fft1d::~Fft1d() { release(); }

Fft1d::Fft1d(Fft1d&& other) noexcept
    : n_(other.n_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft1d& Fft1d::operator=(Fft1d&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void Fft1d::release() noexcept {
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  forward_plan_ = nullptr;
  inverse_plan_ = nullptr;
}

void Fft1d::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw DomainError("FFT length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
}

void Fft1d::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw DomainError("FFT length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data.data()),
                   as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

ComplexField spectral_derivative(std::span<const cplx> values,
                                 const PeriodicGrid& grid, int order) {
  if (values.size() != grid.n) throw DomainError("grid/value size mismatch");
  ComplexField out(values.begin(), values.end());
  Fft1d fft(grid.n);
  fft.forward(out);
  const std::size_t n = grid.n;
  for (std::size_t j = 0; j < n; ++j) {
    // The Nyquist bin has no well-defined odd derivative.
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
      out[j] = 0.0;
      continue;
    }
    cplx factor{1.0, 0.0};
    const cplx ik{0.0, grid.wavenumber(j)};
    for (int p = 0; p < order; ++p) factor *= ik;
    out[j] *= factor;
  }
  fft.inverse(out);
  return out;
}

}  // namespace nlcs
