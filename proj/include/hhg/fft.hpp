#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hhg::fft {

using cplx = std::complex<double>;

// Thin FFTW wrapper. Plans are created under a global lock (FFTW planning is
// not re-entrant); execution is thread-safe.

/// X_k = sum_n x_n exp(-2 pi i k n / N)
std::vector<cplx> forward(std::span<const cplx> x);
/// x_n = sum_k X_k exp(+2 pi i k n / N)   (no 1/N normalisation)
std::vector<cplx> backward(std::span<const cplx> x);

/// Reorders a transform so that the zero frequency sits at index N/2.
template <typename T>
std::vector<T> shift(std::span<const T> x) {
  const std::size_t n = x.size();
  std::vector<T> out(n);
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < n; ++i) out[(i + h) % n] = x[i];
  return out;
}

}  // namespace hhg::fft
