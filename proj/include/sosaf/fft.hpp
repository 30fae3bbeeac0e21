#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin wrapper over FFTW. Plans are cached per shape and executed with the
// new-array interface, so calls are safe from concurrent workers.
namespace sosaf::fft {

using cplx = std::complex<double>;

void forward(std::span<cplx> data);
/// Unnormalized inverse (FFTW convention): inverse(forward(x)) == n * x.
void inverse(std::span<cplx> data);

/// 2D transforms over a row-major rows x cols buffer.
void forward_2d(std::span<cplx> data, std::size_t rows, std::size_t cols);
void inverse_2d(std::span<cplx> data, std::size_t rows, std::size_t cols);

/// Analytic signal x + i*H[x] via one-sided spectrum.
std::vector<cplx> analytic_signal(std::span<const double> x);

/// Signed frequency index of DFT bin k for length n (k <= n/2 maps to k).
inline long signed_bin(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

} // namespace sosaf::fft
