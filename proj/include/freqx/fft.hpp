#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace freqx {

using Complex = std::complex<double>;

// Thin wrappers over FFTW. Both directions are unnormalized:
//   forward: X[k] = sum_n x[n] exp(-2 pi i k n / N)
//   inverse: x[n] = sum_k X[k] exp(+2 pi i k n / N)
// Plans are cached per shape; calls are thread-safe.
void fft1d(std::span<Complex> data, bool inverse);

// Row-major rows x cols grid, in place.
void fft2d(std::span<Complex> grid, std::size_t rows, std::size_t cols, bool inverse);

}  // namespace freqx
