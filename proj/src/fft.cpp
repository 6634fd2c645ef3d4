#include "freqx/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "freqx/errors.hpp"

namespace freqx {

namespace {

static_assert(sizeof(Complex) == sizeof(fftw_complex));

// The FFTW planner is not thread-safe; execution of an existing plan is.
fftw_plan cached_plan(std::size_t rows, std::size_t cols, bool inverse) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{rows, cols, inverse}];
  if (!slot) {
    std::vector<Complex> buffer(rows * cols);
    auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
    const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot = rows == 1 ? fftw_plan_dft_1d(static_cast<int>(cols), p, p, sign, flags)
                     : fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), p, p, sign, flags);
    if (!slot) throw ParameterError("FFTW could not plan the transform");
  }
  return slot;
}

void execute(std::span<Complex> data, std::size_t rows, std::size_t cols, bool inverse) {
  if (rows == 0 || cols == 0) throw ParameterError("FFT length must be positive");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(rows, cols, inverse), p, p);
}

}  // namespace

void fft1d(std::span<Complex> data, bool inverse) { execute(data, 1, data.size(), inverse); }

void fft2d(std::span<Complex> grid, std::size_t rows, std::size_t cols, bool inverse) {
  if (grid.size() != rows * cols) throw DimensionError("fft2d: grid size does not match shape");
  execute(grid, rows, cols, inverse);
}

}  // namespace freqx
