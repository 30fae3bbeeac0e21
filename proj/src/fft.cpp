#include "sosaf/fft.hpp"

#include "sosaf/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace sosaf::fft {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto &[key, plan] : plans)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans.find(key); it != plans.end())
      return it->second;
    // Planning must not touch caller data; plan on a scratch buffer.
    const std::size_t n = rows * cols;
    auto *scratch = fftw_alloc_complex(n);
    fftw_plan plan = rows == 1
        ? fftw_plan_dft_1d(static_cast<int>(cols), scratch, scratch, sign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED)
        : fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                           scratch, scratch, sign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan)
      throw Error(ErrorKind::invalid_argument, "FFTW planning failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache &cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<cplx> data, std::size_t rows, std::size_t cols, int sign) {
  if (data.size() != rows * cols)
    throw Error(ErrorKind::invalid_argument, "FFT buffer size mismatch");
  if (data.empty())
    return;
  auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(cache().get(rows, cols, sign), ptr, ptr);
}

} // namespace

void forward(std::span<cplx> data) { run(data, 1, data.size(), FFTW_FORWARD); }
void inverse(std::span<cplx> data) { run(data, 1, data.size(), FFTW_BACKWARD); }

void forward_2d(std::span<cplx> data, std::size_t rows, std::size_t cols) {
  run(data, rows, cols, FFTW_FORWARD);
}

void inverse_2d(std::span<cplx> data, std::size_t rows, std::size_t cols) {
  run(data, rows, cols, FFTW_BACKWARD);
}

std::vector<cplx> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cplx> buf(x.begin(), x.end());
  if (n < 2)
    return buf;
  forward(buf);
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < half || (k == half && n % 2 == 1))
      buf[k] *= 2.0;
    else if (k > half)
      buf[k] = 0.0;
  }
  inverse(buf);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto &v : buf)
    v *= scale;
  return buf;
}

} // namespace sosaf::fft
