#include "turbmimo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace turbmimo {

namespace {
// FFTW planning is the one part of the library that is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftEngine::FftEngine(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("FftEngine: size must be a power of two");
  }
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * n));
  if (!buf) throw std::bad_alloc();
  const int ni = static_cast<int>(n);
  // FFTW_UNALIGNED so the plans run on any caller buffer (new-array execute);
  // FFTW_ESTIMATE keeps planning deterministic.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_fwd_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, flags);
  plan_bwd_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, flags);
  scratch_ = buf;
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FftEngine: planning failed");
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(scratch_);
}

void FftEngine::forward(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), d, d);
  const double s = 1.0 / static_cast<double>(n_);
  const std::size_t m = n_ * n_;
  for (std::size_t i = 0; i < m; ++i) data[i] *= s;
}

void FftEngine::inverse(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), d, d);
  const double s = 1.0 / static_cast<double>(n_);
  const std::size_t m = n_ * n_;
  for (std::size_t i = 0; i < m; ++i) data[i] *= s;
}

void FftEngine::backward_raw(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), d, d);
}

FftEngine& FftEngine::for_grid(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftEngine>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftEngine>(n);
  return *slot;
}

}  // namespace turbmimo
