#pragma once

#include <complex>
#include <cstddef>

namespace turbmimo {

// Unitary 2-D FFT for one square size, backed by FFTW.  Plans are built once
// per engine; engines are confined to a single thread.  Use for_grid() to get
// the calling thread's cached engine for a size.
//
// forward()/inverse() scale by 1/n each, so a round trip is the identity and
// discrete power is preserved exactly (up to rounding).  backward_raw() is the
// plain unnormalized inverse DFT sum, which is what spectral synthesis wants.
class FftEngine {
 public:
  explicit FftEngine(std::size_t n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  std::size_t n() const { return n_; }

  void forward(std::complex<double>* data) const;
  void inverse(std::complex<double>* data) const;
  void backward_raw(std::complex<double>* data) const;

  // Thread-local engine cache keyed by size.
  static FftEngine& for_grid(std::size_t n);

 private:
  std::size_t n_;
  void* plan_fwd_;  // fftw_plan
  void* plan_bwd_;
  void* scratch_;   // alignment-reference buffer the plans were built on
};

}  // namespace turbmimo
