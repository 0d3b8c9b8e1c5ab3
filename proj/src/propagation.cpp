#include "turbmimo/propagation.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "turbmimo/fft.hpp"

namespace turbmimo {

AbsorberWindow::AbsorberWindow(const Grid& g, double guard)
    : grid(g), guard_fraction(guard), w(g.size(), 1.0) {
  if (guard < 0.0 || guard >= 0.5) {
    throw std::invalid_argument("absorber guard fraction must be in [0, 0.5)");
  }
  if (guard == 0.0) return;
  const double half = 0.5 * g.extent();
  const double flat = (1.0 - guard) * half;  // taper starts here
  std::vector<double> axis(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double a = std::abs(g.coord(i));
    if (a <= flat) {
      axis[i] = 1.0;
    } else {
      const double t = std::min(1.0, (a - flat) / (half - flat));
      axis[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
  }
  for (std::size_t iy = 0; iy < g.n; ++iy)
    for (std::size_t ix = 0; ix < g.n; ++ix) w[iy * g.n + ix] = axis[iy] * axis[ix];
}

FresnelKernel::FresnelKernel(const Grid& g, double distance, double wavelength)
    : grid_(g), distance_(distance), wavelength_(wavelength) {
  if (distance < 0.0) throw std::invalid_argument("propagation distance must be >= 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (distance == 0.0) return;  // identity; no table
  h_.resize(g.size());
  // Envelope convention: the e^{i k0 d} carrier is dropped.  Over km paths it
  // winds ~1e10 rad, far beyond what a double can hold to the tolerances the
  // composition identities need, and it cancels from every observable anyway.
  const double chirp = std::numbers::pi * wavelength * distance;
  std::vector<double> f2(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double f = g.freq(i);
    f2[i] = f * f;
  }
  for (std::size_t iy = 0; iy < g.n; ++iy) {
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const double phase = -chirp * (f2[ix] + f2[iy]);
      h_[iy * g.n + ix] = cdouble(std::cos(phase), std::sin(phase));
    }
  }
}

void FresnelKernel::apply_spectrum(cdouble* spec) const {
  const std::size_t m = grid_.size();
  for (std::size_t i = 0; i < m; ++i) spec[i] *= h_[i];
}

void FresnelKernel::debug_flip_chirp() {
  for (cdouble& z : h_) z = std::conj(z);
}

void fresnel_propagate(ComplexField& u, const FresnelKernel& kernel) {
  if (!(u.grid == kernel.grid())) {
    throw std::invalid_argument("fresnel_propagate: field/kernel grid mismatch");
  }
  if (kernel.distance() == 0.0) return;
  FftEngine& fft = FftEngine::for_grid(u.grid.n);
  fft.forward(u.v.data());
  kernel.apply_spectrum(u.v.data());
  fft.inverse(u.v.data());
}

void fresnel_propagate(ComplexField& u, double distance, double wavelength) {
  const FresnelKernel kernel(u.grid, distance, wavelength);
  fresnel_propagate(u, kernel);
}

void apply_phase_screen(ComplexField& u, const PhaseScreen& s) {
  if (!(u.grid == s.grid)) {
    throw std::invalid_argument("apply_phase_screen: field/screen grid mismatch");
  }
  const std::size_t m = u.v.size();
#pragma omp parallel for if (m >= (1u << 16) && !omp_in_parallel())
  for (std::size_t i = 0; i < m; ++i) {
    const double p = s.phase[i];
    u.v[i] *= cdouble(std::cos(p), std::sin(p));
  }
}

double apply_absorber(ComplexField& u, const AbsorberWindow& window) {
  if (!(u.grid == window.grid)) {
    throw std::invalid_argument("apply_absorber: field/window grid mismatch");
  }
  double removed = 0.0;
  const std::size_t m = u.v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double wi = window.w[i];
    removed += std::norm(u.v[i]) * (1.0 - wi * wi);
    u.v[i] *= wi;
  }
  return removed * u.grid.spacing * u.grid.spacing;
}

PathAccounting propagate_path(ComplexField& u,
                              const std::vector<PhaseScreen>& screens,
                              const FresnelKernel& kernel,
                              const AbsorberWindow* window) {
  PathAccounting acc;
  for (const PhaseScreen& s : screens) {
    apply_phase_screen(u, s);
    fresnel_propagate(u, kernel);
    if (window) acc.absorbed += apply_absorber(u, *window);
  }
  return acc;
}

}  // namespace turbmimo
