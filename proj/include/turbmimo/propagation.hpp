#pragma once

#include <vector>

#include "turbmimo/field.hpp"

namespace turbmimo {

// Raised-cosine boundary absorber.  The window is 1 on the interior and
// tapers smoothly to 0 over the outer guard_fraction of each half-axis;
// it is separable in x and y.  guard_fraction 0 gives the identity window.
struct AbsorberWindow {
  Grid grid;
  double guard_fraction = 0.0;
  std::vector<double> w;

  AbsorberWindow() = default;
  AbsorberWindow(const Grid& g, double guard);
};

struct PhaseScreen {
  Grid grid;
  std::vector<double> phase;  // radians

  PhaseScreen() = default;
  explicit PhaseScreen(const Grid& g) : grid(g), phase(g.size()) {}
};

// Cached angular-spectrum transfer function for one (grid, distance,
// wavelength): H(f) = exp(-i pi lambda d |f|^2) acting on the slowly varying
// envelope (the e^{i k0 d} carrier is dropped; it is a global phase and over
// km paths it exceeds double precision).  |H| = 1, so the step is exactly
// unitary on the periodic grid.  Building the table costs one trig pass;
// reuse it across slabs and realizations.
class FresnelKernel {
 public:
  FresnelKernel(const Grid& g, double distance, double wavelength);

  const Grid& grid() const { return grid_; }
  double distance() const { return distance_; }
  double wavelength() const { return wavelength_; }

  // Pointwise multiply of an FFT-ordered spectrum by H.
  void apply_spectrum(cdouble* spec) const;

  // debug hook: flips the sign of the quadratic spectral phase, turning the
  // step into its time-reversed counterpart.  Only fault-injection paths use
  // this; see run_validation().
  void debug_flip_chirp();

 private:
  Grid grid_;
  double distance_;
  double wavelength_;
  std::vector<cdouble> h_;
};

// One angular-spectrum step: FFT, multiply by the kernel, inverse FFT.
// distance 0 is the exact identity (no transforms).  Negative distance throws.
void fresnel_propagate(ComplexField& u, double distance, double wavelength);
void fresnel_propagate(ComplexField& u, const FresnelKernel& kernel);

// u <- exp(i phase) u, pointwise.  Grid mismatch throws.
void apply_phase_screen(ComplexField& u, const PhaseScreen& s);

// u <- w u; returns the power removed by the window.
double apply_absorber(ComplexField& u, const AbsorberWindow& window);

struct PathAccounting {
  double absorbed = 0.0;  // total power removed by the boundary window
};

// Split-step pass through a stack of screens.  Screen k sits at the entrance
// of slab k (the first at z = 0); each slab is screen -> step -> absorber.
// window may be null (no absorption).  kernel.distance() is the slab length.
PathAccounting propagate_path(ComplexField& u,
                              const std::vector<PhaseScreen>& screens,
                              const FresnelKernel& kernel,
                              const AbsorberWindow* window);

}  // namespace turbmimo
