#pragma once

#include <cstdint>
#include <vector>

#include "turbmimo/propagation.hpp"
#include "turbmimo/rng.hpp"

namespace turbmimo {

// Von Karman refractive-index spectrum and the screen model derived from it.
//
// Conventions: kappa is angular spatial frequency (rad/m).  The index
// spectrum is
//   Phi_n(kappa) = 0.033 Cn2 (kappa^2 + k0^2)^(-11/6) exp(-kappa^2 / km^2),
//   k0 = 2 pi / L0,  km = 5.92 / l0,
// and a slab of thickness dz collapses to a phase screen with 2-D spectrum
//   Phi_phi(kappa) = 2 pi k_opt^2 dz Phi_n(kappa)
// under the B(rho) = Int d2kappa Phi(kappa) exp(i kappa rho) transform pair.

struct TurbulenceParams {
  double cn2 = 0.0;          // structure constant, m^(-2/3); 0 = vacuum
  double outer_scale = 30.0; // L0, m
  double inner_scale = 5e-3; // l0, m
  double wavelength = 1.55e-6;
  double path_length = 1e4;
  std::size_t n_slabs = 40;
  double rho_z = 0.9;        // AR(1) coefficient between consecutive screens

  double slab_length() const { return path_length / static_cast<double>(n_slabs); }
  void validate() const;  // throws std::invalid_argument
};

double vonkarman_psd(double kappa, double cn2, double outer_scale, double inner_scale);

// Plane-wave Fried parameter over the full path: (0.423 k^2 Cn2 L)^(-3/5).
// Returns +inf for vacuum.
double fried_parameter(const TurbulenceParams& p);

// Plane-wave Rytov variance 1.23 Cn2 k^(7/6) L^(11/6).
double rytov_variance(const TurbulenceParams& p);

// FFT spectral synthesis of a longitudinally correlated screen stack.
//
// Per slab, iid complex Gaussian coefficients are shaped by
// sqrt(Phi_phi dkappa^2) and inverse-transformed; the real part is the
// screen.  Longitudinal correlation is an AR(1) recursion on the white
// coefficients (g_{k+1} = rho g_k + sqrt(1-rho^2) xi), which preserves the
// marginal statistics of every screen exactly.  The DC coefficient is zeroed
// (piston carries no physics).
//
// The lowest grid frequency (1/extent) is far above 1/L0 here, so plain FFT
// synthesis misses most large-scale power.  Missing cells are filled by
// subharmonic levels: level p adds the 3x3 subdivision of the previous
// level's empty central cell, evaluated as explicit plane waves.  Levels
// follow the same AR(1) recursion.
class ScreenSynthesizer {
 public:
  ScreenSynthesizer(const Grid& g, const TurbulenceParams& p, int subharmonic_levels);

  // Deterministic: the stack is a pure function of the key.
  std::vector<PhaseScreen> make_stack(const StreamKey& key) const;

  const Grid& grid() const { return grid_; }
  const TurbulenceParams& params() const { return params_; }
  int levels() const { return levels_; }

 private:
  struct Subharmonic {
    double scale;              // coefficient std
    std::vector<cdouble> ex;   // exp(i kx x) along the x axis
    std::vector<cdouble> ey;   // exp(i ky y) along the y axis
  };

  Grid grid_;
  TurbulenceParams params_;
  int levels_;
  std::vector<double> scale_;        // n^2 FFT-cell coefficient std (raw-IDFT convention)
  std::vector<Subharmonic> subs_;
};

// Independent 1-D quadrature of the single-screen phase structure function,
//   D_phi(r) = 8 pi^2 k_opt^2 dz Int kappa Phi_n(kappa) (1 - J0(kappa r)) dkappa.
// Used as the oracle the synthesized ensemble is checked against.
double screen_structure_function(double r, const TurbulenceParams& p);

}  // namespace turbmimo
