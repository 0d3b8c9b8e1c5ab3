#pragma once

#include <cstddef>
#include <vector>

#include "turbmimo/field.hpp"

namespace turbmimo {

// Laguerre-Gauss p = 0 mode with azimuthal index ell, sampled at the waist
// and renormalized to unit discrete power.  |ell| <= 6.
ComplexField lg_field(const Grid& g, double waist, int ell);

// OAM index sets used for n = 2..5 rails.
std::vector<int> mode_set(std::size_t n_modes);

struct ModeBank {
  std::vector<int> ells;
  std::vector<ComplexField> fields;

  std::size_t size() const { return fields.size(); }
};

// In-place modified Gram-Schmidt in bank order, renormalizing each mode.
void gram_schmidt(ModeBank& bank);

// Transmit bank: LG modes at the waist.  Receive bank: the same modes
// propagated through vacuum (no screens, no absorber) to the receiver plane
// and re-orthonormalized, i.e. matched filters for what the grid itself does
// to each mode in the absence of turbulence.
struct Banks {
  ModeBank transmit;
  ModeBank receive;
};

Banks build_banks(const Grid& g, double waist, std::size_t n_modes,
                  double distance, double wavelength);

// Vacuum-propagated orthonormal basis at an intermediate plane; plane 0 is
// the transmit bank itself.
ModeBank vacuum_bank(const Grid& g, double waist, const std::vector<int>& ells,
                     double distance, double wavelength);

}  // namespace turbmimo
