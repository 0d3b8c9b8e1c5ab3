#pragma once

#include <Eigen/Dense>
#include <vector>

#include "turbmimo/modes.hpp"
#include "turbmimo/propagation.hpp"

namespace turbmimo {

// One turbulent channel realization reduced to the kept-mode subspace:
// t(r, m) = <receive_r, U transmit_m>.  The matrix is subunitary; whatever
// power is missing from a column leaked into unobserved modes (scatter plus
// boundary absorption) and is treated as erasure.
struct RealizationResult {
  Eigen::MatrixXcd t;
  Eigen::VectorXd erasure;       // per transmit rail, clamped to [0, 1]
  double absorbed_total = 0.0;   // summed over rails
};

// Per-rail erasure from the crosstalk matrix: eps_m = 1 - sum_r |t_rm|^2.
Eigen::VectorXd erasure_vector(const Eigen::MatrixXcd& t);

RealizationResult propagate_realization(const Banks& banks,
                                        const std::vector<PhaseScreen>& screens,
                                        const FresnelKernel& kernel,
                                        const AbsorberWindow* window);

// Vacuum bases at every slab boundary (n_slabs + 1 planes).
std::vector<ModeBank> plane_banks(const Grid& g, double waist,
                                  const std::vector<int>& ells,
                                  std::size_t n_slabs, double slab_length,
                                  double wavelength);

// Single-slab crosstalk factors: factor k maps the plane-k vacuum basis
// through (screen k, one step, absorber) onto the plane-(k+1) basis.
std::vector<Eigen::MatrixXcd> slabwise_factors(const std::vector<ModeBank>& planes,
                                               const std::vector<PhaseScreen>& screens,
                                               const FresnelKernel& kernel,
                                               const AbsorberWindow* window);

// || factors_{K-1} ... factors_0  -  full ||_F : how much the slab-factorized
// channel misses inter-slab coupling through non-kept modes.
double composition_deviation(const std::vector<Eigen::MatrixXcd>& factors,
                             const Eigen::MatrixXcd& full);

}  // namespace turbmimo
