#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace turbmimo {

// Erasure-flagged polarization channel built on top of the spatial layer.
// Each rail m keeps a qubit (polarization) whose survival amplitude comes
// from the rail's own crosstalk entry; everything that leaks elsewhere is an
// erasure, not a logical error.  Per rail the state space is
// {|H>, |V>, |flag>} = C^3; basis index 2 is the erasure flag.

struct RailBlock {
  Eigen::Matrix2cd b;      // surviving polarization block, tr(B^dag B)/2 = 1 - erasure
  double erasure = 0.0;
};

// B = t_mm * jones, rescaled so tr(B^dag B)/2 = 1 - erasure (survival weight
// is set by the full kept mass, not by |t_mm|^2 alone: landing in the wrong
// kept port is crosstalk, not erasure).  jones == nullptr means identity.
// If t_mm = 0 the phase convention falls back to 0.
RailBlock rail_block(std::complex<double> t_mm, double erasure,
                     const Eigen::Matrix2cd* jones);

// Kraus triple of the single-rail channel on C^2 -> C^3:
//   K0 = [B; 0]   (survive),
//   K1, K2 route the rows of C = sqrt(I - B^dag B) into the flag row.
// K0^dag K0 + K1^dag K1 + K2^dag K2 = I_2 exactly (up to rounding).
struct RailKraus {
  std::array<Eigen::Matrix<std::complex<double>, 3, 2>, 3> k;
};

RailKraus rail_kraus(const RailBlock& block);

// Product channel on n rails (n <= 3): rho_logical lives on (C^2)^n, the
// output on (C^3)^n with rail-local embedding {0,1} -> {0,1}, flag = 2.
Eigen::MatrixXcd apply_product_channel(const Eigen::MatrixXcd& rho_logical,
                                       const std::vector<RailKraus>& rails);

// Population of one flag pattern (bit m set = rail m erased) in a (C^3)^n
// state: trace over the matching block.
double flag_pattern_population(const Eigen::MatrixXcd& rho3, unsigned pattern,
                               std::size_t n_rails);

// Ensemble-averaged erasure pattern law  p(s) = < prod_m eps^s (1-eps)^(1-s) >.
// Index is the bitmask of s.
struct PatternLaw {
  std::size_t n_rails = 0;
  std::vector<double> p;
};

PatternLaw erasure_pattern_law(const std::vector<Eigen::VectorXd>& eps_ensemble);

// Success = no rail erased = p(0...0).
double block_success(const PatternLaw& law);

// Pairwise dependence of the erasure process across rails, from the ensemble
// of erasure-probability vectors.
//
// indicator(i,j):  Corr of the Bernoulli erasure outcomes L_m ~ Bern(eps_m);
//                  Cov(L_i, L_j) = Cov(eps_i, eps_j) for i != j,
//                  Var(L_m) = E[eps](1 - E[eps]).
// propensity(i,j): plain Corr(eps_i, eps_j) of the probabilities themselves,
//                  the natural measure of shared-medium dependence once loss
//                  saturates.
// A rail whose eps variance falls below var_floor is flagged saturated and
// its correlation entries are NaN.
struct CorrelationSummary {
  Eigen::MatrixXd indicator;
  Eigen::MatrixXd propensity;
  std::vector<bool> saturated;
  double indicator_offdiag_mean = 0.0;   // over unsaturated pairs; NaN if none
  double propensity_offdiag_mean = 0.0;
  double indicator_offdiag_se = 0.0;     // delete-one jackknife
  double propensity_offdiag_se = 0.0;
};

CorrelationSummary erasure_correlation(const std::vector<Eigen::VectorXd>& eps_ensemble,
                                       double var_floor = 1e-6);

// Monte Carlo cross-check: draws Bernoulli indicators from the ensemble and
// estimates the indicator correlation by sampling.
Eigen::MatrixXd sampled_indicator_correlation(const std::vector<Eigen::VectorXd>& eps_ensemble,
                                              std::uint64_t seed, std::size_t n_draws);

// Mean fidelity over the six cardinal polarization states.
//   conditional:   F(psi, B psi / |B psi|) averaged over the six states
//   unconditional: (1 - erasure) * conditional
struct FidelityResult {
  double conditional = 0.0;
  double unconditional = 0.0;
};

FidelityResult polarization_fidelity(const RailBlock& block);

}  // namespace turbmimo
