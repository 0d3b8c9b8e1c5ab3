#pragma once

#include <Eigen/Dense>

namespace turbmimo {

// Permanent via Ryser's formula with Gray-code subset updates, O(2^n n).
// Square matrices only, n <= 12.
std::complex<double> permanent(const Eigen::MatrixXcd& a);

// Embeds a subunitary n x n matrix t (singular values <= 1 + 1e-8) as the
// upper-left block of a 2n x 2n unitary:
//   D = [ t            U sqrt(I - S^2) ]
//       [ sqrt(I-S^2) V*   -S          ]   with t = U S V*.
// Ports 0..n-1 are the kept modes, n..2n-1 the bath.
Eigen::MatrixXcd unitary_dilation(const Eigen::MatrixXcd& t);

// n-photon outcome statistics for one photon injected per kept input port.
//
//   p_all_kept            all n photons exit in kept ports
//   p_collision_given_kept  some kept port holds >= 2, given all kept
//   p_collision           some kept port holds >= 2 (no conditioning; lost
//                         photons allowed), the quantity erasure suppresses
//                         at strong turbulence
struct OutcomeStats {
  double p_all_kept = 0.0;
  double p_collision_given_kept = 0.0;
  double p_collision = 0.0;
  bool conditional_defined = true;  // false when p_all_kept underflows
};

// Indistinguishable photons: boson-sampling probabilities over output
// multisets of the dilation, P(mu) = |perm(D[mu; inputs])|^2 / prod mu_j!.
// Reduced kept-port statistics are dilation-independent.
OutcomeStats indistinguishable_stats(const Eigen::MatrixXcd& t);

// Distinguishable photons: each lands independently with per-port
// probabilities |t_rm|^2 (bath with probability eps_m); exact enumeration.
OutcomeStats distinguishable_stats(const Eigen::MatrixXcd& t);

}  // namespace turbmimo
