#include "turbmimo/photon_stats.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace turbmimo {

std::complex<double> permanent(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("permanent: matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n > 12) throw std::invalid_argument("permanent: size capped at 12");
  if (n == 0) return 1.0;

  // Ryser over column subsets, Gray-coded so each step touches one column.
  std::vector<std::complex<double>> sums(n, 0.0);
  std::complex<double> total = 0.0;
  std::uint64_t prev_gray = 0;
  const std::uint64_t end = 1ull << n;
  for (std::uint64_t g = 1; g < end; ++g) {
    const std::uint64_t gray = g ^ (g >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const int j = std::countr_zero(diff);
    const double sgn = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) sums[i] += sgn * a(i, j);
    prev_gray = gray;

    std::complex<double> prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= sums[i];
    const int popc = std::popcount(gray);
    total += (((n - popc) % 2) == 0) ? prod : -prod;
  }
  return total;
}

Eigen::MatrixXcd unitary_dilation(const Eigen::MatrixXcd& t) {
  if (t.rows() != t.cols()) throw std::invalid_argument("unitary_dilation: matrix must be square");
  const Eigen::Index n = t.rows();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s[i] > 1.0 + 1e-8) {
      throw std::invalid_argument("unitary_dilation: singular value exceeds 1");
    }
  }
  Eigen::VectorXd sc = s.cwiseMin(1.0);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = std::sqrt(1.0 - sc[i] * sc[i]);

  Eigen::MatrixXcd d(2 * n, 2 * n);
  d.topLeftCorner(n, n) = t;
  d.topRightCorner(n, n) = svd.matrixU() * c.asDiagonal();
  d.bottomLeftCorner(n, n) = c.asDiagonal() * svd.matrixV().adjoint();
  d.bottomRightCorner(n, n) = (-sc).cast<std::complex<double>>().asDiagonal();
  return d;
}

namespace {

struct MultisetScan {
  double total = 0.0;
  double p_all_kept = 0.0;
  double p_coll_and_kept = 0.0;
  double p_coll_any = 0.0;
};

// Probability of one output pattern: |perm(D[mu rows; input cols])|^2 / prod mu!
void score_pattern(const Eigen::MatrixXcd& d, Eigen::Index n, const std::vector<int>& mu,
                   MultisetScan& out) {
  Eigen::MatrixXcd b(n, n);
  Eigen::Index row = 0;
  double mu_fact = 1.0;
  bool kept_only = true;
  bool collision_kept = false;
  for (Eigen::Index q = 0; q < d.rows(); ++q) {
    const int cnt = mu[static_cast<std::size_t>(q)];
    if (cnt == 0) continue;
    if (q >= n) kept_only = false;
    if (q < n && cnt >= 2) collision_kept = true;
    for (int rep = 1; rep <= cnt; ++rep) {
      b.row(row++) = d.row(q).head(n);
      mu_fact *= rep;
    }
  }
  const double p = std::norm(permanent(b)) / mu_fact;
  out.total += p;
  if (kept_only) {
    out.p_all_kept += p;
    if (collision_kept) out.p_coll_and_kept += p;
  }
  if (collision_kept) out.p_coll_any += p;
}

// Walks every photon-count multiset over the 2n dilation ports.
void scan_multisets(const Eigen::MatrixXcd& d, Eigen::Index n, std::vector<int>& mu,
                    Eigen::Index port, int remaining, MultisetScan& out) {
  if (port == d.rows() - 1) {
    mu[static_cast<std::size_t>(port)] = remaining;
    score_pattern(d, n, mu, out);
    mu[static_cast<std::size_t>(port)] = 0;
    return;
  }
  for (int take = 0; take <= remaining; ++take) {
    mu[static_cast<std::size_t>(port)] = take;
    scan_multisets(d, n, mu, port + 1, remaining - take, out);
  }
  mu[static_cast<std::size_t>(port)] = 0;
}

}  // namespace

OutcomeStats indistinguishable_stats(const Eigen::MatrixXcd& t) {
  const Eigen::Index n = t.rows();
  if (n == 0) throw std::invalid_argument("indistinguishable_stats: empty matrix");
  const Eigen::MatrixXcd d = unitary_dilation(t);

  MultisetScan scan;
  std::vector<int> mu(static_cast<std::size_t>(2 * n), 0);
  scan_multisets(d, n, mu, 0, static_cast<int>(n), scan);

  OutcomeStats stats;
  stats.p_all_kept = scan.p_all_kept;
  stats.p_collision = scan.p_coll_any;
  if (scan.p_all_kept > 1e-15) {
    stats.p_collision_given_kept = scan.p_coll_and_kept / scan.p_all_kept;
  } else {
    stats.conditional_defined = false;
    stats.p_collision_given_kept = std::nan("");
  }
  return stats;
}

OutcomeStats distinguishable_stats(const Eigen::MatrixXcd& t) {
  const Eigen::Index n = t.rows();
  if (n == 0) throw std::invalid_argument("distinguishable_stats: empty matrix");
  if (t.rows() != t.cols()) throw std::invalid_argument("distinguishable_stats: square matrix");

  Eigen::MatrixXd prob = t.cwiseAbs2();
  Eigen::VectorXd eps(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    eps[m] = std::max(0.0, 1.0 - prob.col(m).sum());
  }

  // exact enumeration over per-photon destinations; port n = aggregated bath
  // (bath multiplicities never count as collisions)
  double p_coll_and_kept = 0.0;
  double p_coll_any = 0.0;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);

  auto walk = [&](auto&& self, Eigen::Index photon, double weight, bool all_kept,
                  bool collision) -> void {
    if (weight == 0.0) return;
    if (photon == n) {
      if (collision) {
        p_coll_any += weight;
        if (all_kept) p_coll_and_kept += weight;
      }
      return;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::size_t ri = static_cast<std::size_t>(r);
      ++counts[ri];
      self(self, photon + 1, weight * prob(r, photon), all_kept,
           collision || counts[ri] >= 2);
      --counts[ri];
    }
    self(self, photon + 1, weight * eps[photon], false, collision);
  };
  walk(walk, 0, 1.0, true, false);

  OutcomeStats stats;
  double p_all = 1.0;
  for (Eigen::Index m = 0; m < n; ++m) p_all *= 1.0 - eps[m];
  stats.p_all_kept = p_all;
  stats.p_collision = p_coll_any;
  if (p_all > 1e-15) {
    stats.p_collision_given_kept = p_coll_and_kept / p_all;
  } else {
    stats.conditional_defined = false;
    stats.p_collision_given_kept = std::nan("");
  }
  return stats;
}

}  // namespace turbmimo
