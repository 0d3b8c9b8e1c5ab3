#include "turbmimo/logical_channel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "turbmimo/rng.hpp"

namespace turbmimo {

RailBlock rail_block(std::complex<double> t_mm, double erasure,
                     const Eigen::Matrix2cd* jones) {
  if (erasure < 0.0 || erasure > 1.0) {
    throw std::invalid_argument("rail_block: erasure must be in [0, 1]");
  }
  Eigen::Matrix2cd j = jones ? *jones : Eigen::Matrix2cd::Identity();
  const double jw = std::real((j.adjoint() * j).trace()) / 2.0;
  if (!(jw > 0.0)) throw std::invalid_argument("rail_block: jones matrix is singular-zero");

  RailBlock block;
  block.erasure = erasure;
  // survival weight comes from the kept mass; t_mm only contributes its phase
  // (a zero diagonal entry leaves the phase convention at 0)
  const double phase = (std::abs(t_mm) > 0.0) ? std::arg(t_mm) : 0.0;
  const std::complex<double> u = std::polar(std::sqrt((1.0 - erasure) / jw), phase);
  block.b = u * j;
  return block;
}

RailKraus rail_kraus(const RailBlock& block) {
  const Eigen::Matrix2cd gram = block.b.adjoint() * block.b;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram);
  Eigen::Vector2d ev = es.eigenvalues();
  for (int i = 0; i < 2; ++i) {
    if (ev[i] > 1.0 + 1e-9) {
      throw std::invalid_argument("rail_kraus: block overshoots unit survival");
    }
    ev[i] = std::min(1.0, std::max(0.0, ev[i]));
  }
  Eigen::Vector2d cv;
  for (int i = 0; i < 2; ++i) cv[i] = std::sqrt(1.0 - ev[i]);
  const Eigen::Matrix2cd c =
      es.eigenvectors() * cv.asDiagonal() * es.eigenvectors().adjoint();

  RailKraus kr;
  for (auto& k : kr.k) k.setZero();
  kr.k[0].topLeftCorner<2, 2>() = block.b;
  kr.k[1].row(2) = c.row(0);  // leak row 0 of sqrt(I - B^dag B) into the flag
  kr.k[2].row(2) = c.row(1);
  return kr;
}

namespace {

int pow_int(int base, std::size_t e) {
  int r = 1;
  while (e--) r *= base;
  return r;
}

}  // namespace

Eigen::MatrixXcd apply_product_channel(const Eigen::MatrixXcd& rho_logical,
                                       const std::vector<RailKraus>& rails) {
  const std::size_t n = rails.size();
  if (n == 0 || n > 3) {
    throw std::invalid_argument("apply_product_channel: 1..3 rails supported");
  }
  const int dim2 = pow_int(2, n);
  const int dim3 = pow_int(3, n);
  if (rho_logical.rows() != dim2 || rho_logical.cols() != dim2) {
    throw std::invalid_argument("apply_product_channel: state dimension must be 2^n");
  }

  // digit m of an index, rail 0 = most significant factor
  auto digit = [n](int idx, std::size_t m, int base) {
    int d = idx;
    for (std::size_t t = n - 1; t > m; --t) d /= base;
    return d % base;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim3, dim3);
  Eigen::MatrixXcd kron(dim3, dim2);
  const int tuples = pow_int(3, n);
  for (int alpha = 0; alpha < tuples; ++alpha) {
    for (int row = 0; row < dim3; ++row) {
      for (int col = 0; col < dim2; ++col) {
        std::complex<double> v = 1.0;
        for (std::size_t m = 0; m < n && v != 0.0; ++m) {
          const int which = digit(alpha, m, 3);
          v *= rails[m].k[static_cast<std::size_t>(which)](digit(row, m, 3),
                                                           digit(col, m, 2));
        }
        kron(row, col) = v;
      }
    }
    out.noalias() += kron * rho_logical * kron.adjoint();
  }
  return out;
}

double flag_pattern_population(const Eigen::MatrixXcd& rho3, unsigned pattern,
                               std::size_t n_rails) {
  const int dim3 = pow_int(3, n_rails);
  if (rho3.rows() != dim3 || rho3.cols() != dim3) {
    throw std::invalid_argument("flag_pattern_population: state dimension must be 3^n");
  }
  if (pattern >= (1u << n_rails)) {
    throw std::invalid_argument("flag_pattern_population: pattern out of range");
  }
  double pop = 0.0;
  for (int idx = 0; idx < dim3; ++idx) {
    int d = idx;
    bool match = true;
    for (std::size_t m = n_rails; m-- > 0;) {  // digit of least significant rail first
      const int dm = d % 3;
      d /= 3;
      const bool flagged = (pattern >> (n_rails - 1 - m)) & 1u;
      if (flagged != (dm == 2)) {
        match = false;
        break;
      }
    }
    if (match) pop += std::real(rho3(idx, idx));
  }
  return pop;
}

PatternLaw erasure_pattern_law(const std::vector<Eigen::VectorXd>& eps_ensemble) {
  if (eps_ensemble.empty()) throw std::invalid_argument("erasure_pattern_law: empty ensemble");
  const std::size_t n = static_cast<std::size_t>(eps_ensemble.front().size());
  if (n == 0 || n > 16) throw std::invalid_argument("erasure_pattern_law: bad rail count");

  PatternLaw law;
  law.n_rails = n;
  law.p.assign(1u << n, 0.0);
  for (const Eigen::VectorXd& eps : eps_ensemble) {
    if (static_cast<std::size_t>(eps.size()) != n) {
      throw std::invalid_argument("erasure_pattern_law: inconsistent rail count");
    }
    for (std::size_t s = 0; s < law.p.size(); ++s) {
      double w = 1.0;
      for (std::size_t m = 0; m < n; ++m) {
        const bool erased = (s >> (n - 1 - m)) & 1u;
        w *= erased ? eps[static_cast<Eigen::Index>(m)]
                    : 1.0 - eps[static_cast<Eigen::Index>(m)];
      }
      law.p[s] += w;
    }
  }
  const double inv = 1.0 / static_cast<double>(eps_ensemble.size());
  for (double& v : law.p) v *= inv;
  return law;
}

double block_success(const PatternLaw& law) {
  if (law.p.empty()) throw std::invalid_argument("block_success: empty law");
  return law.p[0];
}

namespace {

struct MomentSums {
  Eigen::VectorXd s1;
  Eigen::MatrixXd s2;
  std::size_t count = 0;
};

MomentSums moment_sums(const std::vector<Eigen::VectorXd>& ens) {
  const Eigen::Index n = ens.front().size();
  MomentSums ms;
  ms.s1 = Eigen::VectorXd::Zero(n);
  ms.s2 = Eigen::MatrixXd::Zero(n, n);
  for (const Eigen::VectorXd& e : ens) {
    ms.s1 += e;
    ms.s2 += e * e.transpose();
  }
  ms.count = ens.size();
  return ms;
}

// correlations from (possibly jackknifed) moment sums
void fill_correlations(const Eigen::VectorXd& s1, const Eigen::MatrixXd& s2, double n_eff,
                       const std::vector<bool>& saturated, Eigen::MatrixXd* indicator,
                       Eigen::MatrixXd* propensity, double* ind_mean, double* prop_mean) {
  const Eigen::Index n = s1.size();
  const Eigen::VectorXd mean = s1 / n_eff;
  Eigen::MatrixXd cov = s2 / n_eff - mean * mean.transpose();
  const double qnan = std::nan("");

  if (indicator) indicator->setConstant(n, n, qnan);
  if (propensity) propensity->setConstant(n, n, qnan);
  double si = 0.0, sp = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    if (saturated[ii]) continue;
    if (indicator) (*indicator)(i, i) = 1.0;
    if (propensity) (*propensity)(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t jj = static_cast<std::size_t>(j);
      if (i == j || saturated[jj]) continue;
      const double vi_ind = mean[i] * (1.0 - mean[i]);
      const double vj_ind = mean[j] * (1.0 - mean[j]);
      const double ind = cov(i, j) / std::sqrt(vi_ind * vj_ind);
      const double prop = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
      if (indicator) (*indicator)(i, j) = ind;
      if (propensity) (*propensity)(i, j) = prop;
      si += ind;
      sp += prop;
      ++pairs;
    }
  }
  if (ind_mean) *ind_mean = pairs ? si / static_cast<double>(pairs) : qnan;
  if (prop_mean) *prop_mean = pairs ? sp / static_cast<double>(pairs) : qnan;
}

}  // namespace

CorrelationSummary erasure_correlation(const std::vector<Eigen::VectorXd>& eps_ensemble,
                                       double var_floor) {
  if (eps_ensemble.size() < 2) {
    throw std::invalid_argument("erasure_correlation: need at least two realizations");
  }
  const Eigen::Index n = eps_ensemble.front().size();
  for (const Eigen::VectorXd& e : eps_ensemble) {
    if (e.size() != n) throw std::invalid_argument("erasure_correlation: ragged ensemble");
  }
  const MomentSums ms = moment_sums(eps_ensemble);
  const double cnt = static_cast<double>(ms.count);

  CorrelationSummary sum;
  sum.saturated.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double mean = ms.s1[m] / cnt;
    const double var = ms.s2(m, m) / cnt - mean * mean;
    sum.saturated[static_cast<std::size_t>(m)] = var < var_floor;
  }

  fill_correlations(ms.s1, ms.s2, cnt, sum.saturated, &sum.indicator, &sum.propensity,
                    &sum.indicator_offdiag_mean, &sum.propensity_offdiag_mean);

  // delete-one jackknife on the off-diagonal means (saturation set held fixed)
  const std::size_t cnt_i = ms.count;
  if (cnt_i >= 3 && !std::isnan(sum.indicator_offdiag_mean)) {
    double mi = 0.0, mp = 0.0, qi = 0.0, qp = 0.0;
    for (const Eigen::VectorXd& e : eps_ensemble) {
      const Eigen::VectorXd s1 = ms.s1 - e;
      const Eigen::MatrixXd s2 = ms.s2 - e * e.transpose();
      double ti = 0.0, tp = 0.0;
      fill_correlations(s1, s2, cnt - 1.0, sum.saturated, nullptr, nullptr, &ti, &tp);
      mi += ti;
      mp += tp;
      qi += ti * ti;
      qp += tp * tp;
    }
    const double k = static_cast<double>(cnt_i);
    sum.indicator_offdiag_se = std::sqrt(std::max(0.0, (k - 1.0) / k * (qi - mi * mi / k)));
    sum.propensity_offdiag_se = std::sqrt(std::max(0.0, (k - 1.0) / k * (qp - mp * mp / k)));
  }
  return sum;
}

Eigen::MatrixXd sampled_indicator_correlation(const std::vector<Eigen::VectorXd>& eps_ensemble,
                                              std::uint64_t seed, std::size_t n_draws) {
  if (eps_ensemble.empty()) {
    throw std::invalid_argument("sampled_indicator_correlation: empty ensemble");
  }
  const Eigen::Index n = eps_ensemble.front().size();
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
  const std::uint64_t key = mix64(seed ^ 0x6265726eULL);
  Eigen::VectorXd draw(n);
  for (std::size_t d = 0; d < n_draws; ++d) {
    const Eigen::VectorXd& eps = eps_ensemble[d % eps_ensemble.size()];
    for (Eigen::Index m = 0; m < n; ++m) {
      const auto bits = philox::block(key, d, static_cast<std::uint64_t>(m));
      draw[m] = (to_unit(bits.first) < eps[m]) ? 1.0 : 0.0;
    }
    s1 += draw;
    s2 += draw * draw.transpose();
  }
  const double cnt = static_cast<double>(n_draws);
  const Eigen::VectorXd mean = s1 / cnt;
  const Eigen::MatrixXd cov = s2 / cnt - mean * mean.transpose();
  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      corr(i, j) = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    }
  }
  return corr;
}

FidelityResult polarization_fidelity(const RailBlock& block) {
  using Vec2 = Eigen::Vector2cd;
  const std::complex<double> im(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const std::array<Vec2, 6> states = {
      Vec2(1.0, 0.0),
      Vec2(0.0, 1.0),
      Vec2(inv_sqrt2, inv_sqrt2),
      Vec2(inv_sqrt2, -inv_sqrt2),
      Vec2(inv_sqrt2, im * inv_sqrt2),
      Vec2(inv_sqrt2, -im * inv_sqrt2),
  };

  FidelityResult res;
  const double weight = std::real((block.b.adjoint() * block.b).trace());
  double cond = 0.0;
  for (const Vec2& psi : states) {
    if (weight < 1e-300) {
      // fully erased rail: the flag carries the failure, the (vacuous)
      // surviving branch is counted as faithful
      cond += 1.0;
      continue;
    }
    const Vec2 phi = block.b * psi;
    const double p = phi.squaredNorm();
    cond += (p > 0.0) ? std::norm(psi.dot(phi)) / p : 1.0;
  }
  res.conditional = cond / 6.0;
  res.unconditional = (1.0 - block.erasure) * res.conditional;
  return res;
}

}  // namespace turbmimo
