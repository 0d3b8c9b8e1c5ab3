#include "turbmimo/crosstalk.hpp"

#include <stdexcept>

namespace turbmimo {

Eigen::VectorXd erasure_vector(const Eigen::MatrixXcd& t) {
  Eigen::VectorXd eps(t.cols());
  for (Eigen::Index m = 0; m < t.cols(); ++m) {
    const double kept = t.col(m).squaredNorm();
    eps[m] = std::min(1.0, std::max(0.0, 1.0 - kept));
  }
  return eps;
}

RealizationResult propagate_realization(const Banks& banks,
                                        const std::vector<PhaseScreen>& screens,
                                        const FresnelKernel& kernel,
                                        const AbsorberWindow* window) {
  const std::size_t n = banks.transmit.size();
  if (n == 0 || banks.receive.size() != n) {
    throw std::invalid_argument("propagate_realization: inconsistent banks");
  }
  RealizationResult res;
  res.t.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    ComplexField u = banks.transmit.fields[m];
    const PathAccounting acc = propagate_path(u, screens, kernel, window);
    res.absorbed_total += acc.absorbed;
    for (std::size_t r = 0; r < n; ++r) {
      res.t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
          overlap(banks.receive.fields[r], u);
    }
  }
  res.erasure = erasure_vector(res.t);
  return res;
}

std::vector<ModeBank> plane_banks(const Grid& g, double waist,
                                  const std::vector<int>& ells,
                                  std::size_t n_slabs, double slab_length,
                                  double wavelength) {
  std::vector<ModeBank> planes;
  planes.reserve(n_slabs + 1);
  for (std::size_t k = 0; k <= n_slabs; ++k) {
    planes.push_back(vacuum_bank(g, waist, ells,
                                 slab_length * static_cast<double>(k), wavelength));
  }
  return planes;
}

std::vector<Eigen::MatrixXcd> slabwise_factors(const std::vector<ModeBank>& planes,
                                               const std::vector<PhaseScreen>& screens,
                                               const FresnelKernel& kernel,
                                               const AbsorberWindow* window) {
  if (planes.size() != screens.size() + 1) {
    throw std::invalid_argument("slabwise_factors: need one plane bank per slab boundary");
  }
  const std::size_t n = planes.front().size();
  std::vector<Eigen::MatrixXcd> factors;
  factors.reserve(screens.size());
  for (std::size_t k = 0; k < screens.size(); ++k) {
    Eigen::MatrixXcd tk(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < n; ++m) {
      ComplexField u = planes[k].fields[m];
      apply_phase_screen(u, screens[k]);
      fresnel_propagate(u, kernel);
      if (window) apply_absorber(u, *window);
      for (std::size_t r = 0; r < n; ++r) {
        tk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
            overlap(planes[k + 1].fields[r], u);
      }
    }
    factors.push_back(std::move(tk));
  }
  return factors;
}

double composition_deviation(const std::vector<Eigen::MatrixXcd>& factors,
                             const Eigen::MatrixXcd& full) {
  if (factors.empty()) throw std::invalid_argument("composition_deviation: no factors");
  for (const Eigen::MatrixXcd& f : factors) {
    if (f.rows() != full.rows() || f.cols() != full.cols()) {
      throw std::invalid_argument("composition_deviation: factor shape mismatch");
    }
  }
  Eigen::MatrixXcd prod = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) prod = factors[k] * prod;
  return (prod - full).norm();
}

}  // namespace turbmimo
