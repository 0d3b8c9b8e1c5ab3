#include "turbmimo/turbulence.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "turbmimo/fft.hpp"

namespace turbmimo {

namespace {
constexpr double kPi = std::numbers::pi;

double one_minus_j0(double x) {
  // series below 1e-3 to dodge the 1 - (1 - eps) cancellation
  if (x < 1e-3) {
    const double x2 = x * x;
    return x2 / 4.0 * (1.0 - x2 / 16.0);
  }
  return 1.0 - std::cyl_bessel_j(0.0, x);
}
}  // namespace

void TurbulenceParams::validate() const {
  if (cn2 < 0.0) throw std::invalid_argument("cn2 must be >= 0");
  if (!(outer_scale > 0.0)) throw std::invalid_argument("outer scale must be positive");
  if (!(inner_scale > 0.0)) throw std::invalid_argument("inner scale must be positive");
  if (inner_scale >= outer_scale) {
    throw std::invalid_argument("inner scale must be smaller than the outer scale");
  }
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(path_length > 0.0)) throw std::invalid_argument("path length must be positive");
  if (n_slabs == 0) throw std::invalid_argument("need at least one slab");
  if (rho_z < 0.0 || rho_z >= 1.0) throw std::invalid_argument("rho_z must be in [0, 1)");
}

double vonkarman_psd(double kappa, double cn2, double outer_scale, double inner_scale) {
  if (cn2 < 0.0) throw std::invalid_argument("cn2 must be >= 0");
  if (!(outer_scale > 0.0) || !(inner_scale > 0.0)) {
    throw std::invalid_argument("scales must be positive");
  }
  const double k0 = 2.0 * kPi / outer_scale;
  const double km = 5.92 / inner_scale;
  const double base = kappa * kappa + k0 * k0;
  return 0.033 * cn2 * std::pow(base, -11.0 / 6.0) * std::exp(-(kappa * kappa) / (km * km));
}

double fried_parameter(const TurbulenceParams& p) {
  p.validate();
  if (p.cn2 == 0.0) return INFINITY;
  const double k = 2.0 * kPi / p.wavelength;
  return std::pow(0.423 * k * k * p.cn2 * p.path_length, -3.0 / 5.0);
}

double rytov_variance(const TurbulenceParams& p) {
  p.validate();
  const double k = 2.0 * kPi / p.wavelength;
  return 1.23 * p.cn2 * std::pow(k, 7.0 / 6.0) * std::pow(p.path_length, 11.0 / 6.0);
}

ScreenSynthesizer::ScreenSynthesizer(const Grid& g, const TurbulenceParams& p,
                                     int subharmonic_levels)
    : grid_(g), params_(p), levels_(subharmonic_levels) {
  p.validate();
  if (subharmonic_levels < 0 || subharmonic_levels > 8) {
    throw std::invalid_argument("subharmonic levels must be in [0, 8]");
  }
  const double k_opt = 2.0 * kPi / p.wavelength;
  const double dz = p.slab_length();
  const double psd_factor = 2.0 * kPi * k_opt * k_opt * dz;  // screen PSD / index PSD
  const double dkappa = 2.0 * kPi * g.freq_spacing();

  scale_.assign(g.size(), 0.0);
  for (std::size_t iy = 0; iy < g.n; ++iy) {
    const double ky = 2.0 * kPi * g.freq(iy);
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      if (ix == 0 && iy == 0) continue;  // piston
      const double kx = 2.0 * kPi * g.freq(ix);
      const double kappa = std::hypot(kx, ky);
      const double var = psd_factor * vonkarman_psd(kappa, p.cn2, p.outer_scale, p.inner_scale);
      scale_[iy * g.n + ix] = std::sqrt(var) * dkappa;
    }
  }

  // Each level subdivides the still-empty central cell of the previous one
  // into 3x3; the center stays empty for the next level (and the residual
  // piston-scale power it holds is negligible once the levels reach 1/L0).
  for (int lvl = 1; lvl <= levels_; ++lvl) {
    const double dk = dkappa / std::pow(3.0, lvl);
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        if (i == 0 && j == 0) continue;
        const double kx = i * dk;
        const double ky = j * dk;
        const double kappa = std::hypot(kx, ky);
        Subharmonic sub;
        sub.scale = std::sqrt(psd_factor *
                              vonkarman_psd(kappa, p.cn2, p.outer_scale, p.inner_scale)) * dk;
        sub.ex.resize(g.n);
        sub.ey.resize(g.n);
        for (std::size_t t = 0; t < g.n; ++t) {
          const double x = g.coord(t);
          sub.ex[t] = cdouble(std::cos(kx * x), std::sin(kx * x));
          sub.ey[t] = cdouble(std::cos(ky * x), std::sin(ky * x));
        }
        subs_.push_back(std::move(sub));
      }
    }
  }
}

std::vector<PhaseScreen> ScreenSynthesizer::make_stack(const StreamKey& key) const {
  const std::size_t m = grid_.size();
  const std::size_t n_sub = subs_.size();
  const std::uint64_t philox_key = key.fold();
  const double rho = params_.rho_z;
  const double fresh = std::sqrt(1.0 - rho * rho);

  std::vector<cdouble> state(m);       // AR(1)-evolved white coefficients
  std::vector<cdouble> sub_state(n_sub);
  std::vector<cdouble> spec(m);
  std::vector<PhaseScreen> stack;
  stack.reserve(params_.n_slabs);
  FftEngine& fft = FftEngine::for_grid(grid_.n);

  for (std::size_t k = 0; k < params_.n_slabs; ++k) {
    // counter layout: high word = slab, low word = draw index (grid bins,
    // then subharmonics); one complex normal per counter
    for (std::size_t i = 0; i < m; ++i) {
      const auto [re, im] = gaussian_pair(philox_key, k, i);
      const cdouble xi(re, im);
      state[i] = (k == 0) ? xi : rho * state[i] + fresh * xi;
    }
    for (std::size_t j = 0; j < n_sub; ++j) {
      const auto [re, im] = gaussian_pair(philox_key, k, m + j);
      const cdouble xi(re, im);
      sub_state[j] = (k == 0) ? xi : rho * sub_state[j] + fresh * xi;
    }

    for (std::size_t i = 0; i < m; ++i) spec[i] = state[i] * scale_[i];
    fft.backward_raw(spec.data());

    PhaseScreen screen(grid_);
    for (std::size_t i = 0; i < m; ++i) screen.phase[i] = spec[i].real();

    for (std::size_t j = 0; j < n_sub; ++j) {
      const Subharmonic& sub = subs_[j];
      const cdouble c = sub_state[j] * sub.scale;
      for (std::size_t iy = 0; iy < grid_.n; ++iy) {
        const cdouble row = c * sub.ey[iy];
        double* out = screen.phase.data() + iy * grid_.n;
        for (std::size_t ix = 0; ix < grid_.n; ++ix) {
          out[ix] += (row * sub.ex[ix]).real();
        }
      }
    }
    stack.push_back(std::move(screen));
  }
  return stack;
}

double screen_structure_function(double r, const TurbulenceParams& p) {
  p.validate();
  if (r < 0.0) throw std::invalid_argument("separation must be >= 0");
  if (r == 0.0 || p.cn2 == 0.0) return 0.0;
  const double k_opt = 2.0 * kPi / p.wavelength;
  const double dz = p.slab_length();
  const double k0 = 2.0 * kPi / p.outer_scale;
  const double km = 5.92 / p.inner_scale;

  // log-kappa Simpson; integrand kappa^2 Phi_n (1 - J0(kappa r)) dies off as
  // exp(-(kappa/km)^2) above km and as kappa^3 below k0
  const double t_lo = std::log(k0 * 1e-4);
  const double t_hi = std::log(km * 6.0);
  const std::size_t n_steps = 4000;  // even
  const double h = (t_hi - t_lo) / static_cast<double>(n_steps);
  auto f = [&](double t) {
    const double kappa = std::exp(t);
    const double phi = vonkarman_psd(kappa, p.cn2, p.outer_scale, p.inner_scale);
    return kappa * kappa * phi * one_minus_j0(kappa * r);
  };
  double s = f(t_lo) + f(t_hi);
  for (std::size_t i = 1; i < n_steps; ++i) {
    s += f(t_lo + h * static_cast<double>(i)) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  const double integral = s * h / 3.0;
  return 8.0 * kPi * kPi * k_opt * k_opt * dz * integral;
}

}  // namespace turbmimo
