#include "turbmimo/validate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "turbmimo/crosstalk.hpp"
#include "turbmimo/fft.hpp"
#include "turbmimo/field.hpp"
#include "turbmimo/logical_channel.hpp"
#include "turbmimo/modes.hpp"
#include "turbmimo/photon_stats.hpp"
#include "turbmimo/propagation.hpp"
#include "turbmimo/rng.hpp"
#include "turbmimo/turbulence.hpp"

namespace turbmimo {

bool ValidationReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ComplexField random_field(const Grid& g, std::uint64_t key) {
  ComplexField u(g);
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const auto [re, im] = gaussian_pair(key, 0, i);
    u.v[i] = {re, im};
  }
  return u;
}

// rms radius -> Gaussian 1/e^2 waist: w^2 = 2 <r^2> for the fundamental mode
double effective_waist(const ComplexField& u) {
  double p = 0.0, r2 = 0.0;
  const std::size_t n = u.grid.n;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double y = u.grid.coord(iy);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = u.grid.coord(ix);
      const double a = std::norm(u.at(ix, iy));
      p += a;
      r2 += a * (x * x + y * y);
    }
  }
  return std::sqrt(2.0 * r2 / p);
}

CheckResult check_fft_roundtrip(std::uint64_t seed) {
  const Grid g{64, 1.0e-3};
  ComplexField u = random_field(g, mix64(seed ^ 0x10));
  const ComplexField orig = u;
  const double p0 = power(u);
  FftEngine& fft = FftEngine::for_grid(g.n);
  fft.forward(u.v.data());
  const double p_spec = power(u);  // unitary transform preserves the sum
  fft.inverse(u.v.data());
  double max_err = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    max_err = std::max(max_err, std::abs(u.v[i] - orig.v[i]));
  }
  const double p_err = std::abs(p_spec - p0) / p0;
  CheckResult r;
  r.name = "fft-roundtrip";
  r.pass = max_err < 1e-12 && p_err < 1e-12;
  r.detail = "max point error " + fmt(max_err) + ", power error " + fmt(p_err);
  return r;
}

CheckResult check_step_identity(std::uint64_t seed, bool flip) {
  const Grid g{64, 1.0e-3};
  ComplexField u = random_field(g, mix64(seed ^ 0x11));
  const ComplexField orig = u;
  FresnelKernel k(g, 0.0, 1.55e-6);
  if (flip) k.debug_flip_chirp();
  fresnel_propagate(u, k);
  double max_err = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    max_err = std::max(max_err, std::abs(u.v[i] - orig.v[i]));
  }
  CheckResult r;
  r.name = "zero-step-identity";
  r.pass = max_err == 0.0;
  r.detail = "max point error " + fmt(max_err);
  return r;
}

// Real-envelope Gaussian: w(z) = w0 sqrt(1 + (z/zR)^2).  Blind to the chirp
// sign (w(z) = w(-z)), which is exactly why the focusing check below exists.
CheckResult check_waist_growth(bool flip) {
  const double lambda = 1.55e-6;
  const double w0 = 8.0e-3;
  const Grid g{128, 0.8e-3};
  const double zr = std::numbers::pi * w0 * w0 / lambda;
  const double z = zr;  // one Rayleigh range: exactly sqrt(2) growth

  ComplexField u(g);
  for (std::size_t iy = 0; iy < g.n; ++iy) {
    const double y = g.coord(iy);
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const double x = g.coord(ix);
      u.at(ix, iy) = std::exp(-(x * x + y * y) / (w0 * w0));
    }
  }
  FresnelKernel k(g, z, lambda);
  if (flip) k.debug_flip_chirp();
  const double p_in = power(u);
  fresnel_propagate(u, k);
  const double p_out = power(u);
  const double w_meas = effective_waist(u);
  const double w_expect = w0 * std::sqrt(2.0);
  const double rel = std::abs(w_meas - w_expect) / w_expect;
  const double p_rel = std::abs(p_out - p_in) / p_in;
  CheckResult r;
  r.name = "gaussian-waist-growth";
  r.pass = rel < 0.01 && p_rel < 1e-12;
  r.detail = "w " + fmt(w_meas * 1e3) + " mm vs " + fmt(w_expect * 1e3) +
             " mm (rel " + fmt(rel) + "), power drift " + fmt(p_rel);
  return r;
}

// Converging beam must contract towards its focus.  A chirp-flipped kernel
// time-reverses the step, so the same input expands instead -- this is the
// check that pins the sign of the quadratic spectral phase.
CheckResult check_beam_focusing(bool flip) {
  const double lambda = 1.55e-6;
  const double w0 = 8.0e-3;
  const double focal = 50.0;
  const Grid g{128, 0.4e-3};
  const double k0 = 2.0 * std::numbers::pi / lambda;

  ComplexField u(g);
  for (std::size_t iy = 0; iy < g.n; ++iy) {
    const double y = g.coord(iy);
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const double x = g.coord(ix);
      const double rr = x * x + y * y;
      const double lens = -k0 * rr / (2.0 * focal);
      u.at(ix, iy) = std::exp(-rr / (w0 * w0)) * std::polar(1.0, lens);
    }
  }
  const double w_in = effective_waist(u);
  FresnelKernel k(g, focal, lambda);
  if (flip) k.debug_flip_chirp();
  fresnel_propagate(u, k);
  const double w_out = effective_waist(u);
  CheckResult r;
  r.name = "focused-beam-contraction";
  r.pass = w_out < 0.6 * w_in;
  r.detail = "w_in " + fmt(w_in * 1e3) + " mm -> w_out " + fmt(w_out * 1e3) + " mm";
  return r;
}

CheckResult check_screen_statistics(std::uint64_t seed) {
  const Grid g{64, 5.0e-3};
  TurbulenceParams p;
  p.cn2 = 1e-13;
  p.outer_scale = 30.0;
  p.inner_scale = 5e-3;
  p.wavelength = 1.55e-6;
  p.path_length = 250.0;
  p.n_slabs = 1;
  p.rho_z = 0.0;
  const ScreenSynthesizer synth(g, p, 4);

  const std::size_t n_real = 48;
  const std::array<std::size_t, 2> lags = {1, 3};
  std::array<double, 2> d_meas = {0.0, 0.0};
  std::array<std::size_t, 2> counts = {0, 0};
  for (std::size_t m = 0; m < n_real; ++m) {
    StreamKey key;
    key.master = seed;
    key.mc_index = m;
    const std::vector<PhaseScreen> stack = synth.make_stack(key);
    const std::vector<double>& phi = stack[0].phase;
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const std::size_t lag = lags[li];
      for (std::size_t iy = 0; iy < g.n; ++iy) {
        for (std::size_t ix = 0; ix + lag < g.n; ++ix) {
          const double d = phi[iy * g.n + ix + lag] - phi[iy * g.n + ix];
          d_meas[li] += d * d;
          ++counts[li];
        }
      }
    }
  }
  CheckResult r;
  r.name = "screen-structure-function";
  r.pass = true;
  for (std::size_t li = 0; li < lags.size(); ++li) {
    const double rr = static_cast<double>(lags[li]) * g.spacing;
    const double meas = d_meas[li] / static_cast<double>(counts[li]);
    const double ref = screen_structure_function(rr, p);
    const double rel = std::abs(meas - ref) / ref;
    if (rel > 0.10) r.pass = false;
    r.detail += (li ? "; " : "") + std::string("r=") + fmt(rr * 1e3) + "mm: " +
                fmt(meas) + " vs " + fmt(ref) + " (rel " + fmt(rel) + ")";
  }
  return r;
}

CheckResult check_screen_ar1(std::uint64_t seed) {
  const Grid g{32, 5.0e-3};
  TurbulenceParams p;
  p.cn2 = 1e-13;
  p.wavelength = 1.55e-6;
  p.path_length = 500.0;
  p.n_slabs = 2;
  p.rho_z = 0.9;
  const ScreenSynthesizer synth(g, p, 2);

  double s01 = 0.0, s00 = 0.0, s11 = 0.0;
  const std::size_t n_real = 96;
  for (std::size_t m = 0; m < n_real; ++m) {
    StreamKey key;
    key.master = seed ^ 0xA51;
    key.mc_index = m;
    const std::vector<PhaseScreen> stack = synth.make_stack(key);
    for (std::size_t i = 0; i < g.size(); ++i) {
      s01 += stack[0].phase[i] * stack[1].phase[i];
      s00 += stack[0].phase[i] * stack[0].phase[i];
      s11 += stack[1].phase[i] * stack[1].phase[i];
    }
  }
  const double corr = s01 / std::sqrt(s00 * s11);
  CheckResult r;
  r.name = "screen-slab-correlation";
  r.pass = std::abs(corr - p.rho_z) < 0.05;
  r.detail = "corr " + fmt(corr) + " vs rho_z " + fmt(p.rho_z);
  return r;
}

CheckResult check_permanent(std::uint64_t seed) {
  double worst = 0.0;
  for (int n = 2; n <= 5; ++n) {
    Eigen::MatrixXcd a(n, n);
    std::size_t ctr = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto [re, im] = gaussian_pair(mix64(seed ^ (0x77u + n)), 1, ctr++);
        a(i, j) = std::complex<double>(re, im);
      }
    }
    // brute force over permutations
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::complex<double> brute = 0.0;
    do {
      std::complex<double> term = 1.0;
      for (int i = 0; i < n; ++i) term *= a(i, perm[i]);
      brute += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double err = std::abs(permanent(a) - brute) / std::abs(brute);
    worst = std::max(worst, err);
  }
  CheckResult r;
  r.name = "permanent-vs-bruteforce";
  r.pass = worst < 1e-10;
  r.detail = "worst relative error " + fmt(worst);
  return r;
}

CheckResult check_dilation(std::uint64_t seed) {
  const int n = 4;
  Eigen::MatrixXcd t(n, n);
  std::size_t ctr = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto [re, im] = gaussian_pair(mix64(seed ^ 0x99), 2, ctr++);
      t(i, j) = std::complex<double>(re, im);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t);
  t *= 0.9 / svd.singularValues()(0);
  const Eigen::MatrixXcd d = unitary_dilation(t);
  const double err = (d.adjoint() * d - Eigen::MatrixXcd::Identity(2 * n, 2 * n)).norm();
  CheckResult r;
  r.name = "dilation-unitarity";
  r.pass = err < 1e-10;
  r.detail = "||D^H D - I|| = " + fmt(err);
  return r;
}

CheckResult check_hom_dip() {
  Eigen::MatrixXcd t(2, 2);
  const double s = 1.0 / std::numbers::sqrt2;
  t << s, s, s, -s;
  const OutcomeStats qi = indistinguishable_stats(t);
  const OutcomeStats qd = distinguishable_stats(t);
  const double err_i = std::abs(qi.p_collision_given_kept - 1.0);
  const double err_d = std::abs(qd.p_collision_given_kept - 0.5);
  const double err_k = std::abs(qi.p_all_kept - 1.0);
  CheckResult r;
  r.name = "two-photon-interference";
  r.pass = err_i < 1e-12 && err_d < 1e-12 && err_k < 1e-12;
  r.detail = "bunching " + fmt(qi.p_collision_given_kept) + " (want 1), classical " +
             fmt(qd.p_collision_given_kept) + " (want 0.5)";
  return r;
}

CheckResult check_channel_algebra(std::uint64_t seed) {
  const auto [re, im] = gaussian_pair(mix64(seed ^ 0xC4), 3, 0);
  const RailBlock block = rail_block(std::complex<double>(re, im), 0.3, nullptr);
  const RailKraus kr = rail_kraus(block);
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (const auto& k : kr.k) sum += k.adjoint() * k;
  const double comp_err = (sum - Eigen::Matrix2cd::Identity()).norm();

  // trace preservation through a two-rail product channel
  std::size_t ctr = 1;
  Eigen::MatrixXcd a(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const auto [x, y] = gaussian_pair(mix64(seed ^ 0xC5), 4, ctr++);
      a(i, j) = std::complex<double>(x, y);
    }
  }
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace();
  const std::vector<RailKraus> rails = {kr, rail_kraus(rail_block(1.0, 0.7, nullptr))};
  const Eigen::MatrixXcd out = apply_product_channel(rho, rails);
  const double tr_err = std::abs(out.trace() - std::complex<double>(1.0));

  // flag populations must follow the analytic pattern law for a product state
  const double e0 = 0.3, e1 = 0.7;
  const double p00 = flag_pattern_population(out, 0u, 2);
  const double law_err = std::abs(p00 - (1.0 - e0) * (1.0 - e1));

  CheckResult r;
  r.name = "erasure-channel-algebra";
  r.pass = comp_err < 1e-12 && tr_err < 1e-12 && law_err < 1e-12;
  r.detail = "completeness " + fmt(comp_err) + ", trace drift " + fmt(tr_err) +
             ", pattern-law error " + fmt(law_err);
  return r;
}

CheckResult check_vacuum_crosstalk(bool flip) {
  const Grid g{64, 1.0e-3};
  const double lambda = 1.55e-6;
  const double dist = 100.0;
  const Banks banks = build_banks(g, 5e-3, 2, dist, lambda);
  FresnelKernel k(g, dist, lambda);
  if (flip) k.debug_flip_chirp();
  const std::vector<PhaseScreen> no_screens(1, PhaseScreen(g));  // one empty slab
  const RealizationResult rr = propagate_realization(banks, no_screens, k, nullptr);
  const double err =
      (rr.t - Eigen::MatrixXcd::Identity(rr.t.rows(), rr.t.cols())).norm();
  CheckResult r;
  r.name = "vacuum-crosstalk-identity";
  r.pass = err < 1e-6;
  r.detail = "||T - I||_F = " + fmt(err);
  return r;
}

}  // namespace

ValidationReport run_validation(std::uint64_t seed, FaultInjection fault) {
  const bool flip = fault == FaultInjection::transfer_sign;
  ValidationReport rep;
  rep.checks.push_back(check_fft_roundtrip(seed));
  rep.checks.push_back(check_step_identity(seed, flip));
  rep.checks.push_back(check_waist_growth(flip));
  rep.checks.push_back(check_beam_focusing(flip));
  rep.checks.push_back(check_screen_statistics(seed));
  rep.checks.push_back(check_screen_ar1(seed));
  rep.checks.push_back(check_permanent(seed));
  rep.checks.push_back(check_dilation(seed));
  rep.checks.push_back(check_hom_dip());
  rep.checks.push_back(check_channel_algebra(seed));
  rep.checks.push_back(check_vacuum_crosstalk(flip));
  return rep;
}

}  // namespace turbmimo
