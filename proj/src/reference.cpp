#include "turbmimo/reference.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sweep_detail.hpp"

namespace turbmimo::reference {

void dft2d(ComplexField& u, bool inverse) {
  const std::size_t n = u.grid.n;
  const double sgn = inverse ? 1.0 : -1.0;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));

  // precomputed twiddle table: exp(sgn i 2 pi m / n)
  std::vector<cdouble> tw(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = sgn * 2.0 * std::numbers::pi * static_cast<double>(m) /
                     static_cast<double>(n);
    tw[m] = std::polar(1.0, a);
  }

  std::vector<cdouble> line(n);
  // rows
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t k = 0; k < n; ++k) {
      cdouble s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += u.v[iy * n + j] * tw[(j * k) % n];
      line[k] = s * norm;
    }
    for (std::size_t k = 0; k < n; ++k) u.v[iy * n + k] = line[k];
  }
  // columns
  for (std::size_t ix = 0; ix < n; ++ix) {
    for (std::size_t k = 0; k < n; ++k) {
      cdouble s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += u.v[j * n + ix] * tw[(j * k) % n];
      line[k] = s * norm;
    }
    for (std::size_t k = 0; k < n; ++k) u.v[k * n + ix] = line[k];
  }
}

SweepResult run_sweep_serial(const SimConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const detail::SweepSetup setup(cfg, progress);

  std::vector<CellAccumulator> cells;
  cells.reserve(setup.cn2s.size() * cfg.n_modes.size());
  for (std::size_t ci = 0; ci < setup.cn2s.size(); ++ci) {
    for (std::size_t ni = 0; ni < cfg.n_modes.size(); ++ni) {
      CellAccumulator acc(cfg.n_mc, cfg.n_modes[ni]);
      const detail::CellContext ctx = setup.cell(ci, ni);
      for (std::size_t mc = 0; mc < cfg.n_mc; ++mc) {
        StreamKey key;
        key.master = cfg.master_seed;
        key.cn2_index = ci;
        key.n_index = ni;
        key.mc_index = mc;
        acc.add(mc, detail::compute_realization(cfg, ctx, key));
      }
      if (progress) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", setup.cn2s[ci]);
        progress("cell done: cn2=" + std::string(buf) +
                 " n=" + std::to_string(cfg.n_modes[ni]));
      }
      cells.push_back(std::move(acc));
    }
  }

  SweepResult result;
  result.rows = detail::reduce_cells(cfg, setup, cells);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace turbmimo::reference
