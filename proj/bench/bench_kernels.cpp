// Timings for the two layers with interchangeable implementations:
//   - the 2-D transform (FFT backend vs the naive reference DFT)
//   - the Monte Carlo ensemble driver (OpenMP vs the plain serial loop)
// Run with no arguments; prints one table to stdout.

#include <chrono>
#include <cstdio>

#include "turbmimo/experiment.hpp"
#include "turbmimo/fft.hpp"
#include "turbmimo/field.hpp"
#include "turbmimo/grid.hpp"
#include "turbmimo/reference.hpp"
#include "turbmimo/rng.hpp"

using namespace turbmimo;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ComplexField noise_field(const Grid& g, std::uint64_t key) {
  ComplexField u(g);
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const auto [re, im] = gaussian_pair(key, 0, i);
    u.v[i] = {re, im};
  }
  return u;
}

void bench_transforms() {
  std::printf("%-28s %10s %12s %10s\n", "transform (fwd+inv pair)", "n", "per pair", "reps");
  for (std::size_t n : {64u, 128u}) {
    const Grid g{n, 1e-3};
    ComplexField u = noise_field(g, mix64(n));

    FftEngine& fft = FftEngine::for_grid(n);
    const int reps_fft = 400;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps_fft; ++r) {
      fft.forward(u.v.data());
      fft.inverse(u.v.data());
    }
    const double dt_fft = seconds_since(t0) / reps_fft;
    std::printf("%-28s %10zu %10.3f us %10d\n", "fft backend", n, dt_fft * 1e6, reps_fft);

    const int reps_ref = 2;
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps_ref; ++r) {
      reference::dft2d(u, false);
      reference::dft2d(u, true);
    }
    const double dt_ref = seconds_since(t0) / reps_ref;
    std::printf("%-28s %10zu %10.3f us %10d   (x%.0f)\n", "naive dft reference", n,
                dt_ref * 1e6, reps_ref, dt_ref / dt_fft);
  }
}

void bench_sweep() {
  SimConfig cfg;
  cfg.n_points = 64;
  cfg.spacing = 5e-3;
  cfg.n_slabs = 10;
  cfg.n_mc = 8;
  cfg.cn2_list = {1e-14};
  cfg.n_modes = {3};
  cfg.slab_factor_samples = 0;
  cfg.regimes = "both";

  std::printf("\n%-28s %12s\n", "ensemble driver", "wall");
  cfg.workers = 1;
  SweepResult serial_loop = reference::run_sweep_serial(cfg);
  std::printf("%-28s %10.3f s\n", "serial reference loop", serial_loop.wall_seconds);

  cfg.workers = 0;
  SweepResult parallel = run_sweep(cfg);
  std::printf("%-28s %10.3f s   (x%.2f)\n", "openmp driver (all cores)",
              parallel.wall_seconds, serial_loop.wall_seconds / parallel.wall_seconds);

  bool identical = serial_loop.rows.size() == parallel.rows.size();
  for (std::size_t i = 0; identical && i < serial_loop.rows.size(); ++i) {
    identical = csv_line(serial_loop.rows[i]) == csv_line(parallel.rows[i]);
  }
  std::printf("%-28s %12s\n", "drivers agree", identical ? "yes" : "NO");
}

}  // namespace

int main() {
  bench_transforms();
  bench_sweep();
  return 0;
}
