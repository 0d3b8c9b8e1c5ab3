#pragma once

// Library-private plumbing shared by the production sweep and the serial
// reference loop, so both run the exact same per-realization code.

#include <vector>

#include "turbmimo/crosstalk.hpp"
#include "turbmimo/experiment.hpp"
#include "turbmimo/grid.hpp"
#include "turbmimo/modes.hpp"
#include "turbmimo/propagation.hpp"
#include "turbmimo/rng.hpp"
#include "turbmimo/turbulence.hpp"

namespace turbmimo::detail {

// Read-only view of everything fixed for one (cn2, n) cell.
struct CellContext {
  const ScreenSynthesizer* synth = nullptr;
  const Banks* banks = nullptr;
  const std::vector<ModeBank>* planes = nullptr;
  const FresnelKernel* kernel = nullptr;
  const AbsorberWindow* window = nullptr;
};

// All sweep-invariant state: grid, kernels, mode banks, screen synthesizers.
struct SweepSetup {
  Grid grid;
  std::vector<double> cn2s;
  double slab_len;
  FresnelKernel kernel;
  AbsorberWindow window_storage;
  bool use_window;
  std::vector<Banks> banks;
  std::vector<std::vector<ModeBank>> planes;
  std::vector<TurbulenceParams> tparams;
  std::vector<ScreenSynthesizer> synths;

  SweepSetup(const SimConfig& cfg, const ProgressFn& progress);

  CellContext cell(std::size_t cn2_index, std::size_t n_index) const {
    CellContext ctx;
    ctx.synth = &synths[cn2_index];
    ctx.banks = &banks[n_index];
    ctx.planes = &planes[n_index];
    ctx.kernel = &kernel;
    ctx.window = use_window ? &window_storage : nullptr;
    return ctx;
  }
};

RealizationObservables compute_realization(const SimConfig& cfg, const CellContext& ctx,
                                           const StreamKey& key);

// Index-ordered reduction of the filled accumulators into result rows.
std::vector<SweepRow> reduce_cells(const SimConfig& cfg, const SweepSetup& setup,
                                   const std::vector<CellAccumulator>& cells);

}  // namespace turbmimo::detail
