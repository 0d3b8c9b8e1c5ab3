#pragma once

#include <vector>

#include "turbmimo/experiment.hpp"
#include "turbmimo/field.hpp"

namespace turbmimo::reference {

// Slow, obviously-correct counterparts of the production kernels.  Tests pin
// the fast paths against these; the benchmark target reports the speed gap.

// Direct O(n^3) unitary DFT (one naive 1-D pass per axis).
void dft2d(ComplexField& u, bool inverse);

// Plain single-thread loop over realizations, same per-realization code as
// the production sweep.  Produces byte-identical rows.
SweepResult run_sweep_serial(const SimConfig& cfg, const ProgressFn& progress = {});

}  // namespace turbmimo::reference
