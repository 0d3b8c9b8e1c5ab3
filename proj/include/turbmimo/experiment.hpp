#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbmimo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full description of a sweep.  Defaults reproduce the reference scenario:
// 1550 nm over 10 km, 3 cm waist, 128 x 128 @ 2.5 mm, 40 slabs, AR(1) 0.9,
// 200 realizations per point, 13 log-spaced turbulence strengths in
// [1e-16, 1e-13], 2..5 rails, both photon regimes.
struct SimConfig {
  double wavelength = 1.55e-6;
  double path_length = 1.0e4;
  double waist = 0.03;
  std::size_t n_points = 128;
  double spacing = 2.5e-3;
  double outer_scale = 30.0;
  double inner_scale = 5e-3;
  std::size_t n_slabs = 40;
  double rho_z = 0.9;
  std::size_t n_mc = 200;
  double cn2_min = 1e-16;
  double cn2_max = 1e-13;
  std::size_t cn2_points = 13;
  std::vector<double> cn2_list;        // explicit grid; overrides min/max/points
  std::vector<std::size_t> n_modes = {2, 3, 4, 5};
  std::uint64_t master_seed = 1;
  bool absorber = true;
  double guard_fraction = 0.1;
  int subharmonic_levels = 4;
  std::string regimes = "both";        // both | distinguishable | indistinguishable
  std::size_t slab_factor_samples = 50;
  std::size_t workers = 0;             // 0 = all hardware threads; 1 = serial

  void validate() const;               // throws ConfigError
  std::vector<double> cn2_grid() const;
  bool run_distinguishable() const { return regimes != "indistinguishable"; }
  bool run_indistinguishable() const { return regimes != "distinguishable"; }
};

// Flat key = value file; '#' comments.  Unknown keys are errors; missing keys
// keep their defaults (each default fallback is listed in `notices`).
SimConfig load_config(const std::string& path, std::vector<std::string>* notices = nullptr);

// One "key=value" override (--set).  Throws ConfigError on unknown key or
// unparsable value.
void apply_override(SimConfig& cfg, const std::string& assignment);

struct SweepRow {
  double cn2 = 0.0;
  std::size_t n_modes = 0;
  std::string regime;
  std::size_t n_mc = 0;
  double fried_r0 = 0.0;
  double rytov_variance = 0.0;

  double p_all_kept_mean = 0.0, p_all_kept_se = 0.0;
  double p_collision_given_kept_mean = 0.0, p_collision_given_kept_se = 0.0;
  double p_collision_mean = 0.0, p_collision_se = 0.0;
  double mean_erasure_mean = 0.0, mean_erasure_se = 0.0;
  double fidelity_cond_mean = 0.0, fidelity_cond_se = 0.0;
  double fidelity_uncond_mean = 0.0, fidelity_uncond_se = 0.0;
  double p_succ_mean = 0.0, p_succ_se = 0.0;
  double block_dev_mean = 0.0, block_dev_se = 0.0;
  std::size_t block_dev_samples = 0;
  double erasure_corr_indicator = 0.0, erasure_corr_indicator_se = 0.0;
  double erasure_corr_propensity = 0.0, erasure_corr_propensity_se = 0.0;
  std::size_t saturated_rails = 0;
};

// Everything measured for one realization; the sweep reduces these in fixed
// realization order so results do not depend on worker count.
struct RealizationObservables {
  std::vector<double> eps;
  double p_all_kept_d = 0.0, p_coll_cond_d = 0.0, p_coll_d = 0.0;
  bool cond_defined_d = true;
  double p_all_kept_i = 0.0, p_coll_cond_i = 0.0, p_coll_i = 0.0;
  bool cond_defined_i = true;
  double fid_cond = 0.0, fid_uncond = 0.0;
  double p_succ = 0.0;
  double block_dev = 0.0;
  bool has_block_dev = false;
};

// Order-stable, mergeable per-point accumulator.  Records land in slots
// indexed by realization; merging two disjoint halves and finalizing equals
// finalizing the full run.
class CellAccumulator {
 public:
  CellAccumulator() = default;
  explicit CellAccumulator(std::size_t n_mc, std::size_t n_rails);

  void add(std::size_t mc_index, RealizationObservables obs);
  void merge(const CellAccumulator& other);  // throws on slot collisions

  std::size_t filled() const;
  const std::vector<RealizationObservables>& records() const { return records_; }

  // Reduces in index order; fills regime-tagged rows (shared columns repeated).
  std::vector<SweepRow> finalize(double cn2, std::size_t n_modes,
                                 double fried_r0, double rytov,
                                 bool with_dist, bool with_indist) const;

 private:
  std::size_t n_rails_ = 0;
  std::vector<RealizationObservables> records_;
  std::vector<bool> present_;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

SweepResult run_sweep(const SimConfig& cfg, const ProgressFn& progress = {});

// CSV with a fixed header, %.17g doubles, one row per (cn2, n, regime),
// plus a "<path>.meta" sidecar echoing the config, code version and timing.
void write_results(const SweepResult& result, const SimConfig& cfg,
                   const std::string& csv_path);

std::string csv_header();
std::string csv_line(const SweepRow& row);

}  // namespace turbmimo
