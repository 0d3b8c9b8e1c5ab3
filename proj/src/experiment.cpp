#include "turbmimo/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sweep_detail.hpp"
#include "turbmimo/logical_channel.hpp"
#include "turbmimo/photon_stats.hpp"
#include "turbmimo/version.hpp"

namespace turbmimo {

// ---------------------------------------------------------------- config ---

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };

  if (!(wavelength > 0.0)) fail("wavelength must be > 0");
  if (!(path_length > 0.0)) fail("path_length must be > 0");
  if (!(waist > 0.0)) fail("waist must be > 0");
  if (n_points < 8 || (n_points & (n_points - 1)) != 0) {
    fail("n_points must be a power of two >= 8");
  }
  if (!(spacing > 0.0)) fail("spacing must be > 0");
  if (!(outer_scale > 0.0)) fail("outer_scale must be > 0");
  if (!(inner_scale > 0.0)) fail("inner_scale must be > 0");
  if (!(inner_scale < outer_scale)) fail("inner_scale must be < outer_scale");
  if (n_slabs == 0) fail("n_slabs must be >= 1");
  if (!(rho_z >= 0.0 && rho_z < 1.0)) fail("rho_z must be in [0, 1)");
  if (n_mc < 2) fail("n_mc must be >= 2");
  if (cn2_list.empty()) {
    if (!(cn2_min >= 0.0)) fail("cn2_min must be >= 0");
    if (!(cn2_max >= cn2_min)) fail("cn2_max must be >= cn2_min");
    if (cn2_points == 0) fail("cn2_points must be >= 1");
    if (cn2_points > 1 && !(cn2_min > 0.0)) {
      fail("cn2_min must be > 0 for a log-spaced grid");
    }
  } else {
    for (double c : cn2_list) {
      if (!(c >= 0.0)) fail("cn2_list entries must be >= 0");
    }
  }
  if (n_modes.empty()) fail("n_modes must not be empty");
  for (std::size_t n : n_modes) {
    if (n < 2 || n > 5) fail("n_modes entries must be in 2..5");
  }
  if (!(guard_fraction >= 0.0 && guard_fraction < 0.5)) {
    fail("guard_fraction must be in [0, 0.5)");
  }
  if (subharmonic_levels < 0 || subharmonic_levels > 8) {
    fail("subharmonic_levels must be in 0..8");
  }
  if (regimes != "both" && regimes != "distinguishable" && regimes != "indistinguishable") {
    fail("regimes must be both | distinguishable | indistinguishable");
  }
}

std::vector<double> SimConfig::cn2_grid() const {
  if (!cn2_list.empty()) return cn2_list;
  std::vector<double> grid;
  grid.reserve(cn2_points);
  if (cn2_points == 1) {
    grid.push_back(cn2_min);
    return grid;
  }
  const double la = std::log(cn2_min);
  const double lb = std::log(cn2_max);
  for (std::size_t i = 0; i < cn2_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(cn2_points - 1);
    grid.push_back(std::exp(la + t * (lb - la)));
  }
  grid.front() = cn2_min;  // exp(log(x)) can be an ulp off; pin the endpoints
  grid.back() = cn2_max;
  return grid;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + value + "' as number");
  }
  if (used != value.size()) {
    throw ConfigError("config: key '" + key + "': trailing junk in '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + value +
                      "' as unsigned integer");
  }
  if (used != value.size()) {
    throw ConfigError("config: key '" + key + "': trailing junk in '" + value + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(key, value));
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + value + "' as integer");
  }
  if (used != value.size()) {
    throw ConfigError("config: key '" + key + "': trailing junk in '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("config: key '" + key + "': cannot parse '" + value + "' as bool");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Applies one key to the config.  Returns false for unknown keys.
bool set_key(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "wavelength") cfg.wavelength = parse_double(key, value);
  else if (key == "path_length") cfg.path_length = parse_double(key, value);
  else if (key == "waist") cfg.waist = parse_double(key, value);
  else if (key == "n_points") cfg.n_points = parse_size(key, value);
  else if (key == "spacing") cfg.spacing = parse_double(key, value);
  else if (key == "outer_scale") cfg.outer_scale = parse_double(key, value);
  else if (key == "inner_scale") cfg.inner_scale = parse_double(key, value);
  else if (key == "n_slabs") cfg.n_slabs = parse_size(key, value);
  else if (key == "rho_z") cfg.rho_z = parse_double(key, value);
  else if (key == "n_mc") cfg.n_mc = parse_size(key, value);
  else if (key == "cn2_min") cfg.cn2_min = parse_double(key, value);
  else if (key == "cn2_max") cfg.cn2_max = parse_double(key, value);
  else if (key == "cn2_points") cfg.cn2_points = parse_size(key, value);
  else if (key == "cn2_list") {
    cfg.cn2_list.clear();
    for (const std::string& item : split_list(value)) {
      cfg.cn2_list.push_back(parse_double(key, item));
    }
  } else if (key == "n_modes") {
    cfg.n_modes.clear();
    for (const std::string& item : split_list(value)) {
      cfg.n_modes.push_back(parse_size(key, item));
    }
  } else if (key == "master_seed") cfg.master_seed = parse_u64(key, value);
  else if (key == "absorber") cfg.absorber = parse_bool(key, value);
  else if (key == "guard_fraction") cfg.guard_fraction = parse_double(key, value);
  else if (key == "subharmonic_levels") cfg.subharmonic_levels = parse_int(key, value);
  else if (key == "regimes") cfg.regimes = value;
  else if (key == "slab_factor_samples") cfg.slab_factor_samples = parse_size(key, value);
  else if (key == "workers") cfg.workers = parse_size(key, value);
  else return false;
  return true;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "wavelength", "path_length", "waist", "n_points", "spacing",
      "outer_scale", "inner_scale", "n_slabs", "rho_z", "n_mc",
      "cn2_min", "cn2_max", "cn2_points", "cn2_list", "n_modes",
      "master_seed", "absorber", "guard_fraction", "subharmonic_levels",
      "regimes", "slab_factor_samples", "workers"};
  return keys;
}

std::string format_key(const SimConfig& d, const std::string& key) {
  std::ostringstream os;
  os.precision(17);
  if (key == "wavelength") os << d.wavelength;
  else if (key == "path_length") os << d.path_length;
  else if (key == "waist") os << d.waist;
  else if (key == "n_points") os << d.n_points;
  else if (key == "spacing") os << d.spacing;
  else if (key == "outer_scale") os << d.outer_scale;
  else if (key == "inner_scale") os << d.inner_scale;
  else if (key == "n_slabs") os << d.n_slabs;
  else if (key == "rho_z") os << d.rho_z;
  else if (key == "n_mc") os << d.n_mc;
  else if (key == "cn2_min") os << d.cn2_min;
  else if (key == "cn2_max") os << d.cn2_max;
  else if (key == "cn2_points") os << d.cn2_points;
  else if (key == "cn2_list") os << "(log grid from cn2_min/cn2_max/cn2_points)";
  else if (key == "n_modes") {
    for (std::size_t i = 0; i < d.n_modes.size(); ++i) os << (i ? "," : "") << d.n_modes[i];
  } else if (key == "master_seed") os << d.master_seed;
  else if (key == "absorber") os << (d.absorber ? "true" : "false");
  else if (key == "guard_fraction") os << d.guard_fraction;
  else if (key == "subharmonic_levels") os << d.subharmonic_levels;
  else if (key == "regimes") os << d.regimes;
  else if (key == "slab_factor_samples") os << d.slab_factor_samples;
  else if (key == "workers") os << d.workers;
  return os.str();
}

}  // namespace

SimConfig load_config(const std::string& path, std::vector<std::string>* notices) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);

  SimConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    if (!set_key(cfg, key, value)) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }

  if (notices) {
    const SimConfig defaults;
    for (const std::string& key : known_keys()) {
      if (!seen.count(key)) {
        notices->push_back(key + " = " + format_key(defaults, key) + " (default)");
      }
    }
  }
  cfg.validate();
  return cfg;
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!set_key(cfg, key, value)) {
    throw ConfigError("override: unknown key '" + key + "'");
  }
}

// ----------------------------------------------------------- accumulator ---

CellAccumulator::CellAccumulator(std::size_t n_mc, std::size_t n_rails)
    : n_rails_(n_rails), records_(n_mc), present_(n_mc, false) {}

void CellAccumulator::add(std::size_t mc_index, RealizationObservables obs) {
  if (mc_index >= records_.size()) {
    throw std::out_of_range("CellAccumulator::add: index out of range");
  }
  if (present_[mc_index]) {
    throw std::logic_error("CellAccumulator::add: slot already filled");
  }
  if (obs.eps.size() != n_rails_) {
    throw std::invalid_argument("CellAccumulator::add: rail count mismatch");
  }
  records_[mc_index] = std::move(obs);
  present_[mc_index] = true;
}

void CellAccumulator::merge(const CellAccumulator& other) {
  if (other.records_.size() != records_.size() || other.n_rails_ != n_rails_) {
    throw std::invalid_argument("CellAccumulator::merge: shape mismatch");
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!other.present_[i]) continue;
    if (present_[i]) throw std::logic_error("CellAccumulator::merge: slot collision");
    records_[i] = other.records_[i];
    present_[i] = true;
  }
}

std::size_t CellAccumulator::filled() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true));
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

// Mean and standard error in fixed index order; two-pass for stability.
MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  r.count = xs.size();
  if (xs.empty()) {
    r.mean = std::nan("");
    r.se = std::nan("");
    return r;
  }
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double q = 0.0;
  for (double x : xs) q += (x - r.mean) * (x - r.mean);
  const double n = static_cast<double>(xs.size());
  r.se = std::sqrt(q / (n * (n - 1.0)));
  return r;
}

}  // namespace

std::vector<SweepRow> CellAccumulator::finalize(double cn2, std::size_t n_modes,
                                                double fried_r0, double rytov,
                                                bool with_dist, bool with_indist) const {
  if (filled() != records_.size()) {
    throw std::logic_error("CellAccumulator::finalize: incomplete cell");
  }
  const std::size_t n_mc = records_.size();

  std::vector<double> mean_eps, fid_c, fid_u, p_succ, block_dev;
  std::vector<Eigen::VectorXd> eps_ens;
  mean_eps.reserve(n_mc);
  eps_ens.reserve(n_mc);
  for (const RealizationObservables& r : records_) {
    double s = 0.0;
    Eigen::VectorXd e(static_cast<Eigen::Index>(n_rails_));
    for (std::size_t m = 0; m < n_rails_; ++m) {
      s += r.eps[m];
      e[static_cast<Eigen::Index>(m)] = r.eps[m];
    }
    mean_eps.push_back(s / static_cast<double>(n_rails_));
    eps_ens.push_back(std::move(e));
    fid_c.push_back(r.fid_cond);
    fid_u.push_back(r.fid_uncond);
    p_succ.push_back(r.p_succ);
    if (r.has_block_dev) block_dev.push_back(r.block_dev);
  }

  const CorrelationSummary corr = erasure_correlation(eps_ens);
  const std::size_t saturated =
      static_cast<std::size_t>(std::count(corr.saturated.begin(), corr.saturated.end(), true));

  SweepRow base;
  base.cn2 = cn2;
  base.n_modes = n_modes;
  base.n_mc = n_mc;
  base.fried_r0 = fried_r0;
  base.rytov_variance = rytov;
  {
    const MeanSe me = mean_se(mean_eps);
    base.mean_erasure_mean = me.mean;
    base.mean_erasure_se = me.se;
    const MeanSe fc = mean_se(fid_c);
    base.fidelity_cond_mean = fc.mean;
    base.fidelity_cond_se = fc.se;
    const MeanSe fu = mean_se(fid_u);
    base.fidelity_uncond_mean = fu.mean;
    base.fidelity_uncond_se = fu.se;
    const MeanSe ps = mean_se(p_succ);
    base.p_succ_mean = ps.mean;
    base.p_succ_se = ps.se;
    const MeanSe bd = mean_se(block_dev);
    base.block_dev_mean = bd.mean;
    base.block_dev_se = bd.se;
    base.block_dev_samples = bd.count;
  }
  base.erasure_corr_indicator = corr.indicator_offdiag_mean;
  base.erasure_corr_indicator_se = corr.indicator_offdiag_se;
  base.erasure_corr_propensity = corr.propensity_offdiag_mean;
  base.erasure_corr_propensity_se = corr.propensity_offdiag_se;
  base.saturated_rails = saturated;

  std::vector<SweepRow> rows;
  auto regime_row = [&](const std::string& tag, auto kept, auto cond, auto coll,
                        auto defined) {
    SweepRow row = base;
    row.regime = tag;
    std::vector<double> v_kept, v_cond, v_coll;
    v_kept.reserve(n_mc);
    for (const RealizationObservables& r : records_) {
      v_kept.push_back(kept(r));
      v_coll.push_back(coll(r));
      if (defined(r)) v_cond.push_back(cond(r));
    }
    const MeanSe mk = mean_se(v_kept);
    row.p_all_kept_mean = mk.mean;
    row.p_all_kept_se = mk.se;
    const MeanSe mc = mean_se(v_cond);  // over realizations where conditioning is possible
    row.p_collision_given_kept_mean = mc.mean;
    row.p_collision_given_kept_se = mc.se;
    const MeanSe ma = mean_se(v_coll);
    row.p_collision_mean = ma.mean;
    row.p_collision_se = ma.se;
    rows.push_back(std::move(row));
  };

  if (with_dist) {
    regime_row(
        "distinguishable", [](const RealizationObservables& r) { return r.p_all_kept_d; },
        [](const RealizationObservables& r) { return r.p_coll_cond_d; },
        [](const RealizationObservables& r) { return r.p_coll_d; },
        [](const RealizationObservables& r) { return r.cond_defined_d; });
  }
  if (with_indist) {
    regime_row(
        "indistinguishable", [](const RealizationObservables& r) { return r.p_all_kept_i; },
        [](const RealizationObservables& r) { return r.p_coll_cond_i; },
        [](const RealizationObservables& r) { return r.p_coll_i; },
        [](const RealizationObservables& r) { return r.cond_defined_i; });
  }
  return rows;
}

// ------------------------------------------------------------------ sweep ---

namespace detail {

SweepSetup::SweepSetup(const SimConfig& cfg, const ProgressFn& progress)
    : grid{cfg.n_points, cfg.spacing},
      cn2s(cfg.cn2_grid()),
      slab_len(cfg.path_length / static_cast<double>(cfg.n_slabs)),
      kernel(grid, slab_len, cfg.wavelength),
      window_storage(grid, cfg.guard_fraction),
      use_window(cfg.absorber) {
  banks.reserve(cfg.n_modes.size());
  planes.reserve(cfg.n_modes.size());
  for (std::size_t n : cfg.n_modes) {
    banks.push_back(build_banks(grid, cfg.waist, n, cfg.path_length, cfg.wavelength));
    planes.push_back(plane_banks(grid, cfg.waist, mode_set(n), cfg.n_slabs, slab_len,
                                 cfg.wavelength));
    if (progress) progress("prepared mode banks for n=" + std::to_string(n));
  }
  tparams.reserve(cn2s.size());
  synths.reserve(cn2s.size());
  for (double cn2 : cn2s) {
    TurbulenceParams p;
    p.cn2 = cn2;
    p.outer_scale = cfg.outer_scale;
    p.inner_scale = cfg.inner_scale;
    p.wavelength = cfg.wavelength;
    p.path_length = cfg.path_length;
    p.n_slabs = cfg.n_slabs;
    p.rho_z = cfg.rho_z;
    tparams.push_back(p);
    synths.emplace_back(grid, p, cfg.subharmonic_levels);
  }
}

RealizationObservables compute_realization(const SimConfig& cfg, const CellContext& ctx,
                                           const StreamKey& key) {
  const std::vector<PhaseScreen> screens = ctx.synth->make_stack(key);
  const RealizationResult rr =
      propagate_realization(*ctx.banks, screens, *ctx.kernel, ctx.window);

  RealizationObservables obs;
  const std::size_t n = static_cast<std::size_t>(rr.erasure.size());
  obs.eps.resize(n);
  for (std::size_t m = 0; m < n; ++m) obs.eps[m] = rr.erasure[static_cast<Eigen::Index>(m)];

  if (cfg.run_distinguishable()) {
    const OutcomeStats st = distinguishable_stats(rr.t);
    obs.p_all_kept_d = st.p_all_kept;
    obs.p_coll_cond_d = st.p_collision_given_kept;
    obs.p_coll_d = st.p_collision;
    obs.cond_defined_d = st.conditional_defined;
  }
  if (cfg.run_indistinguishable()) {
    const OutcomeStats st = indistinguishable_stats(rr.t);
    obs.p_all_kept_i = st.p_all_kept;
    obs.p_coll_cond_i = st.p_collision_given_kept;
    obs.p_coll_i = st.p_collision;
    obs.cond_defined_i = st.conditional_defined;
  }

  double fc = 0.0, fu = 0.0, succ = 1.0;
  for (std::size_t m = 0; m < n; ++m) {
    const RailBlock block =
        rail_block(rr.t(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)),
                   obs.eps[m], nullptr);
    const FidelityResult fid = polarization_fidelity(block);
    fc += fid.conditional;
    fu += fid.unconditional;
    succ *= 1.0 - obs.eps[m];
  }
  obs.fid_cond = fc / static_cast<double>(n);
  obs.fid_uncond = fu / static_cast<double>(n);
  obs.p_succ = succ;

  if (key.mc_index < cfg.slab_factor_samples) {
    const std::vector<Eigen::MatrixXcd> factors =
        slabwise_factors(*ctx.planes, screens, *ctx.kernel, ctx.window);
    obs.block_dev = composition_deviation(factors, rr.t);
    obs.has_block_dev = true;
  }
  return obs;
}

std::vector<SweepRow> reduce_cells(const SimConfig& cfg, const SweepSetup& setup,
                                   const std::vector<CellAccumulator>& cells) {
  std::vector<SweepRow> rows;
  for (std::size_t ci = 0; ci < setup.cn2s.size(); ++ci) {
    const double r0 = fried_parameter(setup.tparams[ci]);
    const double ry = rytov_variance(setup.tparams[ci]);
    for (std::size_t ni = 0; ni < cfg.n_modes.size(); ++ni) {
      const std::size_t cell = ci * cfg.n_modes.size() + ni;
      std::vector<SweepRow> cell_rows =
          cells[cell].finalize(setup.cn2s[ci], cfg.n_modes[ni], r0, ry,
                               cfg.run_distinguishable(), cfg.run_indistinguishable());
      for (SweepRow& row : cell_rows) rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace detail

SweepResult run_sweep(const SimConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const detail::SweepSetup setup(cfg, progress);
  const std::vector<double>& cn2s = setup.cn2s;

  // accumulator per (cn2, n) cell; every (cn2, n, mc) item fills one slot
  const std::size_t n_cells = cn2s.size() * cfg.n_modes.size();
  std::vector<CellAccumulator> cells;
  cells.reserve(n_cells);
  for (std::size_t c = 0; c < cn2s.size(); ++c) {
    for (std::size_t ni = 0; ni < cfg.n_modes.size(); ++ni) {
      cells.emplace_back(cfg.n_mc, cfg.n_modes[ni]);
    }
  }
  std::vector<std::atomic<std::size_t>> remaining(n_cells);
  for (auto& r : remaining) r.store(cfg.n_mc);

  const std::size_t n_items = n_cells * cfg.n_mc;
  const int threads = cfg.workers == 0 ? omp_get_max_threads()
                                       : static_cast<int>(cfg.workers);

  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (cfg.workers != 1)
  for (std::size_t item = 0; item < n_items; ++item) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const std::size_t mc = item % cfg.n_mc;
      const std::size_t cell = item / cfg.n_mc;
      const std::size_t ni = cell % cfg.n_modes.size();
      const std::size_t ci = cell / cfg.n_modes.size();

      const detail::CellContext ctx = setup.cell(ci, ni);

      StreamKey key;
      key.master = cfg.master_seed;
      key.cn2_index = ci;
      key.n_index = ni;
      key.mc_index = mc;

      RealizationObservables obs = detail::compute_realization(cfg, ctx, key);

#pragma omp critical(turbmimo_sweep_accumulate)
      {
        cells[cell].add(mc, std::move(obs));
        if (remaining[cell].fetch_sub(1) == 1 && progress) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.3g", cn2s[ci]);
          progress("cell done: cn2=" + std::string(buf) +
                   " n=" + std::to_string(cfg.n_modes[ni]));
        }
      }
    } catch (...) {
#pragma omp critical(turbmimo_sweep_error)
      {
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  result.rows = detail::reduce_cells(cfg, setup, cells);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ------------------------------------------------------------------ output ---

std::string csv_header() {
  return "cn2,n_modes,regime,n_mc,fried_r0,rytov_variance,"
         "p_all_kept_mean,p_all_kept_se,"
         "p_collision_given_kept_mean,p_collision_given_kept_se,"
         "p_collision_mean,p_collision_se,"
         "mean_erasure_mean,mean_erasure_se,"
         "fidelity_cond_mean,fidelity_cond_se,"
         "fidelity_uncond_mean,fidelity_uncond_se,"
         "p_succ_mean,p_succ_se,"
         "block_dev_mean,block_dev_se,block_dev_samples,"
         "erasure_corr_indicator,erasure_corr_indicator_se,"
         "erasure_corr_propensity,erasure_corr_propensity_se,"
         "saturated_rails";
}

namespace {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_line(const SweepRow& r) {
  std::string s;
  s.reserve(512);
  s += fmt_g17(r.cn2);
  s += ',';
  s += std::to_string(r.n_modes);
  s += ',';
  s += r.regime;
  s += ',';
  s += std::to_string(r.n_mc);
  for (double v : {r.fried_r0, r.rytov_variance, r.p_all_kept_mean, r.p_all_kept_se,
                   r.p_collision_given_kept_mean, r.p_collision_given_kept_se,
                   r.p_collision_mean, r.p_collision_se, r.mean_erasure_mean,
                   r.mean_erasure_se, r.fidelity_cond_mean, r.fidelity_cond_se,
                   r.fidelity_uncond_mean, r.fidelity_uncond_se, r.p_succ_mean,
                   r.p_succ_se, r.block_dev_mean, r.block_dev_se}) {
    s += ',';
    s += fmt_g17(v);
  }
  s += ',';
  s += std::to_string(r.block_dev_samples);
  for (double v : {r.erasure_corr_indicator, r.erasure_corr_indicator_se,
                   r.erasure_corr_propensity, r.erasure_corr_propensity_se}) {
    s += ',';
    s += fmt_g17(v);
  }
  s += ',';
  s += std::to_string(r.saturated_rails);
  return s;
}

void write_results(const SweepResult& result, const SimConfig& cfg,
                   const std::string& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + csv_path);
    out << csv_header() << '\n';
    for (const SweepRow& row : result.rows) out << csv_line(row) << '\n';
    if (!out) throw IoError("failed writing output file: " + csv_path);
  }
  {
    const std::string meta_path = csv_path + ".meta";
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + meta_path);
    out << "version = " << kVersion << '\n';
    for (const std::string& key : known_keys()) {
      if (key == "cn2_list" && cfg.cn2_list.empty()) continue;
      std::string v = format_key(cfg, key);
      if (key == "cn2_list") {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t i = 0; i < cfg.cn2_list.size(); ++i) {
          os << (i ? "," : "") << cfg.cn2_list[i];
        }
        v = os.str();
      }
      out << key << " = " << v << '\n';
    }
    out << "rows = " << result.rows.size() << '\n';
    out << "wall_seconds = " << fmt_g17(result.wall_seconds) << '\n';
    if (!out) throw IoError("failed writing output file: " + meta_path);
  }
}

}  // namespace turbmimo
