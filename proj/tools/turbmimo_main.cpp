// turbmimo: turbulent free-space OAM-multiplexed link simulator.
//
// Exit codes: 0 success, 1 check/run failure, 2 usage or config error,
// 3 I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "turbmimo/crosstalk.hpp"
#include "turbmimo/experiment.hpp"
#include "turbmimo/logical_channel.hpp"
#include "turbmimo/modes.hpp"
#include "turbmimo/photon_stats.hpp"
#include "turbmimo/propagation.hpp"
#include "turbmimo/reference.hpp"
#include "turbmimo/rng.hpp"
#include "turbmimo/turbulence.hpp"
#include "turbmimo/validate.hpp"
#include "turbmimo/version.hpp"

namespace {

using namespace turbmimo;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (key = value)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.sets, "override one key (key=value); repeatable");
  cmd->add_option("--seed", opts.seed, "override master_seed");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
  cmd->add_flag("--verbose", opts.verbose, "extra progress output");
}

// --seed beats TURBMIMO_SEED beats the config file.
SimConfig make_config(const CommonOpts& opts) {
  std::vector<std::string> notices;
  SimConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_config(opts.config_path, opts.verbose ? &notices : nullptr);
  }
  for (const std::string& s : opts.sets) apply_override(cfg, s);
  if (const char* env = std::getenv("TURBMIMO_SEED")) {
    try {
      std::size_t used = 0;
      cfg.master_seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw ConfigError(std::string("TURBMIMO_SEED: cannot parse '") + env + "'");
    }
  }
  if (opts.seed) cfg.master_seed = *opts.seed;
  cfg.validate();
  if (opts.verbose) {
    for (const std::string& n : notices) std::cerr << "config: " << n << "\n";
  }
  return cfg;
}

ProgressFn make_progress(const CommonOpts& opts) {
  if (opts.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << "\n"; };
}

TurbulenceParams params_for(const SimConfig& cfg, double cn2) {
  TurbulenceParams p;
  p.cn2 = cn2;
  p.outer_scale = cfg.outer_scale;
  p.inner_scale = cfg.inner_scale;
  p.wavelength = cfg.wavelength;
  p.path_length = cfg.path_length;
  p.n_slabs = cfg.n_slabs;
  p.rho_z = cfg.rho_z;
  return p;
}

void write_f64(std::ofstream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

int cmd_sweep(const CommonOpts& opts, const std::string& out_path,
              std::optional<std::size_t> workers, bool serial_reference) {
  SimConfig cfg = make_config(opts);
  if (workers) cfg.workers = *workers;
  const SweepResult result = serial_reference
                                 ? reference::run_sweep_serial(cfg, make_progress(opts))
                                 : run_sweep(cfg, make_progress(opts));
  write_results(result, cfg, out_path);
  if (!opts.quiet) {
    std::cerr << "wrote " << result.rows.size() << " rows to " << out_path << " in "
              << result.wall_seconds << " s\n";
  }
  return kExitOk;
}

int cmd_screens(const CommonOpts& opts, const std::string& out_path, double cn2,
                std::size_t realization) {
  const SimConfig cfg = make_config(opts);
  const Grid grid{cfg.n_points, cfg.spacing};
  const ScreenSynthesizer synth(grid, params_for(cfg, cn2), cfg.subharmonic_levels);
  StreamKey key;
  key.master = cfg.master_seed;
  key.mc_index = realization;
  const std::vector<PhaseScreen> stack = synth.make_stack(key);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + out_path);
  out << "turbmimo-screens v1\n";
  out << "n=" << grid.n << " spacing=" << grid.spacing << " slabs=" << stack.size()
      << " cn2=" << cn2 << " seed=" << cfg.master_seed << " realization=" << realization
      << "\n";
  for (const PhaseScreen& s : stack) write_f64(out, s.phase.data(), s.phase.size());
  if (!out) throw IoError("failed writing output file: " + out_path);
  if (!opts.quiet) {
    std::cerr << "wrote " << stack.size() << " screens (" << grid.n << "x" << grid.n
              << ") to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_modes(const CommonOpts& opts, const std::string& out_path, std::size_t n_modes) {
  const SimConfig cfg = make_config(opts);
  const Grid grid{cfg.n_points, cfg.spacing};
  const Banks banks = build_banks(grid, cfg.waist, n_modes, cfg.path_length, cfg.wavelength);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + out_path);
  out << "turbmimo-modes v1\n";
  out << "n=" << grid.n << " spacing=" << grid.spacing << " modes=" << n_modes << " ells=";
  for (std::size_t i = 0; i < banks.transmit.ells.size(); ++i) {
    out << (i ? "," : "") << banks.transmit.ells[i];
  }
  out << "\n";
  out.precision(17);
  for (const auto& [tag, bank] :
       {std::pair<const char*, const ModeBank*>{"tx", &banks.transmit},
        {"rx", &banks.receive}}) {
    double dev = 0.0;
    for (std::size_t a = 0; a < bank->size(); ++a) {
      for (std::size_t b = 0; b < bank->size(); ++b) {
        const std::complex<double> g = overlap(bank->fields[a], bank->fields[b]);
        out << "gram_" << tag << "[" << a << "," << b << "] = " << g.real() << " "
            << g.imag() << "\n";
        dev = std::max(dev, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    }
    out << "gram_" << tag << "_dev = " << dev << "\n";
  }
  // transmit bank then receive bank; per mode interleaved re, im planes
  for (const ModeBank* bank : {&banks.transmit, &banks.receive}) {
    for (const ComplexField& f : bank->fields) {
      std::vector<double> re(f.v.size()), im(f.v.size());
      for (std::size_t i = 0; i < f.v.size(); ++i) {
        re[i] = f.v[i].real();
        im[i] = f.v[i].imag();
      }
      write_f64(out, re.data(), re.size());
      write_f64(out, im.data(), im.size());
    }
  }
  if (!out) throw IoError("failed writing output file: " + out_path);
  return kExitOk;
}

int cmd_channel(const CommonOpts& opts, const std::string& out_path, double cn2,
                std::size_t realization, std::size_t n_modes) {
  const SimConfig cfg = make_config(opts);
  const Grid grid{cfg.n_points, cfg.spacing};
  const double slab_len = cfg.path_length / static_cast<double>(cfg.n_slabs);
  const FresnelKernel kernel(grid, slab_len, cfg.wavelength);
  const AbsorberWindow window(grid, cfg.guard_fraction);
  const Banks banks = build_banks(grid, cfg.waist, n_modes, cfg.path_length, cfg.wavelength);
  const ScreenSynthesizer synth(grid, params_for(cfg, cn2), cfg.subharmonic_levels);

  StreamKey key;
  key.master = cfg.master_seed;
  key.mc_index = realization;
  const std::vector<PhaseScreen> stack = synth.make_stack(key);
  const RealizationResult rr =
      propagate_realization(banks, stack, kernel, cfg.absorber ? &window : nullptr);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (out_path != "-") {
    file.open(out_path);
    if (!file) throw IoError("cannot open output file: " + out_path);
    os = &file;
  }
  std::ostream& out = *os;
  out.precision(17);
  out << "n_modes = " << n_modes << "\n";
  out << "cn2 = " << cn2 << "\n";
  out << "realization = " << realization << "\n";
  for (Eigen::Index r = 0; r < rr.t.rows(); ++r) {
    for (Eigen::Index m = 0; m < rr.t.cols(); ++m) {
      out << "t[" << r << "," << m << "] = " << rr.t(r, m).real() << " "
          << rr.t(r, m).imag() << "\n";
    }
  }
  for (Eigen::Index m = 0; m < rr.erasure.size(); ++m) {
    out << "eps[" << m << "] = " << rr.erasure[m] << "\n";
  }
  out << "absorbed_total = " << rr.absorbed_total << "\n";

  const OutcomeStats sd = distinguishable_stats(rr.t);
  const OutcomeStats si = indistinguishable_stats(rr.t);
  out << "dist.p_all_kept = " << sd.p_all_kept << "\n";
  out << "dist.p_collision_given_kept = " << sd.p_collision_given_kept << "\n";
  out << "dist.p_collision = " << sd.p_collision << "\n";
  out << "indist.p_all_kept = " << si.p_all_kept << "\n";
  out << "indist.p_collision_given_kept = " << si.p_collision_given_kept << "\n";
  out << "indist.p_collision = " << si.p_collision << "\n";

  const PatternLaw law = erasure_pattern_law({rr.erasure});
  for (std::size_t s = 0; s < law.p.size(); ++s) {
    std::string bits;
    for (std::size_t m = 0; m < law.n_rails; ++m) {
      bits += ((s >> (law.n_rails - 1 - m)) & 1u) ? '1' : '0';
    }
    out << "pattern[" << bits << "] = " << law.p[s] << "\n";
  }
  out << "p_success = " << block_success(law) << "\n";
  if (os == &file && !file) throw IoError("failed writing output file: " + out_path);
  return kExitOk;
}

int cmd_validate(const CommonOpts& opts, const std::string& inject) {
  FaultInjection fault = FaultInjection::none;
  if (inject == "transfer-sign") {
    fault = FaultInjection::transfer_sign;
  } else if (!inject.empty()) {
    throw ConfigError("unknown fault '" + inject + "'");
  }
  const std::uint64_t seed = opts.seed ? *opts.seed : 1;
  const ValidationReport rep = run_validation(seed, fault);
  for (const CheckResult& c : rep.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  std::cout << (rep.all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
  return rep.all_pass() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave-optical simulator of OAM-multiplexed links through turbulence"};
  app.set_version_flag("--version", turbmimo::kVersion);
  app.require_subcommand(1);

  CommonOpts sweep_opts, screens_opts, modes_opts, channel_opts, validate_opts;

  CLI::App* sweep = app.add_subcommand("sweep", "run the Monte Carlo sweep, write CSV");
  add_common(sweep, sweep_opts);
  std::string sweep_out = "results.csv";
  std::optional<std::size_t> sweep_workers;
  bool sweep_serial = false;
  sweep->add_option("--out", sweep_out, "output CSV path");
  sweep->add_option("--workers", sweep_workers, "worker threads (0 = all, 1 = serial)");
  sweep->add_flag("--serial-reference", sweep_serial,
                  "use the plain serial loop instead of the parallel driver");

  CLI::App* screens = app.add_subcommand("screens", "synthesize one phase-screen stack");
  add_common(screens, screens_opts);
  std::string screens_out = "screens.bin";
  double screens_cn2 = 1e-14;
  std::size_t screens_real = 0;
  screens->add_option("--out", screens_out, "output path (text header + float64 planes)");
  screens->add_option("--cn2", screens_cn2, "structure constant");
  screens->add_option("--realization", screens_real, "realization index");

  CLI::App* modes = app.add_subcommand("modes", "dump transmit/receive mode banks");
  add_common(modes, modes_opts);
  std::string modes_out = "modes.bin";
  std::size_t modes_n = 3;
  modes->add_option("--out", modes_out, "output path (text header + float64 planes)");
  modes->add_option("--n", modes_n, "number of modes (2..5)");

  CLI::App* channel = app.add_subcommand("channel", "one channel realization, text report");
  add_common(channel, channel_opts);
  std::string channel_out = "-";
  double channel_cn2 = 1e-14;
  std::size_t channel_real = 0;
  std::size_t channel_n = 3;
  channel->add_option("--out", channel_out, "output path, '-' for stdout");
  channel->add_option("--cn2", channel_cn2, "structure constant");
  channel->add_option("--realization", channel_real, "realization index");
  channel->add_option("--n", channel_n, "number of modes (2..5)");

  CLI::App* validate = app.add_subcommand("validate", "run the fast self-check suite");
  add_common(validate, validate_opts);
  std::string validate_inject;
  validate->add_option("--inject", validate_inject, "fault to inject (debugging)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep_out, sweep_workers, sweep_serial);
    if (screens->parsed()) return cmd_screens(screens_opts, screens_out, screens_cn2, screens_real);
    if (modes->parsed()) return cmd_modes(modes_opts, modes_out, modes_n);
    if (channel->parsed()) {
      return cmd_channel(channel_opts, channel_out, channel_cn2, channel_real, channel_n);
    }
    if (validate->parsed()) return cmd_validate(validate_opts, validate_inject);
  } catch (const turbmimo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const turbmimo::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
