// dmtlink: command-line front end of the DMT/VCSEL link simulator.

#include "dmtlink/config.hpp"
#include "dmtlink/kernels.hpp"
#include "dmtlink/report.hpp"
#include "dmtlink/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace dmtlink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRunFailure = 3;

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  return out;
}

struct RunOptions {
  std::string config;
  std::string out;
  std::string metrics;
  std::optional<double> rate, reach, offset;
  std::optional<std::string> filter;
  std::optional<int> frames;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.frames) cfg.n_frames = *o.frames;
  if (o.seed) cfg.seed = *o.seed;
  if (cfg.n_frames < 1) throw ConfigError("--frames", "must be >= 1");
  SweepPoint p{cfg.rates_gbps.front(), cfg.reaches_km.front(), cfg.filter_states.front(),
               cfg.offsets_nm.front()};
  if (o.rate) p.rate_gbps = *o.rate;
  if (o.reach) p.reach_km = *o.reach;
  if (o.offset) p.offset_nm = *o.offset;
  if (o.filter) p.filter_on = (*o.filter == "on");

  LinkMetrics m;
  const ResultRow row = evaluate_point(cfg, p, &m);
  std::ofstream out = open_csv(o.out);
  write_csv({row}, out);
  if (!o.metrics.empty()) open_csv(o.metrics) << metrics_json(m) << '\n';
  std::cerr << format_row(row) << '\n';
  return row.failure.empty() ? kExitOk : kExitRunFailure;
}

int cmd_sweep(const std::string& config, const std::string& out_path, const std::string& plots) {
  const ExperimentConfig cfg = load_config(config);
  std::ofstream out = open_csv(out_path);
  write_csv_header(out);
  bool failed = false;
  std::vector<LinkMetrics> metrics;
  const auto rows = sweep_grid(
      cfg,
      [&](const ResultRow& r) {
        out << format_row(r) << '\n';
        out.flush();
        failed = failed || !r.failure.empty();
      },
      plots.empty() ? nullptr : &metrics);
  if (!plots.empty()) {
    std::filesystem::create_directories(plots);
    emit_plot(rows, std::filesystem::path(plots) / "ber_vs_reach.svg");
    std::vector<SnrTrace> traces;
    const auto pts = grid_points(cfg);
    const double shortest = *std::min_element(cfg.reaches_km.begin(), cfg.reaches_km.end());
    const double longest = *std::max_element(cfg.reaches_km.begin(), cfg.reaches_km.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      if (p.rate_gbps != cfg.rates_gbps.front() || p.offset_nm != cfg.offsets_nm.front()) continue;
      if (p.reach_km != shortest && p.reach_km != longest) continue;
      if (metrics[i].snr_profile.snr_linear.empty()) continue;
      char label[96];
      std::snprintf(label, sizeof label, "%g km, filter %s", p.reach_km, p.filter_on ? "on" : "off");
      traces.push_back({label, metrics[i].snr_profile});
    }
    emit_snr_plot(traces, cfg.link.dmt, std::filesystem::path(plots) / "snr_profiles.svg");
  }
  return failed ? kExitRunFailure : kExitOk;
}

int cmd_spectrum(const std::string& config, const std::string& out_path, double resolution_ghz) {
  const ExperimentConfig cfg = load_config(config);
  const SweepPoint p{cfg.rates_gbps.front(), cfg.reaches_km.front(), true, cfg.offsets_nm.front()};
  const LinkConfig link = configure_point(cfg, p);
  const OpticalField field = launched_field(link, cfg.seed);
  std::ofstream out = open_csv(out_path);
  write_spectrum_csv(dump_spectrum(field, resolution_ghz * 1e9, link.filter), out);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"DMT direct-detection link simulator"};
  app.require_subcommand(1);
  bool show_kernels = false;
  app.add_flag("--kernels", show_kernels, "Print the selected SIMD kernel set");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one operating point");
  run_cmd->add_option("--config", run.config, "JSON configuration")->required();
  run_cmd->add_option("--out", run.out, "Output CSV")->required();
  run_cmd->add_option("--rate-gbps", run.rate, "Target gross rate");
  run_cmd->add_option("--reach-km", run.reach, "Fiber length");
  run_cmd->add_option("--filter", run.filter, "Mux filter")->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--offset-nm", run.offset, "Carrier to passband offset");
  run_cmd->add_option("--frames", run.frames, "Loaded frames per point");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--metrics", run.metrics, "Write per-point diagnostics as JSON");

  std::string sweep_config, sweep_out, sweep_plots;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep rates x reaches x filter x offsets");
  sweep_cmd->add_option("--config", sweep_config, "JSON configuration")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output CSV")->required();
  sweep_cmd->add_option("--plots", sweep_plots, "Directory for SVG figures");

  std::string spec_config, spec_out;
  double resolution_ghz = 0.1;
  auto* spec_cmd = app.add_subcommand("spectrum", "Launched optical spectrum and filter passband");
  spec_cmd->add_option("--config", spec_config, "JSON configuration")->required();
  spec_cmd->add_option("--out", spec_out, "Output CSV")->required();
  spec_cmd->add_option("--resolution-ghz", resolution_ghz, "Welch resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (show_kernels) std::cerr << "kernels: " << kernels::active().name << '\n';

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_out, sweep_plots);
    if (*spec_cmd) return cmd_spectrum(spec_config, spec_out, resolution_ghz);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleLoading& e) {
    std::cerr << e.what() << '\n';
    return kExitRunFailure;
  } catch (const SyncFailure& e) {
    std::cerr << e.what() << '\n';
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
