// dmtlink_calibrate: fits the two free device constants (laser drive and
// receiver noise density) to the two reference anchors.
//
// Anchor 1: back-to-back, filter off, the peak of the probe SNR profile
//           (16-subcarrier moving average of dB) equals --peak-snr-db.
// Anchor 2: 56 Gb/s, filter off, the geometric mean of the BER at 7.5 km
//           and 10 km equals the FEC limit, placing the reach limit between
//           those two grid points.
// The drive is re-solved for anchor 1 at every noise step.

#include "dmtlink/config.hpp"
#include "dmtlink/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

using namespace dmtlink;

namespace {

double peak_snr_db(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto probe = run_probe(configure_point(cfg, {56.0, 0.0, false, cfg.offsets_nm.front()}), seed);
  const auto& s = probe.snr.snr_linear;
  const std::size_t w = std::min<std::size_t>(16, s.size());
  double best = -1e300;
  for (std::size_t i = 0; i + w <= s.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = i; k < i + w; ++k) acc += linear_to_db(std::max(s[k], 1e-30));
    best = std::max(best, acc / static_cast<double>(w));
  }
  return best;
}

double solve_drive(ExperimentConfig& cfg, double target_db, std::uint64_t seed) {
  double lo = 0.2, hi = 8.0;
  for (int it = 0; it < 16; ++it) {
    const double mid = 0.5 * (lo + hi);
    cfg.link.vcsel.drive_rms_ma = mid;
    (peak_snr_db(cfg, seed) < target_db ? lo : hi) = mid;
  }
  cfg.link.vcsel.drive_rms_ma = 0.5 * (lo + hi);
  return cfg.link.vcsel.drive_rms_ma;
}

double reach_anchor(const ExperimentConfig& cfg) {
  const double off = cfg.offsets_nm.front();
  const ResultRow a = evaluate_point(cfg, {56.0, 7.5, false, off});
  const ResultRow b = evaluate_point(cfg, {56.0, 10.0, false, off});
  if (!a.ber || !b.ber) return 1.0;
  return std::sqrt(std::max(*a.ber, 1e-9) * std::max(*b.ber, 1e-9));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate laser drive and receiver noise to the reference anchors"};
  std::string config;
  double peak_db = 20.0, noise_lo = 10.0, noise_hi = 60.0;
  int frames = 8, steps = 8;
  app.add_option("--config", config, "JSON configuration (defaults if omitted)");
  app.add_option("--peak-snr-db", peak_db, "Back-to-back peak SNR anchor");
  app.add_option("--noise-min", noise_lo, "Lower noise density bound, pA/sqrt(Hz)");
  app.add_option("--noise-max", noise_hi, "Upper noise density bound, pA/sqrt(Hz)");
  app.add_option("--frames", frames, "Loaded frames per BER evaluation");
  app.add_option("--steps", steps, "Bisection steps on the noise density");
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
    cfg.n_frames = frames;
    const std::uint64_t seed = cfg.seed;
    // BER at the anchor rises with the noise density.
    double lo = noise_lo, hi = noise_hi;
    for (int it = 0; it < steps; ++it) {
      const double mid = 0.5 * (lo + hi);
      cfg.link.rx.noise_current_density = mid * 1e-12;
      const double drive = solve_drive(cfg, peak_db, seed);
      const double ber = reach_anchor(cfg);
      std::printf("noise %.3f pA/rtHz  drive %.4f mA  anchor BER %.3e\n", mid, drive, ber);
      std::fflush(stdout);
      (ber < kFecBerLimit ? lo : hi) = mid;
    }
    cfg.link.rx.noise_current_density = 0.5 * (lo + hi) * 1e-12;
    const double drive = solve_drive(cfg, peak_db, seed);
    std::printf("\n{\"vcsel\": {\"drive_rms_ma\": %.4g}, \"rx\": {\"noise_current_density\": %.4g}}\n", drive,
                cfg.link.rx.noise_current_density);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
