#pragma once

#include "dmtlink/link.hpp"

#include <functional>
#include <optional>
#include <string>

namespace dmtlink {

struct ExperimentConfig {
  LinkConfig link;
  std::vector<double> rates_gbps{56.0, 64.0, 74.7, 89.6};
  std::vector<double> reaches_km{0.0, 2.5, 5.0, 7.5, 10.0, 12.0};
  std::vector<bool> filter_states{false, true};
  std::vector<double> offsets_nm{0.07};
  int n_frames = 20;
  std::uint64_t seed = 1;
  int threads = 0; // 0 = hardware concurrency

  void validate() const;
};

struct SweepPoint {
  double rate_gbps = 56.0;
  double reach_km = 0.0;
  bool filter_on = false;
  double offset_nm = 0.07;
};

// base_seed XOR a stable hash of the point coordinates.
std::uint64_t point_seed(std::uint64_t base_seed, const SweepPoint& point);

// Link configuration for one sweep point.
LinkConfig configure_point(const ExperimentConfig& cfg, const SweepPoint& point);

struct ProbeResult {
  SnrProfile snr;
  FrequencyFrame frame;
  ReceivedFrame rx;
};

// Pass 1: uniform 16QAM frame through the link, data-aided SNR at the receiver.
ProbeResult run_probe(const LinkConfig& link, std::uint64_t seed);

// Probe, Chow loading to the rate target, then n_frames loaded frames with
// fresh payload and noise. Throws InfeasibleLoading / SyncFailure.
LinkMetrics run_link(const LinkConfig& link, double rate_gbps, int n_frames, std::uint64_t seed);
LinkMetrics run_link(const ExperimentConfig& cfg, const SweepPoint& point);

struct ResultRow {
  double rate_gbps = 0.0;
  double reach_km = 0.0;
  bool filter_on = false;
  double offset_nm = 0.0;
  std::optional<double> ber; // empty when the point failed
  bool pass_fec = false;
  double achieved_rate_gbps = 0.0;
  double mean_snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string failure; // "infeasible" or "sync_failure" when ber is empty

  bool operator==(const ResultRow&) const = default;
};

// Mean of the per-subcarrier SNR in dB.
double mean_snr_db(const SnrProfile& snr);

std::vector<SweepPoint> grid_points(const ExperimentConfig& cfg);

ResultRow evaluate_point(const ExperimentConfig& cfg, const SweepPoint& point,
                         LinkMetrics* metrics = nullptr);

// Rows are emitted in point order through `on_row` as soon as every earlier
// point has completed; points run concurrently.
using RowSink = std::function<void(const ResultRow&)>;
std::vector<ResultRow> sweep_grid(const ExperimentConfig& cfg, const RowSink& on_row = {},
                                  std::vector<LinkMetrics>* metrics = nullptr);

struct OffsetSweep {
  std::vector<ResultRow> rows;
  double best_offset_nm = 0.0;
};

// Filter forced on; one row per (rate, reach, offset).
OffsetSweep sweep_offset(const ExperimentConfig& cfg, const std::vector<double>& offsets_nm);

struct SpectrumTable {
  std::vector<double> freq_hz; // relative to the carrier
  std::vector<double> psd_db;  // normalized to a 0 dB peak
  std::vector<double> filter_db;
};

// Welch PSD (Hann, 50 % overlap) with segment length sample_rate/resolution
// rounded up to a power of two, plus the filter magnitude on the same axis.
SpectrumTable dump_spectrum(const OpticalField& field, double resolution_hz,
                            const FilterParams& filter);

// Launched field of a probe frame for the configuration's first point.
OpticalField launched_field(const LinkConfig& link, std::uint64_t seed);

} // namespace dmtlink
