#pragma once

#include "dmtlink/types.hpp"

#include <optional>

namespace dmtlink {

inline constexpr double kSyncThreshold = 0.2;

struct SyncResult {
  std::size_t offset = 0;
  double peak = 0.0; // normalized correlation at the chosen offset
};

// Normalized cross-correlation of rx against the known training waveform;
// lags 0..max_lag (default: every lag where ts_ref fits). Throws SyncFailure
// when the peak is below `threshold`.
SyncResult synchronize(const RealWaveform& rx, const RealWaveform& ts_ref,
                       std::optional<std::size_t> max_lag = std::nullopt,
                       double threshold = kSyncThreshold);

struct DemodulatedFrame {
  Grid ts;   // n_ts x n_active
  Grid data; // n_data x n_active
};

// Strips the CP and transforms each of the frame's symbols starting at `offset`.
DemodulatedFrame demodulate(const RealWaveform& rx, std::size_t offset, const DmtConfig& config);

enum class EstimateSource { TrainingAverage, DecisionUpdated };

struct ChannelEstimate {
  std::vector<Complex> h;
  EstimateSource source = EstimateSource::TrainingAverage;
};

// h_n = mean over training rows of Y_n / X_n.
ChannelEstimate estimate_channel(const Grid& ts_rx, const Grid& ts_known);

struct EqualizerOutput {
  Grid equalized; // Y / h before the update of each symbol
  Grid decisions; // sqrt(p)-scaled constellation points; zero on unloaded or dead subcarriers
  std::vector<bool> dead;
  ChannelEstimate final_estimate;
};

inline constexpr double kDefaultDdStep = 0.05;

// Decision-directed one-tap equalizer: X = Y/h, D = decide(X), h <- (1-mu) h + mu Y/D.
EqualizerOutput equalize_dd(const Grid& data, const ChannelEstimate& estimate,
                            const LoadingPlan& plan, double mu = kDefaultDdStep);

// Hard-decision bits of every data symbol in transmit order. Dead subcarriers
// yield zero bits.
Bits demap_frame(const EqualizerOutput& eq, const LoadingPlan& plan);

struct BerCount {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_counted = 0;
  double ber = 0.0;
  bool pass_fec = true;
};

BerCount count_ber(const Bits& tx, const Bits& rx);
BerCount merge(const BerCount& a, const BerCount& b);

struct LinkMetrics {
  double ber = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_counted = 0;
  SnrProfile snr_profile;    // from the probe pass
  std::vector<double> evm_db; // per subcarrier, loaded pass
  double achieved_rate = 0.0;
  std::size_t sync_offset = 0;
  double sync_peak = 0.0;
  bool pass_fec = false;
  LoadingPlan plan;
  int dead_subcarriers = 0;
  bool laser_clipped = false;
};

} // namespace dmtlink
